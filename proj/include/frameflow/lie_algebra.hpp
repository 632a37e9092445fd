#pragma once

#include <vector>

#include "frameflow/linalg.hpp"
#include "frameflow/rng.hpp"

namespace frameflow {

inline constexpr double kAlgebraTolerance = 1e-12;
inline constexpr double kRotationTolerance = 1e-9;

/// An element of so(n). Construction checks A + A^T = 0 entrywise.
class SkewMatrix {
 public:
  explicit SkewMatrix(Mat entries, double tolerance = kAlgebraTolerance);
  static SkewMatrix zero(int n);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Mat& matrix() const { return entries_; }

 private:
  struct Unchecked {};
  SkewMatrix(Mat entries, Unchecked) : entries_(std::move(entries)) {}
  friend class SkewBasis;
  Mat entries_;
};

/// Orthonormal basis of so(n) under <A, B> = tr(A B^T).
class SkewBasis {
 public:
  /// Validates length n(n-1)/2 and the Gram matrix; throws std::invalid_argument.
  SkewBasis(int n, std::vector<SkewMatrix> elements);

  int dim() const { return n_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const SkewMatrix& operator[](int k) const { return elements_[static_cast<std::size_t>(k)]; }
  const std::vector<SkewMatrix>& elements() const { return elements_; }

  /// sum_k coefficients[k] * A_k
  Mat combine(const AlgebraVec& coefficients) const;
  /// <A, A_k> for every k.
  AlgebraVec coordinates(const Mat& a) const;

 private:
  int n_;
  std::vector<SkewMatrix> elements_;
};

/// {(E_ij - E_ji)/sqrt(2) : i < j}, lexicographic in (i, j). Throws for n < 2
/// or n > kMaxDim.
SkewBasis canonical_basis(int n);

/// Gram matrix tr(A_i A_j^T).
Eigen::MatrixXd gram_matrix(const std::vector<SkewMatrix>& elements);

/// sum_k A_k^2. For an orthonormal basis this equals -((n-1)/2) I.
Mat casimir_sum(const SkewBasis& basis);
/// max-norm distance of casimir_sum from -((n-1)/2) I.
double casimir_defect(const SkewBasis& basis);
/// max-norm distance of the Gram matrix from the identity.
double gram_defect(const SkewBasis& basis);

/// Element of SO(n). Construction checks g^T g = I and det g = +1.
class RotationMatrix {
 public:
  explicit RotationMatrix(Mat entries, double tolerance = kRotationTolerance);
  static RotationMatrix identity(int n);
  /// Skips validation; for integrator outputs whose invariants hold by construction.
  static RotationMatrix unchecked(Mat entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Mat& matrix() const { return entries_; }
  Vec apply(const Vec& v) const { return entries_ * v; }
  double defect() const { return orthogonality_defect(entries_); }

  friend RotationMatrix operator*(const RotationMatrix& a, const RotationMatrix& b) {
    return unchecked(a.entries_ * b.entries_);
  }

 private:
  RotationMatrix() = default;
  Mat entries_;
};

/// Matrix exponential of a skew matrix. Closed form for n = 2, Rodrigues for
/// n = 3, scaling and squaring with a truncated Taylor series otherwise.
Mat skew_exp(const Mat& a);
RotationMatrix group_exp(const SkewMatrix& a);

/// Nearest rotation in Frobenius norm (polar factor).
Mat project_to_rotation(const Mat& g);

/// Haar-distributed rotation: QR of a Gaussian matrix with the sign of R's
/// diagonal fixed positive, then the first column negated when det = -1.
RotationMatrix haar_sample(int n, RandomStream& rng);

}  // namespace frameflow
