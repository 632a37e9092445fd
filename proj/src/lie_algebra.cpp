#include "frameflow/lie_algebra.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace frameflow {

SkewMatrix::SkewMatrix(Mat entries, double tolerance) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw std::invalid_argument("skew matrix must be square");
  const double defect = max_abs(entries_ + entries_.transpose());
  if (defect > tolerance) {
    throw std::invalid_argument("matrix is not skew-symmetric (defect " + std::to_string(defect) + ")");
  }
}

SkewMatrix SkewMatrix::zero(int n) { return SkewMatrix(Mat::Zero(n, n), Unchecked{}); }

Eigen::MatrixXd gram_matrix(const std::vector<SkewMatrix>& elements) {
  const auto count = static_cast<Eigen::Index>(elements.size());
  Eigen::MatrixXd gram(count, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < count; ++j) {
      gram(i, j) = (elements[static_cast<std::size_t>(i)].matrix().array() *
                    elements[static_cast<std::size_t>(j)].matrix().array())
                       .sum();
    }
  }
  return gram;
}

SkewBasis::SkewBasis(int n, std::vector<SkewMatrix> elements) : n_(n), elements_(std::move(elements)) {
  if (n < 2 || n > kMaxDim) {
    throw std::invalid_argument("so(n) basis requires 2 <= n <= " + std::to_string(kMaxDim));
  }
  if (size() != algebra_dim(n)) {
    throw std::invalid_argument("so(" + std::to_string(n) + ") basis needs " +
                                std::to_string(algebra_dim(n)) + " elements, got " +
                                std::to_string(size()));
  }
  for (const auto& a : elements_) {
    if (a.dim() != n) throw std::invalid_argument("basis element has wrong dimension");
  }
  const Eigen::MatrixXd gram = gram_matrix(elements_);
  const double defect = (gram - Eigen::MatrixXd::Identity(size(), size())).cwiseAbs().maxCoeff();
  if (defect > kAlgebraTolerance) {
    throw std::invalid_argument("basis is not orthonormal under tr(AB^T) (Gram defect " +
                                std::to_string(defect) + ")");
  }
}

Mat SkewBasis::combine(const AlgebraVec& coefficients) const {
  Mat out = Mat::Zero(n_, n_);
  for (int k = 0; k < size(); ++k) out += coefficients(k) * elements_[static_cast<std::size_t>(k)].matrix();
  return out;
}

AlgebraVec SkewBasis::coordinates(const Mat& a) const {
  AlgebraVec c(size());
  for (int k = 0; k < size(); ++k) {
    c(k) = (a.array() * elements_[static_cast<std::size_t>(k)].matrix().array()).sum();
  }
  return c;
}

SkewBasis canonical_basis(int n) {
  if (n < 2) throw std::invalid_argument("so(n) requires n >= 2, got " + std::to_string(n));
  if (n > kMaxDim) throw std::invalid_argument("dimension exceeds supported maximum " + std::to_string(kMaxDim));
  std::vector<SkewMatrix> elements;
  elements.reserve(static_cast<std::size_t>(algebra_dim(n)));
  const double w = 1.0 / std::numbers::sqrt2;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Mat a = Mat::Zero(n, n);
      a(i, j) = w;
      a(j, i) = -w;
      elements.emplace_back(std::move(a));
    }
  }
  return SkewBasis(n, std::move(elements));
}

Mat casimir_sum(const SkewBasis& basis) {
  const int n = basis.dim();
  Mat sum = Mat::Zero(n, n);
  for (const auto& a : basis.elements()) sum += a.matrix() * a.matrix();
  return sum;
}

double casimir_defect(const SkewBasis& basis) {
  const int n = basis.dim();
  return max_abs(casimir_sum(basis) + 0.5 * (n - 1) * Mat::Identity(n, n));
}

double gram_defect(const SkewBasis& basis) {
  const Eigen::MatrixXd gram = gram_matrix(basis.elements());
  return (gram - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff();
}

RotationMatrix::RotationMatrix(Mat entries, double tolerance) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw std::invalid_argument("rotation must be square");
  const double defect = orthogonality_defect(entries_);
  if (defect > tolerance) {
    throw std::invalid_argument("matrix is not orthogonal (defect " + std::to_string(defect) + ")");
  }
  if (entries_.determinant() < 0.0) throw std::invalid_argument("matrix has determinant -1");
}

RotationMatrix RotationMatrix::identity(int n) { return unchecked(Mat::Identity(n, n)); }

RotationMatrix RotationMatrix::unchecked(Mat entries) {
  RotationMatrix g;
  g.entries_ = std::move(entries);
  return g;
}

namespace {

Mat exp_so2(const Mat& a) {
  const double angle = a(0, 1);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat out(2, 2);
  out << c, s, -s, c;
  return out;
}

Mat exp_so3(const Mat& a) {
  const double wx = a(2, 1), wy = a(0, 2), wz = a(1, 0);
  const double theta2 = wx * wx + wy * wy + wz * wz;
  double sinc, cosc;
  if (theta2 < 1e-8) {
    sinc = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    cosc = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const double theta = std::sqrt(theta2);
    sinc = std::sin(theta) / theta;
    cosc = (1.0 - std::cos(theta)) / theta2;
  }
  Mat out = Mat::Identity(3, 3);
  out += sinc * a + cosc * a.lazyProduct(a);
  return out;
}

Mat exp_scaling_squaring(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Mat b = a * std::ldexp(1.0, -squarings);
  Mat out = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = (term.lazyProduct(b) / static_cast<double>(k)).eval();
    out += term;
    if (max_abs(term) < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) out = out * out;
  return out;
}

}  // namespace

Mat skew_exp(const Mat& a) {
  switch (a.rows()) {
    case 2:
      return exp_so2(a);
    case 3:
      return exp_so3(a);
    default:
      return exp_scaling_squaring(a);
  }
}

RotationMatrix group_exp(const SkewMatrix& a) { return RotationMatrix::unchecked(skew_exp(a.matrix())); }

Mat project_to_rotation(const Mat& g) {
  Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0.0) {
    Mat u = svd.matrixU();
    u.col(u.cols() - 1) *= -1.0;
    out = u * svd.matrixV().transpose();
  }
  return out;
}

RotationMatrix haar_sample(int n, RandomStream& rng) {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("haar_sample requires 2 <= n <= kMaxDim");
  Mat z(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) z(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return RotationMatrix::unchecked(std::move(q));
}

}  // namespace frameflow
