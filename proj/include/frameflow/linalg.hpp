#pragma once

#include <Eigen/Dense>

namespace frameflow {

// Largest supported manifold/group dimension. Matrices are stack-allocated
// with this bound so the per-step kernels never touch the heap.
inline constexpr int kMaxDim = 8;
inline constexpr int kMaxAlgebraDim = kMaxDim * (kMaxDim - 1) / 2;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using AlgebraVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxAlgebraDim, 1>;

inline int algebra_dim(int n) { return n * (n - 1) / 2; }

inline Vec unit_vector(int n, int i) {
  Vec e = Vec::Zero(n);
  e(i) = 1.0;
  return e;
}

// max_ij |m_ij|
inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// max_ij |(g^T g - I)_ij|
inline double orthogonality_defect(const Mat& g) {
  return max_abs(g.transpose().lazyProduct(g) - Mat::Identity(g.cols(), g.cols()));
}

}  // namespace frameflow
