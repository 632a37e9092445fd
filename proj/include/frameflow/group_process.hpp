#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "frameflow/lie_algebra.hpp"
#include "frameflow/parallel.hpp"

namespace frameflow {

/// Fast diffusion dg = (1/sqrt(eps)) sum_k g A_k o dw^k + g Abar dt on SO(n).
/// `step` is measured on the slow clock; the per-step fast increment is step/epsilon.
struct GroupSdeConfig {
  double epsilon = 1.0;
  SkewMatrix drift;
  SkewBasis basis;
  double step = 0.1;
  double cfl_factor = 0.1;

  GroupSdeConfig(double epsilon, SkewMatrix drift, SkewBasis basis, double step, double cfl_factor = 0.1);
  static GroupSdeConfig standard(int n, double step, double epsilon = 1.0);

  int dim() const { return basis.dim(); }
  void validate() const;
};

/// g * exp(sqrt(dt/eps) sum_k xi_k A_k + dt * Abar). `dt` defaults to cfg.step;
/// splitting schemes pass fractions of it.
RotationMatrix step_group(const RotationMatrix& g, const GroupSdeConfig& cfg, std::span<const double> xi);
RotationMatrix step_group(const RotationMatrix& g, const GroupSdeConfig& cfg, std::span<const double> xi, double dt);

/// Re-projects g onto SO(n) every `cadence` calls or whenever the
/// orthogonality defect exceeds `threshold`.
class GroupProjector {
 public:
  explicit GroupProjector(int cadence = 1000, double threshold = 1e-9) : cadence_(cadence), threshold_(threshold) {}
  void maybe_project(Mat& g);
  int projections() const { return projections_; }

 private:
  int cadence_;
  double threshold_;
  int counter_ = 0;
  int projections_ = 0;
};

/// h_i(g) = -(4/(n-1)) <g e0, e_i>; index i is zero-based.
double poisson_h(const RotationMatrix& g, const Vec& e0, int i);

/// (1/2) sum_k <g A_k^2 e0, e_i>, the group generator applied to <g e0, e_i>.
double apply_generator_linear(const RotationMatrix& g, const Vec& e0, int i, const SkewBasis& basis);

using GroupFunctional = std::function<double(const RotationMatrix&)>;

/// (1/t) int_0^t f(g_s) ds by left rectangles along a path started at the identity.
double ergodic_time_average(const GroupFunctional& f, const GroupSdeConfig& cfg, double t, RandomStream& rng);
/// Several functionals along one shared path.
std::vector<double> ergodic_time_average(std::span<const GroupFunctional> fs, const GroupSdeConfig& cfg, double t,
                                         RandomStream& rng);

struct MomentEstimate {
  Mat mean;
  Mat std_error;
  int samples = 0;
};

/// Monte Carlo estimate of E_Haar[<g e0, e_i><g e0, e_j>] with standard errors.
/// Samples are drawn in fixed-size chunks, each from its own stream, and the
/// per-chunk sums are reduced in chunk order.
MomentEstimate haar_second_moments(int n, const Vec& e0, int samples, std::uint64_t seed,
                                   Execution mode = Execution::parallel);

/// a_ij = (4/(n-1)) E_Haar[<g e0, e_i><g e0, e_j>]. Requires samples >= 1000.
MomentEstimate haar_moment_matrix(int n, const Vec& e0, int samples, std::uint64_t seed,
                                  Execution mode = Execution::parallel);

}  // namespace frameflow
