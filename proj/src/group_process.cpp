#include "frameflow/group_process.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "frameflow/errors.hpp"

namespace frameflow {

GroupSdeConfig::GroupSdeConfig(double epsilon_, SkewMatrix drift_, SkewBasis basis_, double step_, double cfl)
    : epsilon(epsilon_), drift(std::move(drift_)), basis(std::move(basis_)), step(step_), cfl_factor(cfl) {
  validate();
}

GroupSdeConfig GroupSdeConfig::standard(int n, double step, double epsilon) {
  return GroupSdeConfig(epsilon, SkewMatrix::zero(n), canonical_basis(n), step);
}

void GroupSdeConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(step > 0.0)) throw ConfigError("group step must be positive");
  if (drift.dim() != basis.dim()) throw ConfigError("drift and basis dimensions differ");
  if (step / epsilon > cfl_factor * (1.0 + 1e-12)) {
    throw ConfigError("fast-clock step " + std::to_string(step / epsilon) + " exceeds cfl_factor " +
                      std::to_string(cfl_factor));
  }
}

RotationMatrix step_group(const RotationMatrix& g, const GroupSdeConfig& cfg, std::span<const double> xi) {
  return step_group(g, cfg, xi, cfg.step);
}

RotationMatrix step_group(const RotationMatrix& g, const GroupSdeConfig& cfg, std::span<const double> xi, double dt) {
  const int count = cfg.basis.size();
  if (static_cast<int>(xi.size()) != count) throw ConfigError("noise vector length must equal n(n-1)/2");
  const double scale = std::sqrt(dt / cfg.epsilon);
  Mat x = dt * cfg.drift.matrix();
  for (int k = 0; k < count; ++k) x += (scale * xi[static_cast<std::size_t>(k)]) * cfg.basis[k].matrix();
  return RotationMatrix::unchecked(g.matrix().lazyProduct(skew_exp(x)));
}

void GroupProjector::maybe_project(Mat& g) {
  if (++counter_ >= cadence_ || orthogonality_defect(g) > threshold_) {
    g = project_to_rotation(g);
    counter_ = 0;
    ++projections_;
  }
}

double poisson_h(const RotationMatrix& g, const Vec& e0, int i) {
  const int n = g.dim();
  return -(4.0 / (n - 1)) * (g.matrix() * e0)(i);
}

double apply_generator_linear(const RotationMatrix& g, const Vec& e0, int i, const SkewBasis& basis) {
  double sum = 0.0;
  for (const auto& a : basis.elements()) sum += (g.matrix() * (a.matrix() * (a.matrix() * e0)))(i);
  return 0.5 * sum;
}

std::vector<double> ergodic_time_average(std::span<const GroupFunctional> fs, const GroupSdeConfig& cfg, double t,
                                         RandomStream& rng) {
  if (!(t > 0.0)) throw ConfigError("averaging horizon must be positive");
  cfg.validate();
  const auto steps = static_cast<std::int64_t>(std::ceil(t / cfg.step - 1e-9));
  const double dt = t / static_cast<double>(steps);
  std::vector<double> xi(static_cast<std::size_t>(cfg.basis.size()));
  std::vector<double> integral(fs.size(), 0.0);
  RotationMatrix g = RotationMatrix::identity(cfg.dim());
  GroupProjector projector;
  for (std::int64_t s = 0; s < steps; ++s) {
    for (std::size_t k = 0; k < fs.size(); ++k) integral[k] += fs[k](g) * dt;
    rng.fill_normal(xi);
    Mat next = step_group(g, cfg, xi, dt).matrix();
    projector.maybe_project(next);
    g = RotationMatrix::unchecked(std::move(next));
  }
  for (double& v : integral) v /= t;
  return integral;
}

double ergodic_time_average(const GroupFunctional& f, const GroupSdeConfig& cfg, double t, RandomStream& rng) {
  return ergodic_time_average(std::span<const GroupFunctional>(&f, 1), cfg, t, rng).front();
}

namespace {

constexpr int kHaarChunk = 4096;

struct MomentSums {
  Mat sum;
  Mat sum_sq;
};

}  // namespace

MomentEstimate haar_second_moments(int n, const Vec& e0, int samples, std::uint64_t seed, Execution mode) {
  if (samples < 2) throw ConfigError("need at least two samples");
  if (std::abs(e0.norm() - 1.0) > 1e-9 || e0.size() != n) throw ConfigError("e0 must be a unit vector in R^n");
  const int chunks = (samples + kHaarChunk - 1) / kHaarChunk;
  std::vector<MomentSums> partial(static_cast<std::size_t>(chunks));
  for_each_index(mode, chunks, [&](std::int64_t c) {
    RandomStream rng(seed, StreamPurpose::haar, static_cast<std::uint64_t>(c));
    const int begin = static_cast<int>(c) * kHaarChunk;
    const int end = std::min(samples, begin + kHaarChunk);
    MomentSums s{Mat::Zero(n, n), Mat::Zero(n, n)};
    for (int k = begin; k < end; ++k) {
      const Vec v = haar_sample(n, rng).apply(e0);
      const Mat outer = v * v.transpose();
      s.sum += outer;
      s.sum_sq += outer.cwiseProduct(outer);
    }
    partial[static_cast<std::size_t>(c)] = std::move(s);
  });
  Mat sum = Mat::Zero(n, n), sum_sq = Mat::Zero(n, n);
  for (const auto& p : partial) {
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  const double m = samples;
  MomentEstimate out;
  out.samples = samples;
  out.mean = sum / m;
  const Mat var = ((sum_sq / m) - out.mean.cwiseProduct(out.mean)) * (m / (m - 1.0));
  out.std_error = (var.cwiseMax(0.0) / m).cwiseSqrt();
  return out;
}

MomentEstimate haar_moment_matrix(int n, const Vec& e0, int samples, std::uint64_t seed, Execution mode) {
  if (samples < 1000) throw ConfigError("haar_moment_matrix requires at least 1000 samples");
  MomentEstimate m = haar_second_moments(n, e0, samples, seed, mode);
  const double scale = 4.0 / (n - 1);
  m.mean *= scale;
  m.std_error *= scale;
  return m;
}

}  // namespace frameflow
