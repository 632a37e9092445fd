#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "frameflow/group_process.hpp"
#include "frameflow/manifold.hpp"

namespace frameflow {

/// One realisation of the two-scale system: x' = u g e0 with u parallel
/// along x, and g the fast SO(n) diffusion. Observed on the rescaled clock.
struct SimConfig {
  std::shared_ptr<const Chart> chart;
  double epsilon = 0.05;
  Vec e0;
  SkewMatrix drift = SkewMatrix::zero(2);
  /// Horizon of the rescaled process t -> x_{t/eps}.
  double t_final = 1.0;
  /// Fast-clock step; the process-time step is h0 * epsilon.
  double h0 = 0.1;
  int renorm_every = 1;
  std::uint64_t seed = 0;
  /// Increasing grid in [0, t_final] on the rescaled clock.
  std::vector<double> output_times;
  /// Starting point; the chart origin when empty.
  std::optional<Vec> x0;

  /// Defaults: e0 = e_1, Abar = 0, 21 equispaced output times.
  static SimConfig defaults(std::shared_ptr<const Chart> chart, double epsilon, double t_final, std::uint64_t seed);
  int dim() const { return chart->dim(); }
  Vec start_point() const { return x0 ? *x0 : chart->origin(); }
  void validate() const;
};

std::vector<double> equispaced_times(double t_final, int count);

/// Process-time discretisation. `steps` uniform steps of `step` cover
/// [0, t_final / epsilon]; the step never exceeds h0 * epsilon. Output times
/// are snapped to the nearest grid index.
struct TimeGrid {
  std::int64_t steps = 0;
  double step = 0.0;
  std::vector<std::int64_t> output_steps;
  std::vector<double> output_times;
};
TimeGrid make_time_grid(const SimConfig& cfg);

/// (t, x, u, g): t is process time, u the horizontal lift of x through u0.
struct SimState {
  double t = 0.0;
  Vec x;
  Mat u;
  RotationMatrix g = RotationMatrix::identity(2);
};

/// Precomputed stepping kernel for a fixed configuration.
class PerturbedGeodesic {
 public:
  explicit PerturbedGeodesic(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  const TimeGrid& grid() const { return grid_; }
  const GroupSdeConfig& group_config() const { return group_; }
  double step_size() const { return grid_.step; }
  /// Standard normals consumed per step: N for each group half-step.
  int noise_per_step() const { return 2 * group_.basis.size(); }

  /// x0, Gram-Schmidt of the identity frame at x0, g = I.
  SimState initial_state() const;

  /// Strang step: group half-step with xi[0, N), Heun step of (x, u) with g
  /// frozen, group half-step with xi[N, 2N). Throws DomainExit.
  void advance(SimState& state, std::span<const double> xi) const;

  /// Metric Gram-Schmidt on u.
  void renormalize_frame(SimState& state) const;

 private:
  SimConfig cfg_;
  TimeGrid grid_;
  GroupSdeConfig group_;
  Vec e0_;
};

/// Single step as a value transformation; xi has length 2N.
SimState step(const SimState& state, const SimConfig& cfg, std::span<const double> xi);

struct PathSample {
  double t = 0.0;  // rescaled clock
  Vec x;
  Mat u;
  Mat g;
};

struct PathDiagnostics {
  std::int64_t steps = 0;
  int group_projections = 0;
  double max_frame_defect = 0.0;
  /// Frame defect straight out of the integrator, before re-orthonormalization.
  double max_frame_drift = 0.0;
  double max_group_defect = 0.0;
  double max_speed_defect = 0.0;
  /// max over steps of |x_{k+1} - x_k|_{G(x_k)} / h
  double max_step_speed = 0.0;
};

struct PathRecord {
  std::vector<PathSample> samples;
  PathDiagnostics diagnostics;
};

struct PathOptions {
  /// Evaluate constraint defects after every step (costs a metric evaluation).
  bool track_defects = false;
};

/// Integrates path `path_index` of the configuration and records the state at
/// the output grid. The stream for the path is (seed, simulation, path_index).
PathRecord simulate_rescaled_path(const SimConfig& cfg, std::uint64_t path_index = 0, const PathOptions& options = {});

/// sup_{s != t} d(x_s, x_t) / |t - s|^alpha with the chart's model distance.
double holder_modulus(std::span<const PathSample> samples, const Chart& chart, double alpha);

}  // namespace frameflow
