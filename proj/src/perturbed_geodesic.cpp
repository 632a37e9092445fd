#include "frameflow/perturbed_geodesic.hpp"

#include <cmath>
#include <string>

#include "frameflow/errors.hpp"

namespace frameflow {

std::vector<double> equispaced_times(double t_final, int count) {
  if (count < 2) throw ConfigError("output grid needs at least two times");
  std::vector<double> times(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) times[static_cast<std::size_t>(k)] = t_final * k / (count - 1);
  return times;
}

SimConfig SimConfig::defaults(std::shared_ptr<const Chart> chart, double epsilon, double t_final, std::uint64_t seed) {
  SimConfig cfg;
  const int n = chart->dim();
  cfg.chart = std::move(chart);
  cfg.epsilon = epsilon;
  cfg.e0 = unit_vector(n, 0);
  cfg.drift = SkewMatrix::zero(n);
  cfg.t_final = t_final;
  cfg.seed = seed;
  cfg.output_times = equispaced_times(t_final, 21);
  return cfg;
}

void SimConfig::validate() const {
  if (!chart) throw ConfigError("no chart selected");
  const int n = chart->dim();
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");
  if (!(h0 > 0.0) || h0 > 0.1) throw ConfigError("h0 must lie in (0, 0.1]");
  if (renorm_every < 1) throw ConfigError("renorm_every must be at least 1");
  if (e0.size() != n) throw ConfigError("e0 must have dimension " + std::to_string(n));
  if (std::abs(e0.norm() - 1.0) > 1e-9) throw ConfigError("e0 must be a unit vector");
  if (drift.dim() != n) throw ConfigError("abar must be an element of so(" + std::to_string(n) + ")");
  if (output_times.empty()) throw ConfigError("output_times must not be empty");
  for (std::size_t k = 0; k < output_times.size(); ++k) {
    const double t = output_times[k];
    if (t < 0.0 || t > t_final * (1.0 + 1e-12)) throw ConfigError("output_times must lie in [0, t_final]");
    if (k > 0 && !(t > output_times[k - 1])) throw ConfigError("output_times must be strictly increasing");
  }
  if (!chart->in_domain(start_point())) throw ConfigError("starting point lies outside the chart domain");
}

TimeGrid make_time_grid(const SimConfig& cfg) {
  TimeGrid grid;
  const double horizon = cfg.t_final / cfg.epsilon;
  const double max_step = cfg.h0 * cfg.epsilon;
  grid.steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(horizon / max_step - 1e-9)));
  grid.step = horizon / static_cast<double>(grid.steps);
  for (double t : cfg.output_times) {
    auto k = static_cast<std::int64_t>(std::llround(t / cfg.epsilon / grid.step));
    k = std::clamp<std::int64_t>(k, 0, grid.steps);
    if (!grid.output_steps.empty() && k <= grid.output_steps.back()) {
      throw ConfigError("output_times are closer than one integrator step");
    }
    grid.output_steps.push_back(k);
    const double snapped = static_cast<double>(k) * grid.step * cfg.epsilon;
    grid.output_times.push_back(std::abs(snapped - t) <= 1e-9 * cfg.t_final ? t : snapped);
  }
  return grid;
}

namespace {

GroupSdeConfig group_config_for(const SimConfig& cfg, const TimeGrid& grid) {
  cfg.validate();
  return GroupSdeConfig(cfg.epsilon, cfg.drift, canonical_basis(cfg.dim()), grid.step);
}

}  // namespace

PerturbedGeodesic::PerturbedGeodesic(const SimConfig& cfg)
    : cfg_(cfg), grid_(make_time_grid(cfg)), group_(group_config_for(cfg, grid_)), e0_(cfg.e0) {}

SimState PerturbedGeodesic::initial_state() const {
  SimState s;
  const int n = cfg_.dim();
  s.t = 0.0;
  s.x = cfg_.start_point();
  s.u = gram_schmidt_metric(*cfg_.chart, s.x, Mat::Identity(n, n));
  s.g = RotationMatrix::identity(n);
  return s;
}

void PerturbedGeodesic::advance(SimState& state, std::span<const double> xi) const {
  const auto count = static_cast<std::size_t>(group_.basis.size());
  if (xi.size() != 2 * count) throw ConfigError("step needs 2 n(n-1)/2 standard normals");
  const double h = grid_.step;
  const Chart& chart = *cfg_.chart;

  state.g = step_group(state.g, group_, xi.first(count), 0.5 * h);

  const Vec w = state.g.matrix().lazyProduct(e0_);
  try {
    const Vec v1 = state.u.lazyProduct(w);
    const Mat du1 = -chart.connection(state.x, v1).lazyProduct(state.u);
    const Vec xp = state.x + h * v1;
    const Mat up = state.u + h * du1;
    const Vec v2 = up.lazyProduct(w);
    const Mat du2 = -chart.connection(xp, v2).lazyProduct(up);
    state.x += (0.5 * h) * (v1 + v2);
    state.u += (0.5 * h) * (du1 + du2);
    if (!chart.in_domain(state.x)) throw DomainError(state.x, "integrator left the chart domain");
  } catch (const DomainError& e) {
    throw DomainExit(state.t + h, e.point(), std::string(e.what()) + " at process time " + std::to_string(state.t + h));
  }

  state.g = step_group(state.g, group_, xi.subspan(count), 0.5 * h);
  state.t += h;
}

void PerturbedGeodesic::renormalize_frame(SimState& state) const {
  state.u = gram_schmidt_metric(*cfg_.chart, state.x, state.u);
}

SimState step(const SimState& state, const SimConfig& cfg, std::span<const double> xi) {
  const PerturbedGeodesic kernel(cfg);
  SimState next = state;
  kernel.advance(next, xi);
  return next;
}

PathRecord simulate_rescaled_path(const SimConfig& cfg, std::uint64_t path_index, const PathOptions& options) {
  const PerturbedGeodesic kernel(cfg);
  const TimeGrid& grid = kernel.grid();
  const Chart& chart = *cfg.chart;
  RandomStream rng(cfg.seed, StreamPurpose::simulation, path_index);
  std::vector<double> xi(static_cast<std::size_t>(kernel.noise_per_step()));

  PathRecord record;
  record.samples.reserve(grid.output_steps.size());
  SimState state = kernel.initial_state();
  GroupProjector projector;
  std::size_t next_output = 0;
  auto emit = [&](std::int64_t k) {
    while (next_output < grid.output_steps.size() && grid.output_steps[next_output] == k) {
      record.samples.push_back({grid.output_times[next_output], state.x, state.u, state.g.matrix()});
      ++next_output;
    }
  };
  emit(0);
  for (std::int64_t k = 1; k <= grid.steps; ++k) {
    const Vec x_prev = state.x;
    rng.fill_normal(xi);
    kernel.advance(state, xi);
    if (options.track_defects) {
      record.diagnostics.max_frame_drift =
          std::max(record.diagnostics.max_frame_drift, frame_defect(chart, {state.x, state.u}));
    }
    if (k % cfg.renorm_every == 0) kernel.renormalize_frame(state);
    Mat g = state.g.matrix();
    projector.maybe_project(g);
    state.g = RotationMatrix::unchecked(std::move(g));

    if (options.track_defects) {
      auto& d = record.diagnostics;
      const Mat metric = chart.metric(state.x);
      const int n = cfg.dim();
      d.max_frame_defect = std::max(d.max_frame_defect, max_abs(state.u.transpose() * metric * state.u - Mat::Identity(n, n)));
      d.max_group_defect = std::max(d.max_group_defect, state.g.defect());
      const Vec velocity = state.u * (state.g.matrix() * cfg.e0);
      d.max_speed_defect = std::max(d.max_speed_defect, std::abs(std::sqrt(velocity.dot(metric * velocity)) - 1.0));
      const Mat metric_prev = chart.metric(x_prev);
      const Vec dx = state.x - x_prev;
      d.max_step_speed = std::max(d.max_step_speed, std::sqrt(dx.dot(metric_prev * dx)) / grid.step);
    }
    emit(k);
  }
  record.diagnostics.steps = grid.steps;
  record.diagnostics.group_projections = projector.projections();
  return record;
}

double holder_modulus(std::span<const PathSample> samples, const Chart& chart, double alpha) {
  if (samples.size() < 2) throw ConfigError("holder_modulus needs at least two samples");
  double worst = 0.0;
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      const double dt = std::abs(samples[b].t - samples[a].t);
      if (dt <= 0.0) continue;
      worst = std::max(worst, chart.distance(samples[a].x, samples[b].x) / std::pow(dt, alpha));
    }
  }
  return worst;
}

}  // namespace frameflow
