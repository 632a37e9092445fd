#include "frameflow/homogenize.hpp"

#include <cmath>
#include <limits>

#include "frameflow/errors.hpp"

namespace frameflow {

OracleKind default_oracle(const Chart& chart) {
  switch (chart.kind()) {
    case Chart::Kind::euclidean:
      return OracleKind::euclidean_bm;
    case Chart::Kind::hyperbolic2:
      return OracleKind::hyperbolic_bm;
    case Chart::Kind::custom:
      break;
  }
  throw ConfigError("no reference process is available for chart " + chart.name());
}

std::string to_string(OracleKind kind) {
  return kind == OracleKind::euclidean_bm ? "euclidean-bm" : "hyperbolic-bm";
}

OracleKind parse_oracle(const std::string& name) {
  if (name == "euclidean-bm") return OracleKind::euclidean_bm;
  if (name == "hyperbolic-bm") return OracleKind::hyperbolic_bm;
  throw ConfigError("unknown oracle '" + name + "' (expected euclidean-bm or hyperbolic-bm)");
}

SampleSet oracle_euclidean_bm(int n, double c, std::span<const double> times, int paths, std::uint64_t seed,
                              const Vec& x0, Execution mode) {
  if (!(c > 0.0)) throw ConfigError("oracle diffusion constant must be positive");
  const Vec start = x0.size() == 0 ? Vec::Zero(n) : x0;
  SampleSet out(times.size(), std::vector<Vec>(static_cast<std::size_t>(paths)));
  for_each_index(mode, paths, [&](std::int64_t p) {
    RandomStream rng(seed, StreamPurpose::euclidean_oracle, static_cast<std::uint64_t>(p));
    Vec x = start;
    double t_prev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double sd = std::sqrt(2.0 * c * (times[k] - t_prev));
      for (int i = 0; i < n; ++i) x(i) += sd * rng.normal();
      t_prev = times[k];
      out[k][static_cast<std::size_t>(p)] = x;
    }
  });
  return out;
}

HyperbolicOracle oracle_hyperbolic_bm(double c, std::span<const double> times, int paths, double step,
                                      std::uint64_t seed, const Vec& x0, Execution mode) {
  if (!(c > 0.0)) throw ConfigError("oracle diffusion constant must be positive");
  if (!(step > 0.0)) throw ConfigError("oracle step must be positive");
  Vec start(2);
  start << 0.0, 1.0;
  if (x0.size() == 2) start = x0;
  if (!(start(1) > 0.0)) throw ConfigError("hyperbolic oracle start must have x2 > 0");
  constexpr double kFloor = 1e-6;
  constexpr double kMinStep = 1e-14;
  const double sigma = std::sqrt(2.0 * c);

  std::vector<std::vector<Vec>> per_path(static_cast<std::size_t>(paths));
  std::vector<char> ok(static_cast<std::size_t>(paths), 1);
  for_each_index(mode, paths, [&](std::int64_t p) {
    RandomStream rng(seed, StreamPurpose::hyperbolic_oracle, static_cast<std::uint64_t>(p));
    auto& rec = per_path[static_cast<std::size_t>(p)];
    rec.reserve(times.size());
    Vec x = start;
    double t = 0.0;
    for (double target : times) {
      while (t < target - 1e-15) {
        double dt = std::min(step, target - t);
        for (;;) {
          const double s = sigma * x(1) * std::sqrt(dt);
          const double z1 = rng.normal(), z2 = rng.normal();
          const double y = x(1) + s * z2;
          if (y >= kFloor) {
            x(0) += s * z1;
            x(1) = y;
            t += dt;
            break;
          }
          dt *= 0.5;
          if (dt < kMinStep) {
            ok[static_cast<std::size_t>(p)] = 0;
            return;
          }
        }
      }
      rec.push_back(x);
    }
  });

  HyperbolicOracle out;
  out.samples.assign(times.size(), {});
  for (std::size_t p = 0; p < per_path.size(); ++p) {
    if (!ok[p]) {
      ++out.aborted;
      continue;
    }
    for (std::size_t k = 0; k < times.size(); ++k) out.samples[k].push_back(per_path[p][k]);
  }
  return out;
}

void EnsembleSpec::validate() const {
  base.validate();
  if (paths < 100) throw ConfigError("paths must be at least 100 for ensemble statistics");
  for (std::size_t k = 1; k < epsilon_list.size(); ++k) {
    if (!(epsilon_list[k] < epsilon_list[k - 1])) throw ConfigError("epsilon_list must be strictly decreasing");
  }
  for (double e : epsilon_list) {
    if (!(e > 0.0)) throw ConfigError("epsilon_list entries must be positive");
  }
  const OracleKind kind = oracle_kind();
  if (kind == OracleKind::hyperbolic_bm && base.chart->kind() != Chart::Kind::hyperbolic2) {
    throw ConfigError("hyperbolic-bm oracle requires the hyperbolic2 chart");
  }
  if (kind == OracleKind::euclidean_bm && base.chart->kind() != Chart::Kind::euclidean) {
    throw ConfigError("euclidean-bm oracle requires a euclidean chart");
  }
}

double ks_observable(OracleKind oracle, const Vec& x0, const Vec& x) {
  return oracle == OracleKind::euclidean_bm ? x(0) - x0(0) : hyperbolic_distance(x0, x);
}

namespace {

struct PathOutcome {
  PathRecord record;
  bool aborted = false;
  AbortRecord abort;
};

double squared_distance(const Chart& chart, const Vec& a, const Vec& b) {
  const double d = chart.distance(a, b);
  return d * d;
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleSpec& spec) {
  spec.validate();
  const SimConfig& cfg = spec.base;
  const Chart& chart = *cfg.chart;
  const int n = cfg.dim();
  const TimeGrid grid = make_time_grid(cfg);

  std::vector<PathOutcome> outcomes(static_cast<std::size_t>(spec.paths));
  for_each_index(spec.execution, spec.paths, [&](std::int64_t p) {
    auto& out = outcomes[static_cast<std::size_t>(p)];
    try {
      out.record = simulate_rescaled_path(cfg, static_cast<std::uint64_t>(p));
    } catch (const DomainExit& e) {
      out.aborted = true;
      out.abort = {static_cast<int>(p), e.time(), e.point(), e.what()};
    }
  });

  EnsembleStats stats;
  stats.oracle = spec.oracle_kind();
  stats.x0 = cfg.start_point();
  stats.times = grid.output_times;
  stats.paths_requested = spec.paths;
  const std::size_t nt = stats.times.size();
  stats.x.assign(nt, {});
  if (spec.keep_frames) stats.frames.assign(nt, {});
  const Mat u0 = gram_schmidt_metric(chart, stats.x0, Mat::Identity(n, n));
  for (const auto& o : outcomes) {
    if (o.aborted) {
      stats.aborts.push_back(o.abort);
      continue;
    }
    ++stats.paths_completed;
    for (std::size_t k = 0; k < nt; ++k) {
      stats.x[k].push_back(o.record.samples[k].x);
      if (spec.keep_frames) stats.frames[k].push_back(o.record.samples[k].u);
    }
    if (chart.kind() == Chart::Kind::euclidean) {
      stats.max_frame_transport = std::max(stats.max_frame_transport, max_abs(o.record.samples.back().u - u0));
    }
  }
  const double abort_fraction = static_cast<double>(stats.aborts.size()) / spec.paths;
  if (abort_fraction > kMaxAbortFraction) {
    const auto& first = stats.aborts.front();
    throw NumericalAbort(std::to_string(stats.aborts.size()) + " of " + std::to_string(spec.paths) +
                         " paths left the chart domain (first: path " + std::to_string(first.path) + ", " +
                         first.reason + ")");
  }

  const double c = limit_diffusion_constant(n);
  if (stats.oracle == OracleKind::euclidean_bm) {
    stats.oracle_x = oracle_euclidean_bm(n, c, stats.times, spec.paths, cfg.seed, stats.x0, spec.execution);
  } else {
    HyperbolicOracle h = oracle_hyperbolic_bm(c, stats.times, spec.paths, spec.oracle_step, cfg.seed, stats.x0,
                                              spec.execution);
    if (static_cast<double>(h.aborted) / spec.paths > kMaxAbortFraction) {
      throw NumericalAbort("hyperbolic oracle aborted " + std::to_string(h.aborted) + " paths");
    }
    stats.oracle_x = std::move(h.samples);
  }

  for (std::size_t k = 0; k < nt; ++k) {
    std::vector<double> sq, obs, oracle_obs, oracle_sq;
    sq.reserve(stats.x[k].size());
    for (const Vec& x : stats.x[k]) {
      sq.push_back(squared_distance(chart, stats.x0, x));
      obs.push_back(ks_observable(stats.oracle, stats.x0, x));
    }
    for (const Vec& x : stats.oracle_x[k]) {
      oracle_sq.push_back(squared_distance(chart, stats.x0, x));
      oracle_obs.push_back(ks_observable(stats.oracle, stats.x0, x));
    }
    const MeanEstimate m = mean_and_stderr(sq);
    stats.msd.push_back(m.mean);
    stats.msd_stderr.push_back(m.std_error);
    if (stats.oracle == OracleKind::euclidean_bm) {
      stats.oracle_msd.push_back(2.0 * n * c * stats.times[k]);
    } else {
      stats.oracle_msd.push_back(mean_and_stderr(oracle_sq).mean);
    }
    stats.ks.push_back(stats.times[k] > 0.0 ? ks_two_sample(obs, oracle_obs) : KsResult{0.0, 1.0});
  }
  return stats;
}

KsResult gaussian_marginal_ks(const EnsembleStats& stats, double c) {
  const std::size_t last = stats.times.size() - 1;
  const double t = stats.times[last];
  if (!(t > 0.0)) throw ConfigError("gaussian_marginal_ks needs a positive final time");
  const double scale = 1.0 / std::sqrt(2.0 * c * t);
  std::vector<double> z;
  z.reserve(stats.x[last].size());
  for (const Vec& x : stats.x[last]) z.push_back((x(0) - stats.x0(0)) * scale);
  return ks_one_sample(z, standard_normal_cdf);
}

std::vector<CriterionResult> evaluate_homogenization(const EnsembleStats& stats, const EnsembleSpec& spec) {
  std::vector<CriterionResult> out;
  const int n = spec.base.dim();
  const double c = limit_diffusion_constant(n);
  const double abort_fraction = static_cast<double>(stats.aborts.size()) / stats.paths_requested;
  out.push_back({"abort_fraction", abort_fraction, kMaxAbortFraction, abort_fraction <= kMaxAbortFraction,
                 "fraction of paths that left the chart"});
  if (stats.oracle == OracleKind::euclidean_bm) {
    const OriginFit fit = fit_through_origin(stats.times, stats.msd);
    const double expected = 2.0 * n * c;
    const double rel = std::abs(fit.slope - expected) / expected;
    out.push_back({"msd_slope_rel_err", rel, kMsdRelativeTolerance, rel < kMsdRelativeTolerance,
                   "slope " + std::to_string(fit.slope) + " vs 8/(n-1) = " + std::to_string(expected)});
    out.push_back({"msd_linearity_r2", fit.r_squared, kLinearityRSquared, fit.r_squared > kLinearityRSquared,
                   "R^2 of MSD(t) = slope * t"});
    const KsResult ks = gaussian_marginal_ks(stats, c);
    out.push_back({"gaussian_marginal_ks_p", ks.p_value, kPValueFloor, ks.p_value > kPValueFloor,
                   "x1_T / sqrt(2cT) vs N(0,1), D = " + std::to_string(ks.statistic)});
    out.push_back({"frame_transport_defect", stats.max_frame_transport, kFrameTransportTolerance,
                   stats.max_frame_transport < kFrameTransportTolerance, "max |u_T - u_0| on a flat chart"});
  } else {
    const KsResult& ks = stats.ks.back();
    out.push_back({"distance_ks_p", ks.p_value, kPValueFloor, ks.p_value > kPValueFloor,
                   "rho(x0, x_T) vs hyperbolic oracle, D = " + std::to_string(ks.statistic)});
  }
  return out;
}

std::vector<SweepRow> epsilon_sweep(const EnsembleSpec& spec) {
  if (spec.epsilon_list.empty()) throw ConfigError("epsilon_sweep needs a non-empty epsilon_list");
  spec.validate();
  std::vector<SweepRow> rows;
  const double c = limit_diffusion_constant(spec.base.dim());
  for (double eps : spec.epsilon_list) {
    EnsembleSpec one = spec;
    one.base.epsilon = eps;
    const EnsembleStats stats = run_ensemble(one);
    SweepRow row;
    row.epsilon = eps;
    row.msd_rel_err = std::abs(stats.msd.back() - stats.oracle_msd.back()) / stats.oracle_msd.back();
    const KsResult ks = stats.oracle == OracleKind::euclidean_bm ? gaussian_marginal_ks(stats, c) : stats.ks.back();
    row.ks_statistic = ks.statistic;
    row.ks_p = ks.p_value;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace frameflow
