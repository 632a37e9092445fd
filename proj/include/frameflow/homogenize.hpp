#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frameflow/parallel.hpp"
#include "frameflow/perturbed_geodesic.hpp"
#include "frameflow/statistics.hpp"

namespace frameflow {

/// Acceptance thresholds for the homogenization checks.
inline constexpr double kMsdRelativeTolerance = 0.10;
inline constexpr double kPValueFloor = 0.01;
inline constexpr double kLinearityRSquared = 0.99;
inline constexpr double kMaxAbortFraction = 0.01;
inline constexpr double kFrameTransportTolerance = 1e-6;

/// c = 4 / (n (n-1)): the limit is a Brownian motion with generator c * Laplacian.
inline double limit_diffusion_constant(int n) { return 4.0 / (n * (n - 1.0)); }

enum class OracleKind { euclidean_bm, hyperbolic_bm };
OracleKind default_oracle(const Chart& chart);
std::string to_string(OracleKind kind);
OracleKind parse_oracle(const std::string& name);

/// samples[time][path]
using SampleSet = std::vector<std::vector<Vec>>;

/// Exact Gaussian increments with per-coordinate variance 2 c dt, started at x0.
SampleSet oracle_euclidean_bm(int n, double c, std::span<const double> times, int paths, std::uint64_t seed,
                              const Vec& x0 = Vec(), Execution mode = Execution::parallel);

struct HyperbolicOracle {
  SampleSet samples;
  int aborted = 0;
};

/// Euler-Maruyama for dx1 = sqrt(2c) x2 dB1, dx2 = sqrt(2c) x2 dB2 (generator
/// c x2^2 (d11 + d22)). A step that would put x2 below 1e-6 is rejected and
/// retried with half the step. Aborted paths are dropped from the samples.
HyperbolicOracle oracle_hyperbolic_bm(double c, std::span<const double> times, int paths, double step,
                                      std::uint64_t seed, const Vec& x0 = Vec(),
                                      Execution mode = Execution::parallel);

struct EnsembleSpec {
  SimConfig base;
  int paths = 2000;
  /// Decreasing; used by epsilon_sweep only.
  std::vector<double> epsilon_list;
  std::optional<OracleKind> oracle;
  double oracle_step = 1e-4;
  bool keep_frames = false;
  Execution execution = Execution::parallel;

  OracleKind oracle_kind() const { return oracle ? *oracle : default_oracle(*base.chart); }
  void validate() const;
};

struct AbortRecord {
  int path = 0;
  double t = 0.0;  // process time
  Vec x;
  std::string reason;
};

struct EnsembleStats {
  OracleKind oracle = OracleKind::euclidean_bm;
  Vec x0;
  std::vector<double> times;
  /// x[time][path] over completed paths, path order preserved.
  SampleSet x;
  /// frames[time][path], filled when keep_frames is set.
  std::vector<std::vector<Mat>> frames;
  std::vector<double> msd;
  std::vector<double> msd_stderr;
  std::vector<double> oracle_msd;
  /// KS of the scalar observable against the oracle at each time.
  std::vector<KsResult> ks;
  SampleSet oracle_x;
  int paths_requested = 0;
  int paths_completed = 0;
  std::vector<AbortRecord> aborts;
  /// max over paths of |u_T - u_0| (zero transport on flat charts).
  double max_frame_transport = 0.0;
};

/// Scalar compared against the oracle: the first-coordinate displacement on
/// flat charts and the hyperbolic distance to x0 on H^2.
double ks_observable(OracleKind oracle, const Vec& x0, const Vec& x);

/// Runs every path, the oracle, and the per-time statistics. Throws
/// NumericalAbort when more than 1% of paths leave the chart.
EnsembleStats run_ensemble(const EnsembleSpec& spec);

/// KS of x^1_t / sqrt(2 c t) - centred at x0 - against N(0, 1) at the last time.
KsResult gaussian_marginal_ks(const EnsembleStats& stats, double c);

struct CriterionResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

std::vector<CriterionResult> evaluate_homogenization(const EnsembleStats& stats, const EnsembleSpec& spec);

struct SweepRow {
  double epsilon = 0.0;
  double msd_rel_err = 0.0;
  double ks_statistic = 0.0;
  double ks_p = 0.0;
};

/// One ensemble per epsilon with the same seed. No rate in epsilon is asserted.
std::vector<SweepRow> epsilon_sweep(const EnsembleSpec& spec);

}  // namespace frameflow
