#include <doctest.h>

#include <cmath>

#include "frameflow/errors.hpp"
#include "frameflow/homogenize.hpp"

using namespace frameflow;

namespace {

EnsembleSpec flat_spec(int n, double eps, int paths, std::uint64_t seed) {
  EnsembleSpec spec;
  spec.base = SimConfig::defaults(resolve_chart("euclidean:" + std::to_string(n)), eps, 1.0, seed);
  spec.paths = paths;
  return spec;
}

std::vector<double> distances(const SampleSet& s, std::size_t k, const Vec& x0) {
  std::vector<double> out;
  for (const Vec& x : s[k]) out.push_back(hyperbolic_distance(x0, x));
  return out;
}

Vec point(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("limit diffusion constant") {
  CHECK(limit_diffusion_constant(2) == 2.0);
  CHECK(limit_diffusion_constant(3) == doctest::Approx(2.0 / 3.0));
  // MSD slope 2 n c = 8 / (n - 1).
  for (int n = 2; n <= 8; ++n) CHECK(2.0 * n * limit_diffusion_constant(n) == doctest::Approx(8.0 / (n - 1)));
}

TEST_CASE("Euclidean oracle moments") {
  const std::vector<double> times{0.0, 0.5, 1.0};
  const int paths = 20000;
  for (int n : {2, 3}) {
    const double c = limit_diffusion_constant(n);
    const SampleSet s = oracle_euclidean_bm(n, c, times, paths, 4, Vec());
    for (std::size_t k = 0; k < times.size(); ++k) {
      std::vector<double> sq, cross;
      for (const Vec& x : s[k]) {
        sq.push_back(x.squaredNorm());
        cross.push_back(x(0) * x(1));
      }
      if (times[k] == 0.0) {
        CHECK(mean_and_stderr(sq).mean == 0.0);
        continue;
      }
      const MeanEstimate m = mean_and_stderr(sq);
      CHECK(std::abs(m.mean - 2.0 * n * c * times[k]) < 4.0 * m.std_error);
      const MeanEstimate x = mean_and_stderr(cross);
      CHECK(std::abs(x.mean) < 4.0 * x.std_error);
    }
  }
  const SampleSet s = oracle_euclidean_bm(2, 2.0, std::vector<double>{1.0}, paths, 5, Vec());
  std::vector<double> sq;
  for (const Vec& x : s[0]) sq.push_back(x.squaredNorm());
  CHECK(mean_and_stderr(sq).mean == doctest::Approx(8.0).epsilon(0.05));
  CHECK_THROWS_AS(oracle_euclidean_bm(2, 0.0, std::vector<double>{1.0}, 10, 1, Vec()), ConfigError);
}

TEST_CASE("hyperbolic oracle") {
  const Vec x0 = point(0.0, 1.0);
  SUBCASE("vanishing diffusion stays put") {
    const HyperbolicOracle h = oracle_hyperbolic_bm(1e-30, std::vector<double>{0.5}, 50, 1e-3, 1, x0);
    for (const Vec& x : h.samples[0]) CHECK(hyperbolic_distance(x0, x) < 1e-12);
  }
  SUBCASE("short-time mean squared distance is locally Euclidean") {
    const HyperbolicOracle h = oracle_hyperbolic_bm(2.0, std::vector<double>{0.01}, 4000, 1e-4, 2, x0);
    CHECK(h.aborted == 0);
    std::vector<double> sq;
    for (double d : distances(h.samples, 0, x0)) sq.push_back(d * d);
    CHECK(std::abs(mean_and_stderr(sq).mean - 4.0 * 2.0 * 0.01) < 0.1 * 0.08);
  }
  SUBCASE("distance law is invariant under isometries") {
    const std::vector<double> times{0.5};
    const HyperbolicOracle a = oracle_hyperbolic_bm(2.0, times, 1000, 1e-4, 3, x0);
    const Vec y0 = point(5.0, 3.0);
    const HyperbolicOracle b = oracle_hyperbolic_bm(2.0, times, 1000, 1e-4, 4, y0);
    CHECK(ks_two_sample(distances(a.samples, 0, x0), distances(b.samples, 0, y0)).p_value > 0.01);
  }
  CHECK_THROWS_AS(oracle_hyperbolic_bm(2.0, std::vector<double>{1.0}, 10, 1e-3, 1, point(0.0, -1.0)), ConfigError);
}

TEST_CASE("ensemble spec validation") {
  EnsembleSpec spec = flat_spec(2, 0.1, 100, 1);
  CHECK_NOTHROW(spec.validate());
  spec.paths = 99;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.paths = 100;
  spec.epsilon_list = {0.1, 0.2};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.epsilon_list = {0.2, 0.1};
  spec.oracle = OracleKind::hyperbolic_bm;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  CHECK(parse_oracle("euclidean-bm") == OracleKind::euclidean_bm);
  CHECK(to_string(OracleKind::hyperbolic_bm) == "hyperbolic-bm");
  CHECK_THROWS_AS(parse_oracle("bm"), ConfigError);
}

TEST_CASE("serial and parallel ensembles agree exactly") {
  for (const char* chart : {"euclidean:3", "hyperbolic2"}) {
    EnsembleSpec spec;
    spec.base = SimConfig::defaults(resolve_chart(chart), 0.1, 0.5, 8);
    spec.paths = 100;
    spec.execution = Execution::serial;
    const EnsembleStats a = run_ensemble(spec);
    spec.execution = Execution::parallel;
    const EnsembleStats b = run_ensemble(spec);
    REQUIRE(a.paths_completed == b.paths_completed);
    for (std::size_t k = 0; k < a.times.size(); ++k) {
      CHECK(a.msd[k] == b.msd[k]);
      CHECK(a.ks[k].statistic == b.ks[k].statistic);
      for (std::size_t p = 0; p < a.x[k].size(); ++p) CHECK(max_abs(Mat(a.x[k][p] - b.x[k][p])) == 0.0);
    }
  }
}

TEST_CASE("flat ensemble statistics") {
  EnsembleSpec spec = flat_spec(2, 0.05, 2000, 12);
  spec.keep_frames = true;
  const EnsembleStats stats = run_ensemble(spec);
  CHECK(stats.paths_completed == 2000);
  CHECK(stats.aborts.empty());
  REQUIRE(stats.times.size() == 21);
  for (std::size_t k = 0; k < stats.times.size(); ++k) {
    CHECK(stats.msd[k] >= 0.0);
    CHECK(stats.x[k].size() == 2000);
    CHECK(stats.frames[k].size() == 2000);
    CHECK(stats.oracle_msd[k] == doctest::Approx(8.0 * stats.times[k]));
  }
  CHECK(stats.max_frame_transport < 1e-6);

  // g starts at the identity, so the first correlation time adds a mean displacement
  // eps * int_0^inf exp(-(n-1) s / 4) ds = 4 eps / (n-1) along e0. At eps = 0.05 this
  // shift (0.1 sd) is visible to the Gaussian KS, so that criterion is left to eps = 0.01.
  std::vector<double> x1;
  for (const Vec& x : stats.x.back()) x1.push_back(x(0));
  const MeanEstimate drift = mean_and_stderr(x1);
  CHECK(std::abs(drift.mean - 4.0 * 0.05) < 4.0 * drift.std_error);

  const auto criteria = evaluate_homogenization(stats, spec);
  REQUIRE(criteria.size() == 5);
  for (const auto& c : criteria) {
    INFO(c.name << " = " << c.value << " (" << c.detail << ")");
    if (c.name != "gaussian_marginal_ks_p") CHECK(c.passed);
  }

  // A wrong constant must fail decisively.
  EnsembleStats halved = stats;
  for (auto& m : halved.msd) m *= 0.5;
  for (auto& xs : halved.x)
    for (auto& x : xs) x *= std::sqrt(0.5);
  for (const auto& c : evaluate_homogenization(halved, spec)) {
    if (c.name == "msd_slope_rel_err" || c.name == "gaussian_marginal_ks_p") CHECK_FALSE(c.passed);
  }
}

TEST_CASE("hyperbolic ensemble against the oracle") {
  EnsembleSpec spec;
  spec.base = SimConfig::defaults(resolve_chart("hyperbolic2"), 0.05, 0.5, 14);
  spec.base.output_times = {0.0, 0.25, 0.5};
  spec.paths = 1000;
  const EnsembleStats stats = run_ensemble(spec);
  CHECK(stats.aborts.empty());
  CHECK(stats.oracle == OracleKind::hyperbolic_bm);
  const auto criteria = evaluate_homogenization(stats, spec);
  REQUIRE(criteria.size() == 2);
  CHECK(criteria[1].name == "distance_ks_p");
  CHECK(criteria[1].passed);
  CHECK(stats.msd.back() == doctest::Approx(stats.oracle_msd.back()).epsilon(0.15));
}

TEST_CASE("custom charts have no reference process") {
  EnsembleSpec spec = flat_spec(2, 0.1, 100, 3);
  const auto box = std::make_shared<const Chart>(Chart::custom(
      "box", 2, [](const Vec&) { return Mat(Mat::Identity(2, 2)); }, [](const Vec& x) { return x.norm() < 0.2; },
      Vec::Zero(2), [](const Vec&) { return Christoffel(2); }));
  spec.base.chart = box;
  spec.oracle = OracleKind::euclidean_bm;
  CHECK_THROWS_AS(run_ensemble(spec), ConfigError);
  spec.oracle.reset();
  CHECK_THROWS_AS(run_ensemble(spec), ConfigError);
}

TEST_CASE("epsilon sweep is reproducible") {
  EnsembleSpec spec = flat_spec(2, 0.2, 200, 6);
  spec.epsilon_list = {0.2, 0.1};
  const auto a = epsilon_sweep(spec);
  const auto b = epsilon_sweep(spec);
  REQUIRE(a.size() == 2);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].epsilon == spec.epsilon_list[k]);
    CHECK(a[k].msd_rel_err == b[k].msd_rel_err);
    CHECK(a[k].ks_p == b[k].ks_p);
  }
  spec.epsilon_list.clear();
  CHECK_THROWS_AS(epsilon_sweep(spec), ConfigError);
}
