// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "frameflow/errors.hpp"
#include "frameflow/group_process.hpp"
#include "frameflow/homogenize.hpp"

using namespace frameflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Report {
  int failures = 0;

  void detail(const std::string& text) const { std::printf("    %s\n", text.c_str()); }

  void criterion(int id, const std::string& name, bool passed, double elapsed) {
    if (!passed) ++failures;
    std::printf("[%s] criterion %d: %s (%.1f s)\n", passed ? "PASS" : "FAIL", id, name.c_str(), elapsed);
    std::fflush(stdout);
  }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

EnsembleSpec flat_spec(int n, std::uint64_t seed) {
  EnsembleSpec spec;
  spec.base = SimConfig::defaults(resolve_chart("euclidean:" + std::to_string(n)), 0.01, 1.0, seed);
  spec.paths = 2000;
  return spec;
}

std::vector<double> first_coordinate(const EnsembleStats& s) {
  std::vector<double> out;
  for (const Vec& x : s.x.back()) out.push_back(x(0) - s.x0(0));
  return out;
}

// Criterion 1: basis Gram matrix and Casimir element, checked from the matrices.
bool algebra_identities(const Report& r) {
  bool ok = true;
  for (int n = 2; n <= kMaxDim; ++n) {
    const SkewBasis basis = canonical_basis(n);
    double gram = 0.0;
    Mat casimir = Mat::Zero(n, n);
    for (int a = 0; a < basis.size(); ++a) {
      casimir += basis[a].matrix() * basis[a].matrix();
      for (int b = 0; b < basis.size(); ++b) {
        const double ip = (basis[a].matrix() * basis[b].matrix().transpose()).trace();
        gram = std::max(gram, std::abs(ip - (a == b ? 1.0 : 0.0)));
      }
    }
    const double cas = max_abs(Mat(casimir + 0.5 * (n - 1) * Mat::Identity(n, n)));
    const bool pass = gram < 1e-12 && cas < 1e-12 && casimir_defect(basis) < 1e-12 && gram_defect(basis) < 1e-12;
    ok = ok && pass;
    r.detail(fmt("n=%.0f gram defect %.2e casimir defect %.2e", n, gram, cas));
  }
  return ok;
}

// Criterion 2: L_G <g e0, e_i> = -((n-1)/4) <g e0, e_i> and L_G h_i = <g e0, e_i>.
bool eigenfunction_identities(const Report& r) {
  bool ok = true;
  for (int n = 2; n <= kMaxDim; ++n) {
    const SkewBasis basis = canonical_basis(n);
    RandomStream rng(2, StreamPurpose::testing, static_cast<std::uint64_t>(n));
    double eig = 0.0, poisson = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const RotationMatrix g = haar_sample(n, rng);
      Vec e0 = Vec::Zero(n);
      for (int i = 0; i < n; ++i) e0(i) = rng.normal();
      e0.normalize();
      const int i = s % n;
      const double f = (g.matrix() * e0)(i);
      // Generator of the left-invariant diffusion applied to a linear function:
      // (1/2) sum_k <g A_k A_k e0, e_i>.
      double lf = 0.0;
      for (int k = 0; k < basis.size(); ++k) lf += 0.5 * (g.matrix() * basis[k].matrix() * basis[k].matrix() * e0)(i);
      eig = std::max({eig, std::abs(lf + 0.25 * (n - 1) * f),
                      std::abs(apply_generator_linear(g, e0, i, basis) + 0.25 * (n - 1) * f)});
      // h_i is linear in the matrix entries, so L_G h_i = (1/2) sum_k h_i(g A_k A_k).
      double lh = 0.0;
      for (int k = 0; k < basis.size(); ++k)
        lh += 0.5 * poisson_h(RotationMatrix::unchecked(g.matrix() * basis[k].matrix() * basis[k].matrix()), e0, i);
      poisson = std::max(poisson, std::abs(lh - f));
    }
    ok = ok && eig < 1e-12 && poisson < 1e-12;
    r.detail(fmt("n=%.0f eigenfunction defect %.2e poisson defect %.2e", n, eig, poisson));
  }
  return ok;
}

// Criterion 3: Haar second moments and a_ii.
bool haar_moments(const Report& r) {
  bool ok = true;
  for (int n : {2, 3, 4}) {
    const Vec e0 = unit_vector(n, 0);
    const MomentEstimate m = haar_second_moments(n, e0, 100000, 3);
    const MomentEstimate a = haar_moment_matrix(n, e0, 100000, 3);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double target = i == j ? 1.0 / n : 0.0;
        worst = std::max(worst, std::abs(m.mean(i, j) - target) / m.std_error(i, j));
      }
      worst = std::max(worst, std::abs(a.mean(i, i) - 4.0 / (n * (n - 1.0))) / a.std_error(i, i));
    }
    ok = ok && worst < 4.0;
    r.detail(fmt("n=%.0f worst |estimate - target| = %.2f standard errors (a_11 = %.4f)", n, worst, a.mean(0, 0)));
  }
  return ok;
}

// Criterion 4: E[(time average of <g e0, e_i>)^2] <= sqrt(N) Osc t^-1/2, Osc = 2.
bool ergodic_bound(const Report& r) {
  bool ok = true;
  for (int n : {2, 3}) {
    const GroupSdeConfig cfg = GroupSdeConfig::standard(n, 0.1);
    const Vec e0 = unit_vector(n, 0);
    std::vector<GroupFunctional> fs;
    for (int i = 0; i < n; ++i) fs.emplace_back([e0, i](const RotationMatrix& g) { return (g.matrix() * e0)(i); });
    for (double t : {100.0, 400.0, 1600.0}) {
      std::vector<double> mean_sq(static_cast<std::size_t>(n), 0.0);
      std::vector<std::vector<double>> per_rep(200);
      for_each_index(Execution::parallel, 200, [&](std::int64_t rep) {
        RandomStream rng(4, StreamPurpose::ergodic, static_cast<std::uint64_t>(rep));
        per_rep[static_cast<std::size_t>(rep)] = ergodic_time_average(fs, cfg, t, rng);
      });
      for (const auto& v : per_rep)
        for (int i = 0; i < n; ++i) mean_sq[static_cast<std::size_t>(i)] += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)] / 200.0;
      const double bound = std::sqrt(static_cast<double>(algebra_dim(n))) * 2.0 / std::sqrt(t);
      double worst = 0.0;
      for (double v : mean_sq) worst = std::max(worst, v);
      ok = ok && worst <= bound;
      r.detail(fmt("n=%.0f t=%.0f max_i E[avg^2] = %.3e", n, t, worst) + fmt(", bound %.3e", bound));
    }
  }
  return ok;
}

bool check_criteria(const Report& r, const std::string& label, const EnsembleStats& stats, const EnsembleSpec& spec) {
  bool ok = true;
  for (const auto& c : evaluate_homogenization(stats, spec)) {
    ok = ok && c.passed;
    r.detail(label + " " + c.name + " = " + fmt("%.4g", c.value) + fmt(" (threshold %.4g) ", c.threshold) +
             (c.passed ? "ok" : "FAILED") + ": " + c.detail);
  }
  return ok;
}

}  // namespace

int main() {
  Report report;
  auto run = [&](int id, const std::string& name, const std::function<bool()>& body) {
    const auto t0 = Clock::now();
    bool passed = false;
    try {
      passed = body();
    } catch (const std::exception& e) {
      report.detail(std::string("exception: ") + e.what());
    }
    report.criterion(id, name, passed, seconds_since(t0));
  };

  run(1, "so(n) basis orthonormal and Casimir = -((n-1)/2) I for n = 2..8", [&] {
    const auto t0 = Clock::now();
    const bool ok = algebra_identities(report);
    return ok && seconds_since(t0) < 1.0;
  });
  run(2, "eigenfunction and Poisson identities at 1000 random g", [&] {
    const auto t0 = Clock::now();
    const bool ok = eigenfunction_identities(report);
    return ok && seconds_since(t0) < 1.0;
  });
  run(3, "Haar second moments and a_ii = 4/(n(n-1)) within 4 standard errors", [&] {
    const auto t0 = Clock::now();
    const bool ok = haar_moments(report);
    return ok && seconds_since(t0) < 10.0;
  });
  run(4, "ergodic rate bound at t = 100, 400, 1600", [&] { return ergodic_bound(report); });

  // Flat ensembles are shared with the invariance criterion.
  EnsembleSpec flat2 = flat_spec(2, 501), flat3 = flat_spec(3, 502);
  EnsembleStats stats2, stats3;
  run(5, "flat MSD slope 8/(n-1), linearity and Gaussian marginal for n = 2, 3", [&] {
    stats2 = run_ensemble(flat2);
    const bool ok2 = check_criteria(report, "n=2", stats2, flat2);
    stats3 = run_ensemble(flat3);
    const bool ok3 = check_criteria(report, "n=3", stats3, flat3);
    return ok2 && ok3;
  });

  int hyperbolic_exits = -1;
  run(6, "H^2 distance law matches hyperbolic Brownian motion with c = 2", [&] {
    EnsembleSpec spec;
    spec.base = SimConfig::defaults(resolve_chart("hyperbolic2"), 0.01, 0.5, 601);
    spec.base.output_times = {0.0, 0.25, 0.5};
    spec.paths = 2000;
    const EnsembleStats stats = run_ensemble(spec);
    hyperbolic_exits = static_cast<int>(stats.aborts.size());
    report.detail(fmt("MSD(T) %.4f oracle %.4f", stats.msd.back(), stats.oracle_msd.back()));
    return check_criteria(report, "H2", stats, spec);
  });

  run(7, "limit law independent of e0 and of the drift", [&] {
    if (stats2.x.empty() || stats3.x.empty()) {
      report.detail("flat baselines missing");
      return false;
    }
    EnsembleSpec e2 = flat_spec(2, 701);
    e2.base.e0 = unit_vector(2, 1);
    const KsResult ks_e0 = ks_two_sample(first_coordinate(stats2), first_coordinate(run_ensemble(e2)));
    report.detail(fmt("e0 = e1 vs e0 = e2 (n=2): D = %.4f p = %.4f", ks_e0.statistic, ks_e0.p_value));

    EnsembleSpec drift = flat_spec(3, 702);
    drift.base.drift = SkewMatrix(canonical_basis(3).combine(AlgebraVec::Constant(3, 1.0 / std::sqrt(3.0))));
    const KsResult ks_drift = ks_two_sample(first_coordinate(stats3), first_coordinate(run_ensemble(drift)));
    report.detail(fmt("Abar = 0 vs |Abar| = 1 (n=3): D = %.4f p = %.4f", ks_drift.statistic, ks_drift.p_value));
    return ks_e0.p_value > kPValueFloor && ks_drift.p_value > kPValueFloor;
  });

  run(8, "constraint defects over 10^6 steps, determinism, no H^2 exits", [&] {
    bool ok = true;
    struct Long {
      const char* chart;
      double t_final;
    };
    for (const Long& l : {Long{"hyperbolic2", 10.0}, Long{"euclidean:3", 10.0}}) {
      const SimConfig cfg = SimConfig::defaults(resolve_chart(l.chart), 0.01, l.t_final, 801);
      const PathDiagnostics d = simulate_rescaled_path(cfg, 0, {.track_defects = true}).diagnostics;
      const double worst = std::max({d.max_frame_defect, d.max_frame_drift, d.max_group_defect, d.max_speed_defect});
      ok = ok && d.steps >= 1000000 && worst < 1e-8;
      report.detail(std::string(l.chart) + fmt(": %.0f steps, frame %.2e (before projection %.2e)", d.steps,
                                               d.max_frame_defect, d.max_frame_drift) +
                    fmt(", group %.2e, speed %.2e", d.max_group_defect, d.max_speed_defect));
    }

    EnsembleSpec small;
    small.base = SimConfig::defaults(resolve_chart("hyperbolic2"), 0.05, 1.0, 802);
    small.paths = 1000;
    const EnsembleStats a = run_ensemble(small);
    small.execution = Execution::serial;
    const EnsembleStats b = run_ensemble(small);
    bool same = a.paths_completed == b.paths_completed;
    for (std::size_t k = 0; same && k < a.x.size(); ++k)
      for (std::size_t p = 0; same && p < a.x[k].size(); ++p) same = a.x[k][p] == b.x[k][p];
    double min_height = INFINITY;
    for (const auto& xs : a.x)
      for (const Vec& x : xs) min_height = std::min(min_height, x(1));
    report.detail(fmt("repeat run identical: %.0f; 1000 H^2 paths at eps = 0.05: %.0f exits, min x2 %.3e", same,
                      static_cast<double>(a.aborts.size()), min_height));
    report.detail(fmt("H^2 exits in the eps = 0.01 ensemble: %.0f", hyperbolic_exits));
    return ok && same && a.aborts.empty() && hyperbolic_exits == 0;
  });

  std::printf("%d criterion(s) failed\n", report.failures);
  return report.failures == 0 ? 0 : 1;
}
