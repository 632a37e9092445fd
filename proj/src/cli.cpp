#include "frameflow/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>

#include "frameflow/csv.hpp"
#include "frameflow/errors.hpp"

namespace frameflow {

namespace {

using nlohmann::json;

std::filesystem::path prepare_output_dir(const RunConfig& rc) {
  std::filesystem::path dir(rc.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  return file;
}

json config_json(const RunConfig& rc) {
  json j;
  j["manifold"] = rc.manifold;
  j["dim"] = rc.dim;
  j["epsilon"] = rc.epsilon;
  j["epsilon_list"] = rc.epsilon_list;
  j["e0"] = std::vector<double>(rc.e0.data(), rc.e0.data() + rc.e0.size());
  j["abar"] = std::vector<double>(rc.abar.data(), rc.abar.data() + rc.abar.size());
  j["t_final"] = rc.t_final;
  j["h0"] = rc.h0;
  j["renorm_every"] = rc.renorm_every;
  j["seed"] = rc.seed;
  j["paths"] = rc.paths;
  j["output_times"] = rc.output_times;
  j["oracle"] = rc.oracle ? to_string(*rc.oracle) : "auto";
  return j;
}

int write_summary(const RunConfig& rc, const std::vector<CriterionResult>& criteria, std::ostream& out,
                  json extra = json::object()) {
  bool all = true;
  json list = json::array();
  for (const auto& c : criteria) {
    all = all && c.passed;
    list.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed},
                    {"detail", c.detail}});
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << format_double(c.value) << " (threshold "
        << format_double(c.threshold) << ") " << c.detail << '\n';
  }
  json summary = {{"command", rc.command}, {"config", config_json(rc)}, {"criteria", list}, {"passed", all}};
  for (auto& [k, v] : extra.items()) summary[k] = v;
  auto file = open_output(prepare_output_dir(rc) / "summary.json");
  file << summary.dump(2) << '\n';
  return all ? kExitSuccess : kExitCriterionFailed;
}

int cmd_verify_algebra(const RunConfig& rc, std::ostream& out) {
  bool ok = true;
  const int lo = rc.dim_given ? rc.dim : 2;
  const int hi = rc.dim_given ? rc.dim : kMaxDim;
  for (int n = lo; n <= hi; ++n) {
    const SkewBasis basis = canonical_basis(n);
    const double casimir = casimir_defect(basis);
    const double gram = gram_defect(basis);
    // Eigenfunction identity L_G <g e1, e_i> = -((n-1)/4) <g e1, e_i> at Haar-random g.
    const Vec e0 = unit_vector(n, 0);
    RandomStream rng(rc.seed, StreamPurpose::haar, static_cast<std::uint64_t>(n));
    double eigen = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const RotationMatrix g = haar_sample(n, rng);
      for (int i = 0; i < n; ++i) {
        const double alpha = (g.matrix() * e0)(i);
        eigen = std::max(eigen, std::abs(apply_generator_linear(g, e0, i, basis) + 0.25 * (n - 1) * alpha));
      }
    }
    const bool pass = casimir < kAlgebraTolerance && gram < kAlgebraTolerance && eigen < kAlgebraTolerance;
    ok = ok && pass;
    out << "n=" << n << " casimir_defect=" << format_double(casimir) << " gram_defect=" << format_double(gram)
        << " eigenfunction_defect=" << format_double(eigen) << (pass ? " PASS" : " FAIL") << '\n';
  }
  return ok ? kExitSuccess : kExitCriterionFailed;
}

int cmd_haar(const RunConfig& rc, std::ostream& out) {
  if (rc.samples < 1000) throw ConfigError("samples: must be at least 1000");
  const int n = rc.dim;
  const MomentEstimate a = haar_moment_matrix(n, rc.e0, rc.samples, rc.seed);
  const double expected = limit_diffusion_constant(n);
  auto file = open_output(prepare_output_dir(rc) / "haar.csv");
  CsvWriter csv(file);
  csv.header({"i", "j", "estimate", "stderr"});
  bool ok = true;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      csv.cell(static_cast<long long>(i + 1)).cell(static_cast<long long>(j + 1)).cell(a.mean(i, j)).cell(a.std_error(i, j));
      csv.end_row();
      const double target = i == j ? expected : 0.0;
      if (std::abs(a.mean(i, j) - target) > 4.0 * a.std_error(i, j)) ok = false;
    }
  }
  out << "a_ii target 4/(n(n-1)) = " << format_double(expected) << "; estimates within 4 stderr: "
      << (ok ? "yes" : "no") << '\n';
  return ok ? kExitSuccess : kExitCriterionFailed;
}

int cmd_ergodic(const RunConfig& rc, std::ostream& out) {
  const int n = rc.dim;
  const GroupSdeConfig cfg(1.0, rc.drift, canonical_basis(n), rc.h0);
  std::vector<GroupFunctional> fs;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      fs.emplace_back([e0 = rc.e0, i, j](const RotationMatrix& g) {
        const Vec v = g.matrix() * e0;
        return v(i) * v(j);
      });
    }
  }
  for (int i = 0; i < n; ++i) {
    fs.emplace_back([e0 = rc.e0, i](const RotationMatrix& g) { return (g.matrix() * e0)(i); });
  }
  const int reps = rc.paths;
  std::vector<std::vector<double>> results(static_cast<std::size_t>(reps));
  for_each_index(Execution::parallel, reps, [&](std::int64_t r) {
    RandomStream rng(rc.seed, StreamPurpose::ergodic, static_cast<std::uint64_t>(r));
    results[static_cast<std::size_t>(r)] = ergodic_time_average(fs, cfg, rc.t_final, rng);
  });

  auto file = open_output(prepare_output_dir(rc) / "ergodic.csv");
  CsvWriter csv(file);
  csv.header({"i", "j", "estimate", "stderr"});
  bool ok = true;
  std::vector<double> column(static_cast<std::size_t>(reps));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t f = static_cast<std::size_t>(i * n + j);
      for (int r = 0; r < reps; ++r) column[static_cast<std::size_t>(r)] = results[static_cast<std::size_t>(r)][f];
      const MeanEstimate m = mean_and_stderr(column);
      csv.cell(static_cast<long long>(i + 1)).cell(static_cast<long long>(j + 1)).cell(m.mean).cell(m.std_error);
      csv.end_row();
      const double target = i == j ? 1.0 / n : 0.0;
      if (std::abs(m.mean - target) > 4.0 * m.std_error) ok = false;
    }
  }
  const double bound = std::sqrt(static_cast<double>(algebra_dim(n))) * 2.0 / std::sqrt(rc.t_final);
  for (int i = 0; i < n; ++i) {
    const std::size_t f = static_cast<std::size_t>(n * n + i);
    double mean_sq = 0.0;
    for (const auto& r : results) mean_sq += r[f] * r[f];
    mean_sq /= reps;
    const bool pass = mean_sq <= bound;
    ok = ok && pass;
    out << "E[(time average of <g e0, e_" << i + 1 << ">)^2] = " << format_double(mean_sq) << " bound sqrt(N) Osc t^-1/2 = "
        << format_double(bound) << (pass ? " PASS" : " FAIL") << '\n';
  }
  return ok ? kExitSuccess : kExitCriterionFailed;
}

void write_path_csv(std::ostream& os, const PathRecord& record, int n, bool frames) {
  CsvWriter csv(os);
  std::vector<std::string> cols{"t"};
  for (int i = 1; i <= n; ++i) cols.push_back("x" + std::to_string(i));
  if (frames) {
    for (const char* prefix : {"u", "g"}) {
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) cols.push_back(prefix + std::to_string(i) + std::to_string(j));
    }
  }
  csv.header(cols);
  for (const auto& s : record.samples) {
    csv.cell(s.t);
    for (int i = 0; i < n; ++i) csv.cell(s.x(i));
    if (frames) {
      for (const Mat* m : {&s.u, &s.g}) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) csv.cell((*m)(i, j));
      }
    }
    csv.end_row();
  }
}

int cmd_simulate(const RunConfig& rc, std::ostream& out) {
  const SimConfig cfg = rc.sim_config();
  const auto dir = prepare_output_dir(rc);
  for (int p = 0; p < rc.paths; ++p) {
    const PathRecord record = simulate_rescaled_path(cfg, static_cast<std::uint64_t>(p));
    auto file = open_output(dir / ("path_" + std::to_string(p) + ".csv"));
    write_path_csv(file, record, cfg.dim(), rc.write_frames);
  }
  out << "wrote " << rc.paths << " path file(s) to " << dir.string() << '\n';
  return kExitSuccess;
}

int cmd_homogenize(const RunConfig& rc, std::ostream& out) {
  const EnsembleSpec spec = rc.ensemble_spec();
  const EnsembleStats stats = run_ensemble(spec);
  const auto dir = prepare_output_dir(rc);
  {
    auto file = open_output(dir / "msd.csv");
    CsvWriter csv(file);
    csv.header({"t", "msd", "stderr", "oracle_msd"});
    for (std::size_t k = 0; k < stats.times.size(); ++k) {
      csv.cell(stats.times[k]).cell(stats.msd[k]).cell(stats.msd_stderr[k]).cell(stats.oracle_msd[k]);
      csv.end_row();
    }
  }
  {
    auto file = open_output(dir / "ks.csv");
    CsvWriter csv(file);
    csv.header({"t", "statistic", "p"});
    for (std::size_t k = 0; k < stats.times.size(); ++k) {
      if (!(stats.times[k] > 0.0)) continue;
      csv.cell(stats.times[k]).cell(stats.ks[k].statistic).cell(stats.ks[k].p_value);
      csv.end_row();
    }
  }
  json extra = {{"paths_completed", stats.paths_completed}, {"paths_aborted", stats.aborts.size()},
                {"oracle", to_string(stats.oracle)}};
  return write_summary(rc, evaluate_homogenization(stats, spec), out, extra);
}

int cmd_sweep(const RunConfig& rc, std::ostream& out) {
  const EnsembleSpec spec = rc.ensemble_spec();
  const std::vector<SweepRow> rows = epsilon_sweep(spec);
  const auto dir = prepare_output_dir(rc);
  {
    auto file = open_output(dir / "sweep.csv");
    CsvWriter csv(file);
    csv.header({"epsilon", "msd_rel_err", "ks_stat", "ks_p"});
    for (const auto& r : rows) {
      csv.cell(r.epsilon).cell(r.msd_rel_err).cell(r.ks_statistic).cell(r.ks_p);
      csv.end_row();
    }
  }
  const SweepRow& last = rows.back();
  std::vector<CriterionResult> criteria{
      {"final_msd_rel_err", last.msd_rel_err, kMsdRelativeTolerance, last.msd_rel_err < kMsdRelativeTolerance,
       "smallest epsilon " + format_double(last.epsilon)},
      {"final_ks_p", last.ks_p, kPValueFloor, last.ks_p > kPValueFloor, "smallest epsilon " + format_double(last.epsilon)},
  };
  bool monotone = true;
  for (std::size_t k = 1; k < rows.size(); ++k) monotone = monotone && rows[k].msd_rel_err <= rows[k - 1].msd_rel_err;
  out << "msd error monotone in epsilon: " << (monotone ? "yes" : "no") << " (reported only)\n";
  return write_summary(rc, criteria, out, {{"msd_error_monotone", monotone}});
}

struct FlagValues {
  std::map<std::string, std::string> keys;
  std::string config_file;
  int jobs = 0;
  int verbosity = 0;
  bool frames = false;
  int samples = 100000;
};

void add_common_flags(CLI::App* sub, FlagValues& v) {
  for (const std::string& key : config_keys()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    sub->add_option_function<std::string>(
        flag, [&v, key](const std::string& value) { v.keys[key] = value; }, "config key '" + key + "'");
  }
  sub->add_option("--config", v.config_file, "key = value config file; flags override its keys");
  sub->add_option("--jobs", v.jobs, "worker threads (default: machine parallelism)");
  sub->add_flag("-v,--verbose", v.verbosity, "increase verbosity");
}

}  // namespace

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    set_thread_count(config.jobs);
    if (config.command == "verify-algebra") return cmd_verify_algebra(config, out);
    if (config.command == "haar") return cmd_haar(config, out);
    if (config.command == "ergodic") return cmd_ergodic(config, out);
    if (config.command == "simulate") return cmd_simulate(config, out);
    if (config.command == "homogenize") return cmd_homogenize(config, out);
    if (config.command == "sweep") return cmd_sweep(config, out);
    err << "unknown command '" << config.command << "'\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DomainExit& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kExitNumericalAbort;
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kExitNumericalAbort;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomly perturbed geodesics: simulation and homogenization checks", "frameflow"};
  app.require_subcommand(1);
  FlagValues v;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"verify-algebra", "check so(n) basis, Casimir and eigenfunction identities"},
      {"haar", "Monte Carlo estimate of a_ij = (4/(n-1)) E[<g e0,e_i><g e0,e_j>] under Haar measure"},
      {"ergodic", "time averages along the SO(n) diffusion and the ergodic rate bound"},
      {"simulate", "integrate perturbed geodesic paths and write per-path CSV"},
      {"homogenize", "ensemble MSD and KS checks against the Brownian limit"},
      {"sweep", "repeat the ensemble over a decreasing epsilon list"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common_flags(sub, v);
    if (name == "simulate") sub->add_flag("--frames", v.frames, "include frame and group columns");
    if (name == "haar") sub->add_option("--samples", v.samples, "number of Haar draws");
  }

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitConfigError;
  }

  std::string command;
  for (const auto* sub : app.get_subcommands()) command = sub->get_name();
  try {
    KeyMap keys;
    if (!v.config_file.empty()) keys = read_config_file(v.config_file);
    keys = merge_keys(std::move(keys), v.keys);
    std::optional<std::string> env_seed;
    if (const char* s = std::getenv("FRAMEFLOW_SEED")) env_seed = std::string(s);
    RunConfig rc = build_run_config(command, keys, env_seed);
    rc.jobs = v.jobs;
    rc.verbosity = v.verbosity;
    rc.write_frames = v.frames;
    rc.samples = v.samples;
    return dispatch(rc, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace frameflow
