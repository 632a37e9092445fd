#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "frameflow/config.hpp"
#include "frameflow/errors.hpp"

using namespace frameflow;

namespace {

std::string error_of(const std::string& command, const KeyMap& keys) {
  try {
    build_run_config(command, keys);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal simulate flags fill the documented defaults") {
  const RunConfig rc = build_run_config(
      "simulate", {{"manifold", "euclidean:2"}, {"epsilon", "0.05"}, {"t_final", "1"}, {"seed", "7"}});
  CHECK(rc.dim == 2);
  CHECK(rc.h0 == 0.1);
  CHECK(rc.seed == 7);
  CHECK(rc.e0 == unit_vector(2, 0));
  CHECK(rc.drift.matrix().isZero(0.0));
  REQUIRE(rc.output_times.size() == 21);
  CHECK(rc.output_times[10] == doctest::Approx(0.5));
  CHECK(rc.paths == 1);
  const SimConfig cfg = rc.sim_config();
  CHECK(cfg.epsilon == 0.05);
  CHECK(cfg.t_final == 1.0);
}

TEST_CASE("constraint violations name the key and the reason") {
  const KeyMap base{{"manifold", "euclidean:2"}, {"epsilon", "0.05"}, {"t_final", "1"}};
  auto with = [&](const std::string& k, const std::string& v) {
    KeyMap m = base;
    m[k] = v;
    return m;
  };
  CHECK(error_of("simulate", with("epsilon", "0")).find("epsilon must be positive") != std::string::npos);
  CHECK(error_of("simulate", with("h0", "0.5")).rfind("h0:", 0) == 0);
  CHECK(error_of("simulate", with("e0", "1,1")).rfind("e0:", 0) == 0);
  CHECK(error_of("simulate", with("abar", "1,2")).rfind("abar:", 0) == 0);
  CHECK(error_of("simulate", with("output_times", "0,2")) != "");
  CHECK(error_of("simulate", with("manifold", "sphere")) != "");
  CHECK(error_of("simulate", with("seed", "-3")).rfind("seed:", 0) == 0);
  CHECK(error_of("simulate", {{"manifold", "euclidean:2"}, {"t_final", "1"}}).find("epsilon: required") !=
        std::string::npos);
  CHECK(error_of("simulate", with("colour", "red")).find("colour: unknown key") != std::string::npos);
  CHECK(error_of("homogenize", {{"paths", "50"}}).find("paths") != std::string::npos);
  CHECK(error_of("sweep", {{"epsilon_list", "0.1,0.2"}}).rfind("epsilon_list:", 0) == 0);
  CHECK(error_of("homogenize", {{"oracle", "hyperbolic-bm"}}) != "");
}

TEST_CASE("value formats") {
  const RunConfig rc = build_run_config("simulate", {{"manifold", "euclidean:3"},
                                                     {"epsilon", "0.1"},
                                                     {"t_final", "2"},
                                                     {"e0", "e3"},
                                                     {"abar", "0.5,0,-0.5"},
                                                     {"output_times", "0,0.5,2"}});
  CHECK(rc.e0 == unit_vector(3, 2));
  const Mat a = rc.drift.matrix();
  CHECK(a(0, 1) == doctest::Approx(0.5 / std::sqrt(2.0)));
  CHECK(a(1, 2) == doctest::Approx(-0.5 / std::sqrt(2.0)));
  CHECK(rc.output_times == std::vector<double>{0.0, 0.5, 2.0});

  const RunConfig h = build_run_config("simulate", {{"manifold", "hyperbolic2"},
                                                    {"epsilon", "0.1"},
                                                    {"t_final", "1"},
                                                    {"e0", "0.6,0.8"},
                                                    {"output_times", "5"}});
  CHECK(h.e0(1) == 0.8);
  CHECK(h.output_times.size() == 5);
}

TEST_CASE("command defaults") {
  const RunConfig h = build_run_config("homogenize", {});
  CHECK(h.manifold == "euclidean:2");
  CHECK(h.epsilon == 0.01);
  CHECK(h.paths == 2000);
  CHECK(h.t_final == 1.0);
  const RunConfig s = build_run_config("sweep", {});
  CHECK(s.epsilon_list == std::vector<double>{0.2, 0.1, 0.05, 0.02});
  const RunConfig v = build_run_config("verify-algebra", {});
  CHECK(v.dim == 3);
  CHECK_FALSE(v.dim_given);
  CHECK(build_run_config("haar", {{"dim", "5"}}).dim == 5);
  CHECK_THROWS_AS(build_run_config("haar", {{"dim", "9"}}), ConfigError);
}

TEST_CASE("seed priority: key, then environment, then zero") {
  const KeyMap keys{{"manifold", "euclidean:2"}, {"epsilon", "0.1"}, {"t_final", "1"}};
  CHECK(build_run_config("simulate", keys).seed == 0);
  CHECK(build_run_config("simulate", keys, "42").seed == 42);
  KeyMap with_seed = keys;
  with_seed["seed"] = "5";
  CHECK(build_run_config("simulate", with_seed, "42").seed == 5);
  CHECK_THROWS_AS(build_run_config("simulate", keys, "x"), ConfigError);
}

TEST_CASE("config text parsing") {
  const KeyMap m = parse_config_text("# comment\nmanifold = hyperbolic2\n\n  epsilon=0.1   # trailing\n");
  CHECK(m.size() == 2);
  CHECK(m.at("manifold") == "hyperbolic2");
  CHECK(m.at("epsilon") == "0.1");
  CHECK_THROWS_WITH_AS(parse_config_text("epsilon = 1\nepsilon = 2\n"), doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("speed = 1\n"), doctest::Contains("speed: unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("epsilon\n"), doctest::Contains("line 1"), ConfigError);
}

TEST_CASE("flags override the file") {
  const auto path = std::filesystem::temp_directory_path() / "frameflow_test_config.txt";
  {
    std::ofstream f(path);
    f << "manifold = euclidean:2\nepsilon = 0.1\nt_final = 1\n";
  }
  const KeyMap merged = merge_keys(read_config_file(path.string()), {{"epsilon", "0.05"}});
  CHECK(build_run_config("simulate", merged).epsilon == 0.05);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_config_file(path.string()), ConfigError);
}
