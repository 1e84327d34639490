#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "satmarl/experiment.hpp"
#include "satmarl/scenarios.hpp"

using namespace satmarl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("satmarl_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("config values and syntax errors") {
  const auto doc = parse_config(
      "a = 1.5\n"
      "b = \"text\"\n"
      "c = true\n"
      "d = [1, 2, 3]\n"
      "# comment\n"
      "[sec]\n"
      "e = -2\n");
  CHECK(doc.at("").at("a").as_number() == 1.5);
  CHECK(doc.at("").at("b").as_string() == "text");
  CHECK(doc.at("").at("c").as_bool());
  CHECK(doc.at("").at("d").as_number_array() == std::vector<double>{1, 2, 3});
  CHECK(doc.at("sec").at("e").as_int() == -2);

  CHECK_THROWS_AS(parse_config("novalue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("x = [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("x = zzz\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("x = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sec\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("x = [1, \"two\"]\n"), ConfigError);
}

TEST_CASE("experiment round trip is semantically identical") {
  for (const auto& name : scenario_names()) {
    const ExperimentConfig exp = make_scenario(name);
    const ExperimentConfig back = parse_experiment(serialize_experiment(exp));
    CHECK(experiments_equal(exp, back));
    // And the re-serialization parses to the same thing again.
    const ExperimentConfig back2 = parse_experiment(serialize_experiment(back));
    CHECK(experiments_equal(back, back2));
  }
}

TEST_CASE("scenario catalog covers the experiment grid") {
  const auto names = scenario_names();
  CHECK(names.size() >= 9);

  const auto hetero = make_scenario("cluster4_hetero_storage");
  REQUIRE(hetero.env.sat_params.size() == 4);
  CHECK(hetero.env.sat_params[0].d_max_gb == 5.0);
  CHECK(hetero.env.sat_params[1].d_max_gb == 10.0);
  CHECK(hetero.env.sat_params[2].d_max_gb == 250.0);
  CHECK(hetero.env.sat_params[3].d_max_gb == 500.0);

  CHECK(make_scenario("single_limited_battery").env.sat_params[0].b_max_wh == 50.0);
  CHECK(make_scenario("single_limited_storage").env.sat_params[0].d_max_gb == 5.0);

  const auto random = make_scenario("single_random");
  CHECK(random.env.randomize.rw_init);
  CHECK(random.env.randomize.battery_init);
  CHECK(random.env.randomize.storage_init);
  CHECK(random.env.randomize.disturbance);

  CHECK(make_scenario("walker4_default").env.constellation.kind ==
        ConstellationKind::walker_delta);
  CHECK_THROWS_AS(make_scenario("no_such_scenario"), ConfigError);

  for (const auto& name : names) {
    const auto exp = make_scenario(name);
    CHECK_NOTHROW(validate_config(exp.env));
  }
}

TEST_CASE("algorithm compatibility is validated") {
  std::string bad =
      "algorithm = \"ppo\"\n"
      "seeds = [1]\n"
      "[env]\n"
      "n_sats = 4\n";
  CHECK_THROWS_AS(parse_experiment(bad), ConfigError);
}

TEST_CASE("cmd_train: error paths and output accounting") {
  TempDir tmp("train");

  SUBCASE("missing config file exits 2") {
    std::ostringstream err;
    CHECK(cmd_train((tmp.path / "nope.ini").string(), err) == kExitConfig);
    CHECK(err.str().find("error") != std::string::npos);
  }

  SUBCASE("invalid algorithm/agent combination exits 2") {
    const fs::path cfg = tmp.path / "bad.ini";
    spit(cfg, "algorithm = \"ppo\"\nseeds = [1]\n[env]\nn_sats = 4\n");
    std::ostringstream err;
    CHECK(cmd_train(cfg.string(), err) == kExitConfig);
  }

  SUBCASE("completed run writes consistent outputs") {
    const fs::path out = tmp.path / "run";
    std::ostringstream cfg_text;
    cfg_text << "name = \"tiny\"\nalgorithm = \"ippo\"\nseeds = [1, 2]\noutput_dir = \""
             << out.string() << "\"\n[env]\nn_sats = 2\nn_targets = 30\nhorizon_orbits = 0.15\n"
             << "master_seed = 5\n[train]\ntotal_env_steps = 42\nhidden = [8, 8]\n";
    const fs::path cfg = tmp.path / "tiny.ini";
    spit(cfg, cfg_text.str());

    std::ostringstream err;
    REQUIRE(cmd_train(cfg.string(), err) == kExitOk);

    // Snapshot is byte-identical to the input config.
    CHECK(slurp(out / "config.ini") == cfg_text.str());

    // Learning curve rows = iterations x seeds (+ header). The horizon is
    // 15 steps (0.15 * 5668s / 60s), so 42 total steps = 3 iterations.
    const std::string curve = slurp(out / "learning_curve.csv");
    CHECK(count_lines(curve) == 1 + 3 * 2);
    CHECK(curve.rfind("env_steps,seed,mean_return,unique_captures,failures,entropy,"
                      "clip_fraction\n", 0) == 0);

    for (int seed : {1, 2}) {
      const std::string jsonl = slurp(out / ("seed_" + std::to_string(seed)) / "metrics.jsonl");
      CHECK(count_lines(jsonl) == 3);
    }

    const std::string manifest = slurp(out / "manifest.json");
    CHECK(manifest.find("\"scenario\": \"tiny\"") != std::string::npos);
    CHECK(manifest.find("\"status\": \"ok\"") != std::string::npos);
    CHECK(manifest.find("learning_curve.csv") != std::string::npos);

    SUBCASE("rerunning the identical config reproduces the CSV byte for byte") {
      const fs::path out2 = tmp.path / "run2";
      std::string text2 = cfg_text.str();
      const std::string needle = out.string();
      text2.replace(text2.find(needle), needle.size(), out2.string());
      const fs::path cfg2 = tmp.path / "tiny2.ini";
      spit(cfg2, text2);
      REQUIRE(cmd_train(cfg2.string(), err) == kExitOk);
      CHECK(slurp(out2 / "learning_curve.csv") == curve);
    }

    SUBCASE("eval writes deterministic tables") {
      std::ostringstream err2;
      REQUIRE(cmd_eval(out.string(), 2, 9, err2) == kExitOk);
      const std::string freq = slurp(out / "eval" / "action_frequency.csv");
      const std::string hist = slurp(out / "eval" / "capture_histogram.csv");
      CHECK(freq.rfind("agent,action,count\n", 0) == 0);
      CHECK(hist.rfind("agent,target_id,count\n", 0) == 0);
      CHECK(count_lines(freq) == 1 + 2 * 6);  // two agents, six actions

      REQUIRE(cmd_eval(out.string(), 2, 9, err2) == kExitOk);
      CHECK(slurp(out / "eval" / "action_frequency.csv") == freq);
      CHECK(slurp(out / "eval" / "capture_histogram.csv") == hist);
    }

    SUBCASE("report merges and recomputes means") {
      const fs::path report = tmp.path / "report";
      std::ostringstream err2;
      REQUIRE(cmd_report({out.string()}, report.string(), err2) == kExitOk);
      const std::string summary = slurp(report / "report_summary.csv");
      CHECK(count_lines(summary) == 1 + 3);  // 3 iterations, 1 algorithm

      // Recompute one mean from the merged curve.
      std::istringstream curves(slurp(report / "report_curves.csv"));
      std::string line;
      std::getline(curves, line);  // header
      std::map<long, std::vector<double>> by_step;
      while (std::getline(curves, line)) {
        const auto p1 = line.find(',', line.find(',', line.find(',') + 1) + 1);
        std::istringstream row(line);
        std::string algo, scen, steps, seed, ret;
        std::getline(row, algo, ',');
        std::getline(row, scen, ',');
        std::getline(row, steps, ',');
        std::getline(row, seed, ',');
        std::getline(row, ret, ',');
        by_step[std::stol(steps)].push_back(std::stod(ret));
        (void)p1;
      }
      std::istringstream sums(summary);
      std::getline(sums, line);  // header
      while (std::getline(sums, line)) {
        std::istringstream row(line);
        std::string algo, scen, steps, mean, sd;
        std::getline(row, algo, ',');
        std::getline(row, scen, ',');
        std::getline(row, steps, ',');
        std::getline(row, mean, ',');
        std::getline(row, sd, ',');
        const auto& vals = by_step.at(std::stol(steps));
        double expect = 0.0;
        for (double v : vals) expect += v;
        expect /= static_cast<double>(vals.size());
        CHECK(std::stod(mean) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("report rejects mixed scenarios") {
  TempDir tmp("report_mix");
  auto write_run = [&](const std::string& name, const fs::path& dir) {
    std::ostringstream cfg;
    cfg << "name = \"" << name << "\"\nalgorithm = \"ippo\"\nseeds = [1]\noutput_dir = \""
        << dir.string() << "\"\n[env]\nn_sats = 2\nn_targets = 20\nhorizon_orbits = 0.1\n"
        << "[train]\ntotal_env_steps = 20\nhidden = [8]\n";
    const fs::path path = tmp.path / (name + ".ini");
    spit(path, cfg.str());
    std::ostringstream err;
    REQUIRE(cmd_train(path.string(), err) == kExitOk);
  };
  write_run("one", tmp.path / "run_one");
  write_run("two", tmp.path / "run_two");

  std::ostringstream err;
  CHECK(cmd_report({(tmp.path / "run_one").string(), (tmp.path / "run_two").string()},
                   (tmp.path / "rep").string(), err) == kExitConfig);
  CHECK(err.str().find("incompatible") != std::string::npos);
  CHECK(cmd_report({}, (tmp.path / "rep").string(), err) == kExitConfig);
}

TEST_CASE("numeric explosion aborts with exit 3 and partial outputs") {
  TempDir tmp("abort");
  const fs::path out = tmp.path / "run";
  std::ostringstream cfg;
  cfg << "name = \"explode\"\nalgorithm = \"ppo\"\nseeds = [1]\noutput_dir = \"" << out.string()
      << "\"\n[env]\nn_sats = 1\nn_targets = 20\nhorizon_orbits = 0.1\n"
      << "[train]\ntotal_env_steps = 50\nhidden = [8]\nlr = 1e300\n";
  const fs::path path = tmp.path / "explode.ini";
  spit(path, cfg.str());

  std::ostringstream err;
  CHECK(cmd_train(path.string(), err) == kExitNumeric);
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(slurp(out / "manifest.json").find("numeric_abort") != std::string::npos);
}

TEST_CASE("output root environment variable relocates runs") {
  CHECK(resolve_output_dir("/abs/path") == "/abs/path");
  ::setenv(kOutputRootEnvVar, "/tmp/satmarl_root_test", 1);
  CHECK(resolve_output_dir("rel/dir") == "/tmp/satmarl_root_test/rel/dir");
  CHECK(resolve_output_dir("/abs/path") == "/abs/path");
  ::unsetenv(kOutputRootEnvVar);
  CHECK(resolve_output_dir("rel/dir") == "rel/dir");
}

TEST_CASE("scenarios command prints the catalog") {
  std::ostringstream out;
  CHECK(cmd_scenarios(out) == kExitOk);
  const std::string text = out.str();
  CHECK(count_lines(text) >= 9);
  CHECK(text.find("cluster4_hetero_storage") != std::string::npos);
  CHECK(text.find("single_limited_battery") != std::string::npos);
}
