#include "saddle/runner.hpp"

#include "doctest.h"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace saddle;
namespace fs = std::filesystem;

namespace {

KeyValues keys(std::initializer_list<std::pair<std::string, std::string>> pairs) {
  KeyValues kv;
  for (const auto& [k, v] : pairs) kv.set(k, v);
  return kv;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config files parse with comments and whitespace") {
  fs::path p = fs::temp_directory_path() / "saddle_cfg_parse.cfg";
  {
    std::ofstream out(p);
    out << "# experiment\n"
        << "problem = synthetic-default\n"
        << "\n"
        << "algorithm=momentum   # trailing comment\n"
        << "T = 25\n";
  }
  KeyValues kv = parse_config_file(p.string());
  CHECK(kv.kv.at("problem") == "synthetic-default");
  CHECK(kv.kv.at("algorithm") == "momentum");
  CHECK(kv.kv.at("T") == "25");
  fs::remove(p);

  CHECK_THROWS_AS(parse_config_file("/tmp/saddle_missing_config.cfg"), IoError);

  fs::path bad = fs::temp_directory_path() / "saddle_cfg_bad.cfg";
  {
    std::ofstream out(bad);
    out << "just a bare line\n";
  }
  CHECK_THROWS_AS(parse_config_file(bad.string()), ConfigError);
  fs::remove(bad);
}

TEST_CASE("command-line assignments override file keys") {
  KeyValues kv = keys({{"T", "10"}, {"algorithm", "momentum"}});
  apply_assignments(kv, {"T=99", "seeds=4,5"});
  CHECK(kv.kv.at("T") == "99");
  CHECK(kv.kv.at("seeds") == "4,5");
  CHECK_THROWS_AS(apply_assignments(kv, {"no-equals-sign"}), ConfigError);
}

TEST_CASE("minimal momentum experiment resolves to certified defaults") {
  auto setup = build_experiment(
      keys({{"problem", "synthetic-default"}, {"algorithm", "momentum"}, {"T", "50"}}));
  CHECK(setup.spec.algorithm == AlgorithmKind::momentum);
  CHECK(setup.spec.T == 50);
  REQUIRE(setup.seeds.size() == 1);
  CHECK(setup.seeds[0] == 1);
  CHECK(setup.metric_every == 1);

  const auto& c = setup.problem->constants();
  const auto& p = setup.spec.params;
  CHECK(p.alpha == 3.0);
  CHECK(p.beta == 3.0);
  CHECK(p.eta == doctest::Approx(c.mu / (4.0 * c.lipschitz_L * c.lipschitz_L)).epsilon(1e-15));
  CHECK(p.gamma == doctest::Approx(p.eta * c.mu * c.mu /
                                   (9.0 * c.lipschitz_L * c.lipschitz_L))
                       .epsilon(1e-15));
  CHECK(setup.spec.schedule.kind == ScheduleKind::decaying_sqrt);
  CHECK(setup.spec.schedule.a == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK(setup.validator.name == "thm1");
  CHECK(setup.validator.pass);

  // Default start: projected half-ones primal, projected zero dual.
  CHECK(setup.theta0.size() == c.dim_primal);
  CHECK(setup.omega0.size() == c.dim_dual);
}

TEST_CASE("variance-reduced defaults switch schedule family and validator") {
  auto setup = build_experiment(
      keys({{"problem", "synthetic-default"}, {"algorithm", "vr_momentum"}, {"T", "50"}}));
  CHECK(setup.spec.algorithm == AlgorithmKind::vr_momentum);
  CHECK(setup.spec.params.alpha == 6.0);
  CHECK(setup.spec.schedule.kind == ScheduleKind::decaying_cbrt);
  CHECK(setup.spec.schedule.a == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(setup.spec.schedule.b >= 256.0);
  CHECK(setup.validator.name == "thm3");
  CHECK(setup.validator.pass);
}

TEST_CASE("fixed schedules bind the horizon and the fixed-step validators") {
  auto setup = build_experiment(keys({{"problem", "synthetic-default"},
                                      {"algorithm", "momentum"},
                                      {"schedule.kind", "fixed_sqrt"},
                                      {"T", "1000"}}));
  REQUIRE(setup.spec.schedule.horizon_T.has_value());
  CHECK(*setup.spec.schedule.horizon_T == 1000);
  CHECK(setup.validator.name == "thm2");
  CHECK(setup.validator.pass);

  auto vr = build_experiment(keys({{"problem", "synthetic-default"},
                                   {"algorithm", "vr_momentum"},
                                   {"schedule.kind", "fixed_cbrt"},
                                   {"T", "1000"}}));
  CHECK(vr.validator.name == "thm4");
}

TEST_CASE("config errors: unknown keys, horizons, parameter conflicts") {
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"algorithm", "momentum"},
                                         {"T", "10"},
                                         {"bogus_key", "1"}})),
                  ConfigError);
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"algorithm", "momentum"}})),
                  ConfigError);  // T missing
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"algorithm", "momentum"},
                                         {"T", "0"}})),
                  ConfigError);
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"algorithm", "nonsense"},
                                         {"T", "10"}})),
                  ConfigError);
  // Explicit parameters conflict with the default auto derivation.
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"algorithm", "momentum"},
                                         {"T", "10"},
                                         {"params.gamma", "0.01"}})),
                  ConfigError);
  // auto=false requires the full parameter set.
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"algorithm", "momentum"},
                                         {"T", "10"},
                                         {"params.auto", "false"},
                                         {"params.gamma", "0.01"}})),
                  ConfigError);
  // Baseline takes neither momentum parameters nor schedules.
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"algorithm", "two_timescale"},
                                         {"T", "10"},
                                         {"schedule.a", "0.1"}})),
                  ConfigError);
  // Two-timescale exponents must satisfy p1 > p2.
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"algorithm", "two_timescale"},
                                         {"T", "10"},
                                         {"ts.p1", "0.3"},
                                         {"ts.p2", "0.5"}})),
                  ConfigError);
}

TEST_CASE("explicit parameters are honored when auto is off") {
  auto setup = build_experiment(keys({{"problem", "synthetic-default"},
                                      {"algorithm", "momentum"},
                                      {"T", "10"},
                                      {"params.auto", "false"},
                                      {"params.gamma", "0.01"},
                                      {"params.eta", "0.05"},
                                      {"params.alpha", "2"},
                                      {"params.beta", "2.5"}}));
  CHECK(setup.spec.params.gamma == 0.01);
  CHECK(setup.spec.params.eta == 0.05);
  CHECK(setup.spec.params.alpha == 2.0);
  CHECK(setup.spec.params.beta == 2.5);
  // Hand-picked parameters need not satisfy any certificate; the
  // validator still reports.
  CHECK(setup.validator.name == "thm1");
}

TEST_CASE("metric cadence: automatic thinning above ten thousand steps") {
  auto fine = build_experiment(
      keys({{"problem", "synthetic-default"}, {"algorithm", "momentum"}, {"T", "10000"}}));
  CHECK(fine.metric_every == 1);
  auto coarse = build_experiment(
      keys({{"problem", "synthetic-default"}, {"algorithm", "momentum"}, {"T", "25000"}}));
  CHECK(coarse.metric_every == 3);
  auto manual = build_experiment(keys({{"problem", "synthetic-default"},
                                       {"algorithm", "momentum"},
                                       {"T", "25000"},
                                       {"metric_every", "7"}}));
  CHECK(manual.metric_every == 7);
}

TEST_CASE("stationary start solves both blocks") {
  auto setup = build_experiment(keys({{"problem", "synthetic-default"},
                                      {"algorithm", "momentum"},
                                      {"T", "10"},
                                      {"init", "stationary"}}));
  auto theta_star = setup.problem->primal_minimizer();
  REQUIRE(theta_star.has_value());
  CHECK((setup.theta0 - *theta_star).norm() == 0.0);
  GradPair g = setup.problem->pop_grad(setup.theta0, setup.omega0);
  CHECK(g.omega.norm() <= 1e-8);

  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-unconstrained"},
                                         {"algorithm", "momentum"},
                                         {"T", "10"},
                                         {"init", "stationary"}})),
                  ConfigError);
}

TEST_CASE("explicit start vectors are parsed and dimension-checked") {
  auto setup = build_experiment(keys({{"problem", "synthetic-default"},
                                      {"algorithm", "momentum"},
                                      {"T", "10"},
                                      {"init.theta", "0.1, -0.2, 0.3, 0.05"},
                                      {"init.omega", "0.0,0.1,0.2"}}));
  CHECK(setup.theta0[1] == -0.2);
  CHECK(setup.omega0[2] == 0.2);
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"algorithm", "momentum"},
                                         {"T", "10"},
                                         {"init.theta", "0.1 0.2"}})),
                  ConfigError);
}

TEST_CASE("runs are reproducible and correctly sized") {
  auto kv = keys({{"problem", "synthetic-default"},
                  {"algorithm", "momentum"},
                  {"T", "10"},
                  {"seeds", "1,2"}});
  ExperimentResult a = run_experiment(build_experiment(kv));
  ExperimentResult b = run_experiment(build_experiment(kv));
  REQUIRE(a.traces.size() == 2);
  CHECK(a.T == 10);
  CHECK(a.samples_used == 11);  // T + 1 oracle draws for the momentum method
  for (std::size_t s = 0; s < a.traces.size(); ++s) {
    REQUIRE(a.traces[s].records.size() == 10);  // every step recorded
    for (std::size_t i = 0; i < 10; ++i) {
      const auto& ra = a.traces[s].records[i];
      const auto& rb = b.traces[s].records[i];
      CHECK(ra.t == static_cast<long>(i));
      CHECK(ra.M == rb.M);
      CHECK(ra.running_avg == rb.running_avg);
      CHECK(std::isfinite(ra.M));
      // Q is available: the instance certifies its primal minimum.
      CHECK(ra.lyapunov.has_value());
    }
  }
  CHECK(a.final_avg_mean == b.final_avg_mean);
  CHECK(a.final_avg_std == b.final_avg_std);
  // Different seeds genuinely differ.
  CHECK(a.traces[0].records[5].M != a.traces[1].records[5].M);
  // Ten points in the averaged tail is too few only below two; the
  // second-half slope over t >= 5 exists here.
  CHECK(std::isfinite(a.slope_second_half));
}

TEST_CASE("csv artifacts have the documented shape and reproduce bitwise") {
  TempDir dir_a("saddle_runner_art_a");
  TempDir dir_b("saddle_runner_art_b");
  auto kv = keys({{"problem", "synthetic-default"},
                  {"algorithm", "momentum"},
                  {"T", "10"},
                  {"seeds", "3"}});
  auto setup = build_experiment(kv);
  setup.out_dir = dir_a.path.string();
  run_experiment(setup);

  fs::path csv = dir_a.path / "metrics_seed3.csv";
  REQUIRE(fs::exists(csv));
  std::string text = slurp(csv);
  std::istringstream lines(text);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 11);  // header + ceil(T / stride)
  CHECK(rows[0] == "t,nu_t,term_drift,term_grad_err,term_dual_gap,M_t,Mbar_t,running_avg_M,Q_or_S");
  CHECK(rows[1].rfind("0,", 0) == 0);

  auto setup2 = build_experiment(kv);
  setup2.out_dir = dir_b.path.string();
  run_experiment(setup2);
  CHECK(slurp(dir_b.path / "metrics_seed3.csv") == text);

  fs::path summary = dir_a.path / "summary.json";
  REQUIRE(fs::exists(summary));
  nlohmann::json j = nlohmann::json::parse(slurp(summary));
  CHECK(j.at("problem") == "synthetic-default");
  CHECK(j.at("algorithm") == "momentum");
  CHECK(j.at("T") == 10);
  CHECK(j.at("samples_used") == 11);
  CHECK(j.at("seeds").size() == 1);
  CHECK(j.at("validator").at("name") == "thm1");
  CHECK(j.at("validator").at("pass") == true);
  CHECK(j.at("csv_files").size() == 1);
  CHECK(j.at("final_running_avg_mean").is_number());
}

TEST_CASE("baseline runs leave the potential column empty") {
  TempDir dir("saddle_runner_baseline");
  auto setup = build_experiment(keys({{"problem", "synthetic-default"},
                                      {"algorithm", "two_timescale"},
                                      {"T", "5"},
                                      {"seeds", "1"}}));
  setup.out_dir = dir.path.string();
  ExperimentResult res = run_experiment(setup);
  for (const auto& rec : res.traces[0].records) CHECK_FALSE(rec.lyapunov.has_value());
  std::string text = slurp(dir.path / "metrics_seed1.csv");
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    REQUIRE_FALSE(line.empty());
    CHECK(line.back() == ',');  // trailing empty Q_or_S field
  }
}

TEST_CASE("comparison reports rank artifacts on one problem") {
  TempDir dir_m("saddle_cmp_momentum");
  TempDir dir_v("saddle_cmp_vr");
  auto run_into = [&](const std::string& alg, const fs::path& dir) {
    auto setup = build_experiment(keys({{"problem", "synthetic-default"},
                                        {"algorithm", alg},
                                        {"T", "10"},
                                        {"seeds", "1,2,3"}}));
    setup.out_dir = dir.string();
    run_experiment(setup);
  };
  run_into("momentum", dir_m.path);
  run_into("vr_momentum", dir_v.path);

  std::vector<std::string> paths = {(dir_m.path / "summary.json").string(),
                                    (dir_v.path / "summary.json").string()};

  // A threshold every run clears immediately: first recorded average is
  // already below it, so the count is the two samples of step zero.
  CompareReport hit = compare_report(paths, 1e9);
  REQUIRE(hit.rows.size() == 2);
  CHECK(hit.problem == "synthetic-default");
  CHECK(hit.T == 10);
  for (const auto& row : hit.rows) {
    REQUIRE(row.samples_to_eps.size() == 3);
    for (double s : row.samples_to_eps) CHECK(s == 2.0);
    CHECK(row.median_samples_to_eps == 2.0);
  }

  // A threshold nobody reaches renders as such.
  CompareReport miss = compare_report(paths, 1e-14);
  for (const auto& row : miss.rows) CHECK(std::isinf(row.median_samples_to_eps));
  CHECK(miss.render_text().find("not reached(10)") != std::string::npos);
  // JSON rendering stays parseable with nulls for unreached thresholds.
  nlohmann::json jm = nlohmann::json::parse(miss.render_json());
  CHECK(jm.at("rows")[0].at("median_samples_to_eps").is_null());

  CHECK_THROWS_AS(compare_report({paths[0]}, 0.1), ConfigError);
  CHECK_THROWS_AS(compare_report(paths, 0.0), ConfigError);

  // Artifacts from different problems are refused.
  TempDir dir_td("saddle_cmp_other");
  auto other = build_experiment(keys({{"problem", "synthetic-noiseless"},
                                      {"algorithm", "momentum"},
                                      {"T", "10"},
                                      {"seeds", "1"}}));
  other.out_dir = dir_td.path.string();
  run_experiment(other);
  CHECK_THROWS_AS(
      compare_report({paths[0], (dir_td.path / "summary.json").string()}, 0.1),
      ConfigError);
}

TEST_CASE("identical artifacts compare as identical") {
  TempDir dir_a("saddle_cmp_same_a");
  TempDir dir_b("saddle_cmp_same_b");
  auto kv = keys({{"problem", "synthetic-default"},
                  {"algorithm", "momentum"},
                  {"T", "10"},
                  {"seeds", "1,2"}});
  for (const fs::path* d : {&dir_a.path, &dir_b.path}) {
    auto setup = build_experiment(kv);
    setup.out_dir = d->string();
    run_experiment(setup);
  }
  CompareReport rep = compare_report(
      {(dir_a.path / "summary.json").string(), (dir_b.path / "summary.json").string()}, 0.5);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].final_avg_mean == rep.rows[1].final_avg_mean);
  CHECK(rep.rows[0].median_samples_to_eps == rep.rows[1].median_samples_to_eps);
}

TEST_CASE("problem overrides feed the factory and reject nonsense") {
  auto setup = build_experiment(keys({{"problem", "synthetic-default"},
                                      {"problem.noise_sigma", "0"},
                                      {"algorithm", "momentum"},
                                      {"T", "10"}}));
  CHECK(setup.problem->constants().sigma2 == 0.0);

  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-unconstrained"},
                                         {"problem.primal_radius", "2"},
                                         {"algorithm", "momentum"},
                                         {"T", "10"}})),
                  ConfigError);
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "no-such-preset"},
                                         {"algorithm", "momentum"},
                                         {"T", "10"}})),
                  ConfigError);
  CHECK_THROWS_AS(build_experiment(keys({{"problem", "synthetic-default"},
                                         {"problem.family", "tanh"},
                                         {"algorithm", "momentum"},
                                         {"T", "10"}})),
                  ConfigError);
}
