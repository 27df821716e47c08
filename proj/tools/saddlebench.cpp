// saddlebench: run minimax experiments, audit problem oracles, and
// compare run artifacts.
//
// Exit codes: 0 success, 2 configuration/contract error, 3 numeric
// abort, 4 I/O error.

#include "saddle/runner.hpp"
#include "saddle/validate.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

saddle::KeyValues gather_keys(const std::string& config_path,
                              const std::vector<std::string>& sets) {
  saddle::KeyValues kv;
  if (!config_path.empty()) kv = saddle::parse_config_file(config_path);
  saddle::apply_assignments(kv, sets);
  return kv;
}

void print_validator(const saddle::ValidatorReport& report) {
  std::printf("validator %s: %s\n", report.name.c_str(), report.pass ? "pass" : "FAIL");
  for (const auto& chk : report.checks)
    std::printf("  %-42s lhs=%-12.6g rhs=%-12.6g %s\n", chk.name.c_str(), chk.lhs, chk.rhs,
                chk.pass ? "ok" : "VIOLATED");
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets) {
  saddle::KeyValues kv = gather_keys(config_path, sets);
  saddle::ExperimentSetup setup = saddle::build_experiment(kv);
  saddle::ExperimentResult result = saddle::run_experiment(setup);

  std::printf("problem=%s algorithm=%s T=%ld seeds=%zu\n", result.problem_name.c_str(),
              result.algorithm.c_str(), result.T, result.seeds.size());
  print_validator(result.validator);
  std::printf("final_running_avg_mean=%.10g final_running_avg_std=%.10g\n", result.final_avg_mean,
              result.final_avg_std);
  std::printf("slope_second_half=%.6g samples_used=%ld wall_ms=%.1f\n", result.slope_second_half,
              result.samples_used, result.wall_ms);
  if (!setup.out_dir.empty()) std::printf("artifacts written to %s\n", setup.out_dir.c_str());
  return kExitOk;
}

int cmd_validate(const std::string& problem_name, const std::vector<std::string>& sets,
                 std::uint64_t seed, long trials, double tol) {
  saddle::KeyValues kv;
  saddle::apply_assignments(kv, sets);
  auto problem = saddle::make_problem(problem_name, kv);
  const auto& c = problem->constants();
  std::printf("problem=%s d=%ld n=%ld mu=%.6g L=%.6g sigma2=%.6g\n", problem_name.c_str(),
              static_cast<long>(c.dim_primal), static_cast<long>(c.dim_dual), c.mu, c.lipschitz_L,
              c.sigma2);
  saddle::ValidationReport report = saddle::validate_problem(*problem, seed, trials, tol);
  for (const auto& chk : report.checks)
    std::printf("  %-36s observed=%-12.6g bound=%-12.6g %s\n", chk.name.c_str(), chk.observed,
                chk.bound, chk.pass ? "ok" : "VIOLATED");
  std::printf("validation: %s\n", report.pass ? "pass" : "FAIL");
  return report.pass ? kExitOk : kExitConfig;
}

int cmd_compare(const std::vector<std::string>& summaries, double epsilon, bool as_json) {
  saddle::CompareReport report = saddle::compare_report(summaries, epsilon);
  if (as_json)
    std::cout << report.render_json() << '\n';
  else
    std::cout << report.render_text();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-loop stochastic minimax benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "Run an experiment and write metric artifacts");
  run->add_option("-c,--config", config_path, "key=value config file");
  run->add_option("-D,--set", sets, "config override key=value (repeatable)");
  std::string seed_list, out_dir, problem_name_run, algorithm;
  long horizon = -1;
  run->add_option("--seed-list", seed_list, "comma-separated seeds");
  run->add_option("--out", out_dir, "output directory for CSV/JSON artifacts");
  run->add_option("--problem", problem_name_run, "problem preset name");
  run->add_option("--algorithm", algorithm, "momentum | vr_momentum | two_timescale");
  run->add_option("-T,--horizon", horizon, "number of steps");

  std::string problem_name = "synthetic-default";
  std::uint64_t val_seed = 1;
  long trials = 20000;
  double tol = 0.05;
  std::vector<std::string> val_sets;
  auto* validate = app.add_subcommand("validate", "Audit a problem oracle against its constants");
  validate->add_option("--problem", problem_name, "problem preset name");
  validate->add_option("-D,--set", val_sets, "problem.* override key=value");
  validate->add_option("--seed", val_seed, "audit seed");
  validate->add_option("--trials", trials, "Monte-Carlo trials per point");
  validate->add_option("--tol", tol, "relative slack on declared constants");

  std::vector<std::string> summaries;
  double epsilon = 0.1;
  bool as_json = false;
  auto* compare = app.add_subcommand("compare", "Tabulate >= 2 run artifacts side by side");
  compare->add_option("summaries", summaries, "summary.json paths")->expected(-2);
  compare->add_option("--epsilon", epsilon, "running-average threshold for samples-to-epsilon");
  compare->add_flag("--json", as_json, "emit JSON instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage mistakes are configuration errors; --help stays a success.
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      if (!seed_list.empty()) sets.push_back("seeds=" + seed_list);
      if (!out_dir.empty()) sets.push_back("out=" + out_dir);
      if (!problem_name_run.empty()) sets.push_back("problem=" + problem_name_run);
      if (!algorithm.empty()) sets.push_back("algorithm=" + algorithm);
      if (horizon >= 0) sets.push_back("T=" + std::to_string(horizon));
      return cmd_run(config_path, sets);
    }
    if (validate->parsed()) return cmd_validate(problem_name, val_sets, val_seed, trials, tol);
    if (compare->parsed()) return cmd_compare(summaries, epsilon, as_json);
  } catch (const saddle::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const saddle::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const saddle::InstanceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const saddle::NumericAbort& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const saddle::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const saddle::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
