#pragma once

#include "saddle/metrics.hpp"
#include "saddle/problem.hpp"
#include "saddle/solver.hpp"
#include "saddle/validate.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace saddle {

// Flat key=value configuration, file keys first, command-line
// assignments layered on top.
struct KeyValues {
  std::map<std::string, std::string> kv;
  bool has(const std::string& k) const { return kv.count(k) > 0; }
  void set(std::string k, std::string v) { kv[std::move(k)] = std::move(v); }
};

// Parses "key = value" lines; '#' starts a comment, blank lines are
// skipped. Throws IoError if the file cannot be read, ConfigError on a
// malformed line.
KeyValues parse_config_file(const std::string& path);

// Applies "key=value" assignment strings on top of existing keys.
void apply_assignments(KeyValues& kv, const std::vector<std::string>& assignments);

// Problem factory: preset name plus "problem.*" override keys.
std::shared_ptr<Problem> make_problem(const std::string& name, const KeyValues& kv);

// Fully resolved experiment: constructed problem, solver spec, seeds,
// start point, metric cadence, validator report for the chosen regime.
struct ExperimentSetup {
  std::string problem_name;
  std::shared_ptr<Problem> problem;
  RunSpec spec;
  std::vector<std::uint64_t> seeds;
  long metric_every = 1;
  std::string out_dir;  // empty: keep results in memory only
  Vec theta0;
  Vec omega0;
  ValidatorReport validator;
};

// Resolves a key set into a runnable experiment. Unknown keys, missing
// required keys, and invalid values raise ConfigError. params.auto=true
// (the default) derives the largest certificate-satisfying gamma/eta
// and, when schedule.b=auto, the matching schedule offset.
ExperimentSetup build_experiment(const KeyValues& kv);

struct SeedTrace {
  std::uint64_t seed = 0;
  std::vector<MetricRecord> records;
  long samples = 0;
};

struct ExperimentResult {
  std::string problem_name;
  std::string algorithm;
  long T = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<SeedTrace> traces;
  ValidatorReport validator;
  double final_avg_mean = 0.0;
  double final_avg_std = 0.0;
  double slope_second_half = 0.0;  // NaN when undefined
  long samples_used = 0;           // per seed
  double wall_ms = 0.0;
  AlgorithmParams params;
  std::string schedule_desc;
};

// Runs every seed (bounded worker pool, one engine per seed), computes
// the metric trace at the configured cadence, and, when out_dir is set,
// writes per-seed CSVs plus summary.json only after all seeds finish.
ExperimentResult run_experiment(const ExperimentSetup& setup);

// Writes metrics_seed<k>.csv per seed and summary.json.
void write_artifacts(const ExperimentResult& result, const std::string& out_dir);

struct CompareRow {
  std::string label;
  std::string algorithm;
  double final_avg_mean = 0.0;
  double final_avg_std = 0.0;
  double slope_second_half = 0.0;
  std::vector<double> samples_to_eps;  // per seed; infinity when not reached
  double median_samples_to_eps = 0.0;  // infinity when not reached
};

struct CompareReport {
  std::string problem;
  long T = 0;
  double epsilon = 0.0;
  std::vector<CompareRow> rows;
  std::string render_text() const;
  std::string render_json() const;
};

// Side-by-side report over >= 2 summary.json artifacts produced on the
// same problem preset and horizon; refuses mismatched artifacts.
CompareReport compare_report(const std::vector<std::string>& summary_paths, double epsilon);

}  // namespace saddle
