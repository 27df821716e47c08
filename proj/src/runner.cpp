#include "saddle/runner.hpp"

#include "saddle/problems/synthetic.hpp"
#include "saddle/problems/td_mspbe.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace saddle {

using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "problem",       "problem.noise_sigma", "problem.primal_radius", "problem.dual_radius",
      "problem.family", "problem.tanh_scale", "problem.mdp_file",      "algorithm",
      "params.auto",   "params.gamma",        "params.eta",            "params.alpha",
      "params.beta",   "schedule.kind",       "schedule.a",            "schedule.b",
      "ts.c1",         "ts.p1",               "ts.c2",                 "ts.p2",
      "T",             "seeds",               "metric_every",          "out",
      "init",          "init.theta",          "init.omega"};
  return keys;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

Vec parse_vec(const std::string& key, const std::string& v) {
  std::vector<double> vals;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(parse_double(key, trim(item)));
  if (vals.empty()) throw ConfigError("config: key '" + key + "' expects a comma-separated vector");
  Vec out(static_cast<Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out[static_cast<Index>(i)] = vals[i];
  return out;
}

std::string get_or(const KeyValues& kv, const std::string& key, const std::string& fallback) {
  auto it = kv.kv.find(key);
  return it == kv.kv.end() ? fallback : it->second;
}

void require_absent(const KeyValues& kv, const std::string& key, const std::string& why) {
  if (kv.has(key)) throw ConfigError("config: key '" + key + "' " + why);
}

}  // namespace

KeyValues parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  KeyValues kv;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value: '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key at line " + std::to_string(lineno));
    kv.set(key, val);
  }
  return kv;
}

void apply_assignments(KeyValues& kv, const std::vector<std::string>& assignments) {
  for (const std::string& a : assignments) {
    auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("config: override '" + a + "' is not key=value");
    kv.set(trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
  }
}

std::shared_ptr<Problem> make_problem(const std::string& name, const KeyValues& kv) {
  auto synth = [&kv](SyntheticSpec spec) {
    if (kv.has("problem.noise_sigma")) {
      spec.noise_sigma = parse_double("problem.noise_sigma", kv.kv.at("problem.noise_sigma"));
      if (spec.noise_sigma < 0.0) throw ConfigError("config: problem.noise_sigma must be >= 0");
    }
    if (kv.has("problem.primal_radius")) {
      if (spec.primal_set.kind() != SetKind::ball)
        throw ConfigError("config: problem.primal_radius needs a ball primal set");
      spec.primal_set = FeasibleSet::ball(spec.primal_set.center(),
                                          parse_double("problem.primal_radius",
                                                       kv.kv.at("problem.primal_radius")));
    }
    if (kv.has("problem.dual_radius")) {
      if (spec.dual_set.kind() != SetKind::ball)
        throw ConfigError("config: problem.dual_radius needs a ball dual set");
      spec.dual_set = FeasibleSet::ball(spec.dual_set.center(),
                                        parse_double("problem.dual_radius",
                                                     kv.kv.at("problem.dual_radius")));
    }
    require_absent(kv, "problem.family", "only applies to policy-evaluation presets");
    require_absent(kv, "problem.tanh_scale", "only applies to policy-evaluation presets");
    require_absent(kv, "problem.mdp_file", "only applies to the mdp-file preset");
    return std::make_shared<QuadraticDualSynthetic>(std::move(spec));
  };

  auto td = [&kv](TdSpec spec) {
    if (kv.has("problem.family")) {
      std::string fam = kv.kv.at("problem.family");
      if (fam == "linear") spec.family = FamilyKind::linear;
      else if (fam == "tanh") spec.family = FamilyKind::tanh;
      else throw ConfigError("config: problem.family must be linear or tanh");
    }
    if (kv.has("problem.tanh_scale"))
      spec.tanh_scale = parse_double("problem.tanh_scale", kv.kv.at("problem.tanh_scale"));
    if (kv.has("problem.primal_radius"))
      spec.primal_radius = parse_double("problem.primal_radius", kv.kv.at("problem.primal_radius"));
    require_absent(kv, "problem.noise_sigma", "only applies to synthetic presets");
    require_absent(kv, "problem.dual_radius", "only applies to synthetic presets");
    return std::make_shared<TdMspbeProblem>(std::move(spec));
  };

  if (name == "synthetic-default") return synth(synthetic_default_spec());
  if (name == "synthetic-noiseless") return synth(synthetic_noiseless_spec());
  if (name == "synthetic-ball-dual") return synth(synthetic_ball_dual_spec());
  if (name == "synthetic-unconstrained") return synth(synthetic_unconstrained_spec());
  if (name == "td-default") return td(td_default_spec());
  if (name == "td-realizable") return td(td_realizable_spec());
  if (name == "mdp-file") {
    if (!kv.has("problem.mdp_file")) throw ConfigError("config: mdp-file preset needs problem.mdp_file");
    TdSpec spec = td_default_spec();
    spec.mdp = load_mdp(kv.kv.at("problem.mdp_file"));
    return td(std::move(spec));
  }
  throw ConfigError("config: unknown problem preset '" + name + "'");
}

ExperimentSetup build_experiment(const KeyValues& kv) {
  for (const auto& [key, value] : kv.kv) {
    (void)value;
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
      throw ConfigError("config: unknown key '" + key + "'");
  }

  ExperimentSetup setup;
  setup.problem_name = get_or(kv, "problem", "synthetic-default");
  setup.problem = make_problem(setup.problem_name, kv);
  const ProblemConstants& c = setup.problem->constants();

  std::string alg_name = get_or(kv, "algorithm", "momentum");
  auto alg = algorithm_from_string(alg_name);
  if (!alg) throw ConfigError("config: unknown algorithm '" + alg_name + "'");
  setup.spec.algorithm = *alg;

  if (!kv.has("T")) throw ConfigError("config: key 'T' is required");
  setup.spec.T = parse_long("T", kv.kv.at("T"));
  if (setup.spec.T < 1) throw ConfigError("config: T must be >= 1");

  {
    std::stringstream ss(get_or(kv, "seeds", "1"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      setup.seeds.push_back(static_cast<std::uint64_t>(parse_long("seeds", item)));
    }
    if (setup.seeds.empty()) throw ConfigError("config: seeds list is empty");
  }

  const bool is_baseline = setup.spec.algorithm == AlgorithmKind::two_timescale;
  if (is_baseline) {
    for (const char* k : {"params.auto", "params.gamma", "params.eta", "params.alpha",
                          "params.beta", "schedule.kind", "schedule.a", "schedule.b"})
      require_absent(kv, k, "does not apply to the two-timescale baseline");
    TwoTimescaleSchedule& ts = setup.spec.two_timescale;
    if (kv.has("ts.c1")) ts.c1 = parse_double("ts.c1", kv.kv.at("ts.c1"));
    if (kv.has("ts.p1")) ts.p1 = parse_double("ts.p1", kv.kv.at("ts.p1"));
    if (kv.has("ts.c2")) ts.c2 = parse_double("ts.c2", kv.kv.at("ts.c2"));
    if (kv.has("ts.p2")) ts.p2 = parse_double("ts.p2", kv.kv.at("ts.p2"));
    ts.validate();
    setup.validator.name = "baseline";
    setup.validator.pass = true;
  } else {
    for (const char* k : {"ts.c1", "ts.p1", "ts.c2", "ts.p2"})
      require_absent(kv, k, "only applies to the two-timescale baseline");

    const bool is_vr = setup.spec.algorithm == AlgorithmKind::vr_momentum;
    bool params_auto = parse_bool("params.auto", get_or(kv, "params.auto", "true"));
    AlgorithmParams& p = setup.spec.params;
    if (params_auto) {
      for (const char* k : {"params.gamma", "params.eta", "params.alpha", "params.beta"})
        require_absent(kv, k, "conflicts with params.auto=true");
      double L2 = c.lipschitz_L * c.lipschitz_L;
      if (is_vr) {
        p.alpha = p.beta = 6.0;
        p.eta = c.mu / (6.0 * L2);
        p.gamma = c.mu * c.mu * p.eta / (9.0 * L2);
      } else {
        p.alpha = p.beta = 3.0;
        p.eta = c.mu / (4.0 * L2);
        p.gamma = p.eta * c.mu * c.mu / (9.0 * L2);
      }
    } else {
      for (const char* k : {"params.gamma", "params.eta", "params.alpha", "params.beta"})
        if (!kv.has(k))
          throw ConfigError(std::string("config: params.auto=false requires '") + k + "'");
      p.gamma = parse_double("params.gamma", kv.kv.at("params.gamma"));
      p.eta = parse_double("params.eta", kv.kv.at("params.eta"));
      p.alpha = parse_double("params.alpha", kv.kv.at("params.alpha"));
      p.beta = parse_double("params.beta", kv.kv.at("params.beta"));
    }

    ScheduleSpec& sched = setup.spec.schedule;
    std::string kind_name =
        get_or(kv, "schedule.kind", is_vr ? "decaying_cbrt" : "decaying_sqrt");
    auto kind = schedule_kind_from_string(kind_name);
    if (!kind) throw ConfigError("config: unknown schedule kind '" + kind_name + "'");
    sched.kind = *kind;
    const bool is_sqrt =
        sched.kind == ScheduleKind::decaying_sqrt || sched.kind == ScheduleKind::fixed_sqrt;
    const bool is_fixed =
        sched.kind == ScheduleKind::fixed_sqrt || sched.kind == ScheduleKind::fixed_cbrt;
    sched.a = kv.has("schedule.a") ? parse_double("schedule.a", kv.kv.at("schedule.a"))
                                   : (is_sqrt ? 1.0 / 16.0 : 1.0 / 3.0);
    std::string b_str = get_or(kv, "schedule.b", "auto");
    if (b_str == "auto") {
      double L2 = c.lipschitz_L * c.lipschitz_L;
      const AlgorithmParams& pp = setup.spec.params;
      if (is_vr && is_fixed)
        sched.b = std::max(std::pow(6.0 * pp.gamma * (c.lipschitz_L + L2 / c.mu), 3.0), 256.0);
      else if (is_vr)
        sched.b = std::max(std::pow(8.0 * pp.gamma * L2 / c.mu, 3.0), 256.0);
      else if (is_fixed)
        sched.b = std::max(std::pow(pp.gamma * L2 / c.mu, 2.0), 3.0);
      else
        sched.b = std::max(std::pow(2.0 * pp.gamma * L2 / c.mu, 2.0), 3.0);
    } else {
      sched.b = parse_double("schedule.b", b_str);
    }
    if (is_fixed) sched.horizon_T = setup.spec.T;
    sched.validate();

    if (is_vr)
      setup.validator = is_fixed ? validate_thm4(c, p, sched.b) : validate_thm3(c, p, sched.b);
    else
      setup.validator = is_fixed ? validate_thm2(c, p, sched.b) : validate_thm1(c, p, sched.b);
  }

  long stride = kv.has("metric_every") ? parse_long("metric_every", kv.kv.at("metric_every")) : 0;
  if (stride < 0) throw ConfigError("config: metric_every must be >= 0");
  if (stride == 0) stride = setup.spec.T <= 10000 ? 1 : (setup.spec.T + 9999) / 10000;
  setup.metric_every = stride;

  setup.out_dir = get_or(kv, "out", "");

  std::string init = get_or(kv, "init", "default");
  const Index d = c.dim_primal;
  const Index n = c.dim_dual;
  if (init == "default") {
    setup.theta0 = project(setup.problem->primal_set(), Vec::Constant(d, 0.5));
    setup.omega0 = project(setup.problem->dual_set(), Vec::Zero(n));
  } else if (init == "stationary") {
    auto theta_star = setup.problem->primal_minimizer();
    if (!theta_star)
      throw ConfigError("config: init=stationary requires a problem with a computable minimizer");
    setup.theta0 = *theta_star;
    setup.omega0 = inner_maximizer(*setup.problem, setup.theta0, 1e-10);
  } else {
    throw ConfigError("config: init must be default or stationary");
  }
  if (kv.has("init.theta")) setup.theta0 = parse_vec("init.theta", kv.kv.at("init.theta"));
  if (kv.has("init.omega")) setup.omega0 = parse_vec("init.omega", kv.kv.at("init.omega"));
  if (setup.theta0.size() != d || setup.omega0.size() != n)
    throw ConfigError("config: init vectors have wrong dimensions");

  return setup;
}

namespace {

SeedTrace run_one_seed(const ExperimentSetup& setup, std::uint64_t seed) {
  const Problem& problem = *setup.problem;
  CountingProblem counting(problem);
  const AlgorithmParams& params = setup.spec.params;
  const double L = problem.constants().lipschitz_L;
  const long stride = setup.metric_every;
  const bool is_baseline = setup.spec.algorithm == AlgorithmKind::two_timescale;
  const bool is_vr = setup.spec.algorithm == AlgorithmKind::vr_momentum;

  SeedTrace trace;
  trace.seed = seed;
  trace.records.reserve(static_cast<std::size_t>(setup.spec.T / stride + 1));
  double sum_m = 0.0;
  long count = 0;

  StepRecorder recorder = [&](const SolverState& before, const StepOutputs& out) {
    if (before.t % stride != 0) return;
    // The baseline has no fixed primal multiplier; its drift term is
    // normalized by the step's own primal step size.
    double gamma_m = is_baseline ? out.nu_used : params.gamma;
    MetricTerms terms = metric_terms(out, before, problem, gamma_m, L);
    sum_m += terms.M();
    ++count;
    MetricRecord rec;
    rec.t = before.t;
    rec.nu = out.nu_used;
    rec.drift = terms.drift;
    rec.grad_err = terms.grad_err;
    rec.dual_gap = terms.dual_gap;
    rec.M = terms.M();
    rec.Mbar = terms.Mbar();
    rec.running_avg = sum_m / static_cast<double>(count);
    if (!is_baseline) {
      LyapunovRecord ly;
      if (is_vr) {
        double nu_prev = setup.spec.schedule.nu(std::max(0L, before.t - 1));
        ly = lyapunov_s(before, problem, params, L, nu_prev);
      } else {
        ly = lyapunov_q(before, problem, params, L);
      }
      if (!ly.partial) rec.lyapunov = ly.value;
    }
    trace.records.push_back(std::move(rec));
  };

  run(counting, setup.spec, setup.theta0, setup.omega0, seed, recorder);
  trace.samples = counting.samples_drawn();
  return trace;
}

double fit_slope(const std::vector<std::pair<double, double>>& pts) {
  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [t, v] : pts) {
    if (!(t > 0.0) || !(v > 0.0)) continue;
    double x = std::log(t), y = std::log(v);
    n += 1.0;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (n < 2.0) return std::numeric_limits<double>::quiet_NaN();
  double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSetup& setup) {
  if (!setup.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(setup.out_dir, ec);
    if (ec) throw IoError("run: cannot create output directory " + setup.out_dir);
  }

  ExperimentResult result;
  result.problem_name = setup.problem_name;
  result.algorithm = to_string(setup.spec.algorithm);
  result.T = setup.spec.T;
  result.seeds = setup.seeds;
  result.validator = setup.validator;
  result.params = setup.spec.params;
  if (setup.spec.algorithm == AlgorithmKind::two_timescale) {
    std::ostringstream ss;
    ss << "two_timescale c1=" << setup.spec.two_timescale.c1 << " p1=" << setup.spec.two_timescale.p1
       << " c2=" << setup.spec.two_timescale.c2 << " p2=" << setup.spec.two_timescale.p2;
    result.schedule_desc = ss.str();
  } else {
    std::ostringstream ss;
    ss << to_string(setup.spec.schedule.kind) << " a=" << setup.spec.schedule.a
       << " b=" << setup.spec.schedule.b;
    result.schedule_desc = ss.str();
  }

  auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = setup.seeds.size();
  result.traces.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    for (std::size_t i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) {
      try {
        result.traces[i] = run_one_seed(setup, setup.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(n, std::min(hw, 8u)));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i + 1 < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
  auto t1 = std::chrono::steady_clock::now();
  result.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  double mean = 0.0;
  for (const auto& tr : result.traces) mean += tr.records.back().running_avg;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto& tr : result.traces) {
    double dev = tr.records.back().running_avg - mean;
    var += dev * dev;
  }
  result.final_avg_mean = mean;
  result.final_avg_std = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;

  std::vector<std::pair<double, double>> curve;
  const auto& grid = result.traces.front().records;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid[j].t < result.T / 2 || grid[j].t < 1) continue;
    double acc = 0.0;
    for (const auto& tr : result.traces) acc += tr.records[j].running_avg;
    curve.emplace_back(static_cast<double>(grid[j].t), acc / static_cast<double>(n));
  }
  result.slope_second_half = fit_slope(curve);

  result.samples_used = result.traces.front().samples;
  for (const auto& tr : result.traces)
    if (tr.samples != result.samples_used)
      throw std::logic_error("run: seeds consumed different sample counts");

  if (!setup.out_dir.empty()) write_artifacts(result, setup.out_dir);
  return result;
}

void write_artifacts(const ExperimentResult& result, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("write: cannot create output directory " + out_dir);

  std::vector<std::string> csv_names;
  for (const auto& trace : result.traces) {
    std::string name = "metrics_seed" + std::to_string(trace.seed) + ".csv";
    csv_names.push_back(name);
    std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::trunc);
    if (!out) throw IoError("write: cannot open " + name);
    out << "t,nu_t,term_drift,term_grad_err,term_dual_gap,M_t,Mbar_t,running_avg_M,Q_or_S\n";
    for (const auto& r : trace.records) {
      out << r.t << ',' << format_double(r.nu) << ',' << format_double(r.drift) << ','
          << format_double(r.grad_err) << ',' << format_double(r.dual_gap) << ','
          << format_double(r.M) << ',' << format_double(r.Mbar) << ','
          << format_double(r.running_avg) << ',';
      if (r.lyapunov) out << format_double(*r.lyapunov);
      out << '\n';
    }
    if (!out) throw IoError("write: failed while writing " + name);
  }

  json j;
  j["problem"] = result.problem_name;
  j["algorithm"] = result.algorithm;
  j["T"] = result.T;
  j["seeds"] = result.seeds;
  j["final_running_avg_mean"] = result.final_avg_mean;
  j["final_running_avg_std"] = result.final_avg_std;
  if (std::isfinite(result.slope_second_half))
    j["slope_second_half"] = result.slope_second_half;
  else
    j["slope_second_half"] = nullptr;
  json checks = json::array();
  for (const auto& chk : result.validator.checks)
    checks.push_back({{"name", chk.name}, {"lhs", chk.lhs}, {"rhs", chk.rhs}, {"pass", chk.pass}});
  j["validator"] = {{"name", result.validator.name}, {"pass", result.validator.pass}, {"checks", checks}};
  j["samples_used"] = result.samples_used;
  j["wall_ms"] = result.wall_ms;
  j["params"] = {{"gamma", result.params.gamma},
                 {"eta", result.params.eta},
                 {"alpha", result.params.alpha},
                 {"beta", result.params.beta}};
  j["schedule"] = result.schedule_desc;
  j["csv_files"] = csv_names;

  std::ofstream out(std::filesystem::path(out_dir) / "summary.json", std::ios::trunc);
  if (!out) throw IoError("write: cannot open summary.json");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write: failed while writing summary.json");
}

namespace {

struct LoadedArtifact {
  std::string dir;
  json summary;
  // Per seed: (t, running_avg) rows.
  std::vector<std::vector<std::pair<long, double>>> curves;
};

LoadedArtifact load_artifact(const std::string& summary_path) {
  LoadedArtifact art;
  std::ifstream in(summary_path);
  if (!in) throw IoError("compare: cannot open " + summary_path);
  try {
    in >> art.summary;
  } catch (const std::exception& e) {
    throw IoError("compare: cannot parse " + summary_path + ": " + e.what());
  }
  art.dir = std::filesystem::path(summary_path).parent_path().string();
  for (const auto& name : art.summary.at("csv_files")) {
    std::ifstream csv(std::filesystem::path(art.dir) / name.get<std::string>());
    if (!csv) throw IoError("compare: cannot open csv " + name.get<std::string>());
    std::string line;
    std::getline(csv, line);  // header
    std::vector<std::pair<long, double>> rows;
    while (std::getline(csv, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() < 8) throw IoError("compare: malformed csv row in " + name.get<std::string>());
      rows.emplace_back(std::stol(cells[0]), std::stod(cells[7]));
    }
    art.curves.push_back(std::move(rows));
  }
  return art;
}

}  // namespace

CompareReport compare_report(const std::vector<std::string>& summary_paths, double epsilon) {
  if (summary_paths.size() < 2) throw ConfigError("compare: need at least two artifacts");
  if (!(epsilon > 0.0)) throw ConfigError("compare: epsilon must be positive");

  std::vector<LoadedArtifact> arts;
  arts.reserve(summary_paths.size());
  for (const auto& p : summary_paths) arts.push_back(load_artifact(p));

  CompareReport report;
  report.problem = arts.front().summary.at("problem").get<std::string>();
  report.T = arts.front().summary.at("T").get<long>();
  report.epsilon = epsilon;
  for (const auto& art : arts) {
    if (art.summary.at("problem").get<std::string>() != report.problem ||
        art.summary.at("T").get<long>() != report.T)
      throw ConfigError("compare: artifacts differ in problem or horizon; refusing to compare");
  }

  for (std::size_t i = 0; i < arts.size(); ++i) {
    const auto& art = arts[i];
    CompareRow row;
    row.label = summary_paths[i];
    row.algorithm = art.summary.at("algorithm").get<std::string>();
    row.final_avg_mean = art.summary.at("final_running_avg_mean").get<double>();
    row.final_avg_std = art.summary.at("final_running_avg_std").get<double>();
    row.slope_second_half = art.summary.at("slope_second_half").is_null()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : art.summary.at("slope_second_half").get<double>();
    for (const auto& curve : art.curves) {
      double samples = std::numeric_limits<double>::infinity();
      for (const auto& [t, avg] : curve) {
        if (avg <= epsilon) {
          // init draw + steps 0..t, one draw each
          samples = static_cast<double>(t) + 2.0;
          break;
        }
      }
      row.samples_to_eps.push_back(samples);
    }
    std::vector<double> sorted = row.samples_to_eps;
    std::sort(sorted.begin(), sorted.end());
    std::size_t m = sorted.size();
    row.median_samples_to_eps =
        m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string CompareReport::render_text() const {
  std::ostringstream out;
  out << "problem=" << problem << " T=" << T << " epsilon=" << epsilon << "\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-14s %14s %14s %10s %22s\n", "algorithm", "final_avg_mean",
                "final_avg_std", "slope2h", "median_samples_to_eps");
  out << buf;
  for (const auto& row : rows) {
    std::string med = std::isinf(row.median_samples_to_eps)
                          ? "not reached(" + std::to_string(T) + ")"
                          : std::to_string(static_cast<long>(row.median_samples_to_eps));
    std::snprintf(buf, sizeof(buf), "%-14s %14.6g %14.6g %10.4g %22s\n", row.algorithm.c_str(),
                  row.final_avg_mean, row.final_avg_std, row.slope_second_half, med.c_str());
    out << buf;
  }
  return out.str();
}

std::string CompareReport::render_json() const {
  json j;
  j["problem"] = problem;
  j["T"] = T;
  j["epsilon"] = epsilon;
  json rows_json = json::array();
  for (const auto& row : rows) {
    json r;
    r["label"] = row.label;
    r["algorithm"] = row.algorithm;
    r["final_running_avg_mean"] = row.final_avg_mean;
    r["final_running_avg_std"] = row.final_avg_std;
    if (std::isfinite(row.slope_second_half))
      r["slope_second_half"] = row.slope_second_half;
    else
      r["slope_second_half"] = nullptr;
    json per_seed = json::array();
    for (double s : row.samples_to_eps) {
      if (std::isinf(s))
        per_seed.push_back(nullptr);
      else
        per_seed.push_back(static_cast<long>(s));
    }
    r["samples_to_eps"] = per_seed;
    if (std::isinf(row.median_samples_to_eps))
      r["median_samples_to_eps"] = nullptr;
    else
      r["median_samples_to_eps"] = static_cast<long>(row.median_samples_to_eps);
    rows_json.push_back(std::move(r));
  }
  j["rows"] = rows_json;
  return j.dump(2);
}

}  // namespace saddle
