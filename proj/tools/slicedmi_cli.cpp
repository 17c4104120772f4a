// Command-line front end. Subcommands:
//
//   estimate   sliced mutual information of two sample files
//   oracle     Monte-Carlo SMI and diagnostics for a Gaussian spec
//   indep      independence-testing AUC sweep over synthetic scenarios
//   rates      RMSE convergence sweeps against a high-m Gaussian oracle
//   smine      variational (Donsker-Varadhan) sliced MI training
//   extract    SMI-maximizing linear feature extraction
//   gen        synthetic scenario data written to files
//
// Configs are JSON with unknown keys rejected. Flags --seed/--threads/
// --unit/--output override their config counterparts. Scalar reports are
// "key value" lines ending in a "config <json>" provenance line; tables are
// CSV whose first line is "# config <json>". Values are computed in nats
// and converted at write time when unit=bits. Reruns with the same config
// and seed produce byte-identical files. The only environment override is
// SLICEDMI_OUTPUT_DIR, which redirects the directory part of output paths.
//
// Exit codes: 0 success, 2 input error, 3 numerical/estimator error,
// 4 config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "slicedmi/slicedmi.hpp"

using nlohmann::json;

namespace slicedmi::cli {

// ---------------------------------------------------------------------------
// Config plumbing

json load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open config file: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw config_error("invalid JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw config_error("config root must be a JSON object: " + path);
  return j;
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw config_error("unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error("bad value for \"" + key + "\": " + e.what());
  }
}

std::string require_string(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw config_error("missing required key \"" + key + "\" in " + where);
  return get_or<std::string>(j, key, {});
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty())
    throw config_error("\"" + key + "\" must be a non-empty array of rows");
  const auto rows = static_cast<int>(j.size());
  if (!j[0].is_array() || j[0].empty())
    throw config_error("\"" + key + "\" rows must be non-empty arrays");
  const auto cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols)
      throw config_error("\"" + key + "\" rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& key) {
  if (!j.is_array()) throw config_error("\"" + key + "\" must be an array");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

// A Gaussian spec is one of three JSON forms:
//   {"overlap": {"d_total": D, "x": [lo, hi], "y": [lo, hi]}}
//   {"rho": r}                              (scalar pair, unit variances)
//   {"sigma_x": [[..]], "sigma_y": [[..]], "sigma_xy": [[..]],
//    "mean_x": [..], "mean_y": [..]}        (means optional)
GaussianSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw config_error("\"spec\" must be a JSON object");
  const bool has_overlap = j.contains("overlap");
  const bool has_rho = j.contains("rho");
  const bool has_blocks = j.contains("sigma_x");
  if (has_overlap + has_rho + has_blocks != 1)
    throw config_error("\"spec\" needs exactly one of: overlap, rho, sigma_x/sigma_y/sigma_xy");
  if (has_overlap) {
    reject_unknown_keys(j, {"overlap"}, "spec");
    const json& o = j.at("overlap");
    reject_unknown_keys(o, {"d_total", "x", "y"}, "spec.overlap");
    const auto range = [&](const char* key) {
      const json& r = o.at(key);
      if (!r.is_array() || r.size() != 2)
        throw config_error(std::string("spec.overlap.") + key + " must be [lo, hi]");
      return std::pair<int, int>{r[0].get<int>(), r[1].get<int>()};
    };
    const auto [xlo, xhi] = range("x");
    const auto [ylo, yhi] = range("y");
    return overlap_gaussian_spec(o.at("d_total").get<int>(), xlo, xhi, ylo, yhi);
  }
  if (has_rho) {
    reject_unknown_keys(j, {"rho"}, "spec");
    GaussianSpec spec;
    spec.sigma_x = Eigen::MatrixXd::Ones(1, 1);
    spec.sigma_y = Eigen::MatrixXd::Ones(1, 1);
    spec.sigma_xy = Eigen::MatrixXd::Constant(1, 1, j.at("rho").get<double>());
    return spec;
  }
  reject_unknown_keys(j, {"sigma_x", "sigma_y", "sigma_xy", "mean_x", "mean_y"}, "spec");
  GaussianSpec spec;
  spec.sigma_x = matrix_from_json(j.at("sigma_x"), "sigma_x");
  spec.sigma_y = matrix_from_json(j.at("sigma_y"), "sigma_y");
  spec.sigma_xy = matrix_from_json(j.at("sigma_xy"), "sigma_xy");
  if (j.contains("mean_x")) spec.mean_x = vector_from_json(j.at("mean_x"), "mean_x");
  if (j.contains("mean_y")) spec.mean_y = vector_from_json(j.at("mean_y"), "mean_y");
  return spec;
}

std::vector<std::int64_t> int64s_from_json(const json& j, const std::string& key) {
  if (!j.is_array()) throw config_error("\"" + key + "\" must be an array of integers");
  std::vector<std::int64_t> out;
  for (const auto& e : j) {
    if (!e.is_number_integer() && !e.is_number_unsigned())
      throw config_error("\"" + key + "\" must be an array of integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

std::vector<int> ints_from_json(const json& j, const std::string& key) {
  std::vector<int> out;
  for (auto v : int64s_from_json(j, key)) out.push_back(static_cast<int>(v));
  return out;
}

// ---------------------------------------------------------------------------
// Output plumbing

double unit_factor(const std::string& unit) {
  if (unit == "nats") return 1.0;
  if (unit == "bits") return 1.0 / std::log(2.0);
  throw config_error("unit must be \"nats\" or \"bits\", got \"" + unit + "\"");
}

// SLICEDMI_OUTPUT_DIR redirects where files land; the file name is kept.
std::string resolve_output(const std::string& path) {
  const char* dir = std::getenv("SLICEDMI_OUTPUT_DIR");
  if (!dir || !*dir) return path;
  return (std::filesystem::path(dir) / std::filesystem::path(path).filename()).string();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw input_error("cannot open output file for writing: " + path);
  return os;
}

class Report {
 public:
  explicit Report(const std::string& path) : path_(path), os_(open_output(path)) {}

  void line(const std::string& key, const std::string& value) {
    os_ << key << ' ' << value << '\n';
  }
  void line(const std::string& key, double value) { line(key, format_double(value)); }
  void line(const std::string& key, std::int64_t value) { line(key, std::to_string(value)); }

  void finish(const json& resolved) {
    os_ << "config " << resolved.dump() << '\n';
    os_.flush();
    if (!os_) throw input_error("failed writing output file: " + path_);
    std::cout << "wrote " << path_ << '\n';
  }

 private:
  std::string path_;
  std::ofstream os_;
};

void write_csv(const std::string& path, const json& resolved, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream os = open_output(path);
  os << "# config " << resolved.dump() << '\n' << header << '\n';
  for (const auto& r : rows) os << r << '\n';
  os.flush();
  if (!os) throw input_error("failed writing output file: " + path);
  std::cout << "wrote " << path << '\n';
}

// Linear-interpolation quantile of a sorted copy.
double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

// ---------------------------------------------------------------------------
// Shared option resolution

struct GlobalArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string unit;
  std::string output;
  bool seed_given = false, threads_given = false, unit_given = false, output_given = false;
};

// Flag > config > built-in default; the resolved value is what gets embedded.
struct Resolved {
  std::uint64_t seed;
  int threads;
  std::string unit;
  std::string output;
};

Resolved resolve_common(const json& cfg, const GlobalArgs& g, const std::string& default_output) {
  Resolved r;
  r.seed = g.seed_given ? g.seed : get_or<std::uint64_t>(cfg, "seed", 0);
  r.threads = g.threads_given ? g.threads : get_or<int>(cfg, "threads", 1);
  r.unit = g.unit_given ? g.unit : get_or<std::string>(cfg, "unit", "nats");
  r.output = g.output_given ? g.output : get_or<std::string>(cfg, "output", default_output);
  unit_factor(r.unit);  // validate early
  if (r.threads < 0) throw config_error("threads must be >= 0");
  return r;
}

json config_or_empty(const GlobalArgs& g) {
  if (g.config_path.empty()) return json::object();
  return load_config_file(g.config_path);
}

// Reports embed the resolved config with a "command" tag so they can be fed
// straight back in; if present it must name the subcommand being run.
void check_command_key(const json& cfg, const std::string& name) {
  if (!cfg.contains("command")) return;
  const auto got = get_or<std::string>(cfg, "command", {});
  if (got != name)
    throw config_error("config \"command\" is \"" + got + "\" but the " + name +
                       " subcommand is running");
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_estimate(const GlobalArgs& g, const std::string& x_pos, const std::string& y_pos) {
  json cfg = config_or_empty(g);
  check_command_key(cfg, "estimate");
  reject_unknown_keys(cfg,
                      {"command", "x", "y", "m", "k", "degeneracy", "jitter_eps",
                       "clip_negative_slices", "seed", "threads", "unit", "output"},
                      "estimate config");
  const Resolved r = resolve_common(cfg, g, "estimate.txt");

  const std::string x_path = !x_pos.empty() ? x_pos : require_string(cfg, "x", "estimate config");
  const std::string y_path = !y_pos.empty() ? y_pos : require_string(cfg, "y", "estimate config");

  SmiConfig scfg;
  scfg.m = get_or<std::int64_t>(cfg, "m", 1000);
  scfg.knn.k = get_or<int>(cfg, "k", 3);
  const std::string degeneracy = get_or<std::string>(cfg, "degeneracy", "jitter");
  if (degeneracy == "jitter")
    scfg.knn.degeneracy = DegeneracyPolicy::jitter;
  else if (degeneracy == "error")
    scfg.knn.degeneracy = DegeneracyPolicy::error;
  else
    throw config_error("degeneracy must be \"jitter\" or \"error\"");
  scfg.knn.jitter_eps = get_or<double>(cfg, "jitter_eps", scfg.knn.jitter_eps);
  scfg.clip_negative_slices = get_or<bool>(cfg, "clip_negative_slices", false);
  scfg.seed = r.seed;
  scfg.threads = r.threads;

  const SampleMatrix x = load_matrix_file(x_path);
  const SampleMatrix y = load_matrix_file(y_path);

  const SmiEstimate est = estimate_smi(x, y, scfg);

  json resolved = {{"command", "estimate"},
                   {"x", x_path},
                   {"y", y_path},
                   {"m", scfg.m},
                   {"k", scfg.knn.k},
                   {"degeneracy", degeneracy},
                   {"jitter_eps", scfg.knn.jitter_eps},
                   {"clip_negative_slices", scfg.clip_negative_slices},
                   {"seed", r.seed},
                   {"threads", r.threads},
                   {"unit", r.unit},
                   {"output", r.output}};

  const double f = unit_factor(r.unit);
  Report report(resolve_output(r.output));
  report.line("report", "estimate");
  report.line("unit", r.unit);
  report.line("n", static_cast<std::int64_t>(x.rows()));
  report.line("d_x", static_cast<std::int64_t>(x.cols()));
  report.line("d_y", static_cast<std::int64_t>(y.cols()));
  report.line("m", scfg.m);
  report.line("k", static_cast<std::int64_t>(scfg.knn.k));
  report.line("value", f * est.value);
  report.line("std_error", f * est.std_error);
  for (const auto& [tag, p] :
       std::vector<std::pair<const char*, double>>{
           {"q0", 0.0}, {"q25", 0.25}, {"q50", 0.5}, {"q75", 0.75}, {"q100", 1.0}})
    report.line(tag, f * quantile(est.per_slice, p));
  report.finish(resolved);
  std::cout << "value " << format_double(f * est.value) << ' ' << r.unit << '\n';
  return 0;
}

int cmd_oracle(const GlobalArgs& g) {
  if (g.config_path.empty()) throw config_error("oracle requires --config");
  json cfg = load_config_file(g.config_path);
  check_command_key(cfg, "oracle");
  reject_unknown_keys(cfg, {"command", "spec", "m", "seed", "unit", "output"}, "oracle config");
  const Resolved r = resolve_common(cfg, g, "oracle.txt");
  if (!cfg.contains("spec")) throw config_error("missing required key \"spec\" in oracle config");
  const GaussianSpec spec = spec_from_json(cfg.at("spec"));
  const auto m = get_or<std::int64_t>(cfg, "m", 100000);

  const SmiEstimate est = gaussian_smi_mc(spec, m, r.seed);
  const double rho = cca_coefficient(spec);

  json resolved = {{"command", "oracle"}, {"spec", cfg.at("spec")}, {"m", m},
                   {"seed", r.seed},      {"unit", r.unit},         {"output", r.output}};

  const double f = unit_factor(r.unit);
  Report report(resolve_output(r.output));
  report.line("report", "oracle");
  report.line("unit", r.unit);
  report.line("m", m);
  report.line("value", f * est.value);
  report.line("std_error", f * est.std_error);
  report.line("rho_cca", rho);
  if (rho < kNearSingularRho) report.line("upper_bound", f * gaussian_smi_upper_bound(spec));
  report.finish(resolved);
  std::cout << "value " << format_double(f * est.value) << ' ' << r.unit << '\n';
  return 0;
}

int cmd_indep(const GlobalArgs& g) {
  if (g.config_path.empty()) throw config_error("indep requires --config");
  json cfg = load_config_file(g.config_path);
  check_command_key(cfg, "indep");
  reject_unknown_keys(cfg,
                      {"command", "scenario", "dims", "sample_sizes", "trials_per_cell", "m", "k",
                       "seed", "threads", "output"},
                      "indep config");
  const Resolved r = resolve_common(cfg, g, "indep.csv");

  ExperimentPlan plan;
  const std::string scenario = require_string(cfg, "scenario", "indep config");
  plan.scenario = scenario_kind_from_name(scenario);
  if (plan.scenario == Scenario::Kind::overlap)
    throw config_error("indep does not support the overlap scenario (no coordinate ranges)");
  if (!cfg.contains("dims")) throw config_error("missing required key \"dims\" in indep config");
  plan.dims = ints_from_json(cfg.at("dims"), "dims");
  if (!cfg.contains("sample_sizes"))
    throw config_error("missing required key \"sample_sizes\" in indep config");
  plan.sample_sizes = int64s_from_json(cfg.at("sample_sizes"), "sample_sizes");
  if (plan.dims.empty() || plan.sample_sizes.empty())
    throw config_error("indep config: dims and sample_sizes must be non-empty");
  plan.trials_per_cell = get_or<int>(cfg, "trials_per_cell", 20);
  plan.m = get_or<std::int64_t>(cfg, "m", 1000);
  plan.k = get_or<int>(cfg, "k", 3);
  plan.seed = r.seed;
  plan.threads = r.threads;

  const ExperimentTable table = run_independence_experiment(plan);

  json resolved = {{"command", "indep"},
                   {"scenario", scenario},
                   {"dims", plan.dims},
                   {"sample_sizes", plan.sample_sizes},
                   {"trials_per_cell", plan.trials_per_cell},
                   {"m", plan.m},
                   {"k", plan.k},
                   {"seed", r.seed},
                   {"threads", r.threads},
                   {"output", r.output}};

  std::vector<std::string> rows;
  for (const auto& row : table.rows)
    rows.push_back(row.scenario + ',' + std::to_string(row.d) + ',' + std::to_string(row.n) +
                   ',' + row.estimator + ',' + format_double(row.auc) + ',' +
                   std::to_string(row.trials) + ',' + std::to_string(plan.m) + ',' +
                   std::to_string(plan.k) + ',' + std::to_string(plan.seed));
  write_csv(resolve_output(r.output), resolved, "scenario,d,n,estimator,auc,trials,m,k,seed",
            rows);
  return 0;
}

int cmd_rates(const GlobalArgs& g) {
  if (g.config_path.empty()) throw config_error("rates requires --config");
  json cfg = load_config_file(g.config_path);
  check_command_key(cfg, "rates");
  reject_unknown_keys(cfg,
                      {"command", "spec", "n_values", "m_values", "trials", "fixed_n", "fixed_m",
                       "oracle_m", "joint_sweep", "k", "seed", "threads", "unit", "output"},
                      "rates config");
  const Resolved r = resolve_common(cfg, g, "rates.csv");
  if (!cfg.contains("spec")) throw config_error("missing required key \"spec\" in rates config");

  RateGrid grid;
  grid.spec = spec_from_json(cfg.at("spec"));
  if (cfg.contains("n_values")) grid.n_values = int64s_from_json(cfg.at("n_values"), "n_values");
  if (cfg.contains("m_values")) grid.m_values = int64s_from_json(cfg.at("m_values"), "m_values");
  if (grid.n_values.empty() && grid.m_values.empty())
    throw config_error("rates config: need a non-empty n_values or m_values grid");
  grid.trials = get_or<int>(cfg, "trials", 10);
  grid.fixed_n = get_or<std::int64_t>(cfg, "fixed_n", grid.fixed_n);
  grid.fixed_m = get_or<std::int64_t>(cfg, "fixed_m", grid.fixed_m);
  grid.oracle_m = get_or<std::int64_t>(cfg, "oracle_m", grid.oracle_m);
  grid.joint_sweep = get_or<bool>(cfg, "joint_sweep", true);
  grid.k = get_or<int>(cfg, "k", 3);
  grid.seed = r.seed;
  grid.threads = r.threads;

  const RateReport report = run_rate_sweep(grid);

  json resolved = {{"command", "rates"},
                   {"spec", cfg.at("spec")},
                   {"n_values", grid.n_values},
                   {"m_values", grid.m_values},
                   {"trials", grid.trials},
                   {"fixed_n", grid.fixed_n},
                   {"fixed_m", grid.fixed_m},
                   {"oracle_m", grid.oracle_m},
                   {"joint_sweep", grid.joint_sweep},
                   {"k", grid.k},
                   {"seed", r.seed},
                   {"threads", r.threads},
                   {"unit", r.unit},
                   {"output", r.output}};

  const double f = unit_factor(r.unit);
  std::vector<std::string> rows;
  for (const auto& row : report.rows)
    rows.push_back(row.sweep + ',' + std::to_string(row.n) + ',' + std::to_string(row.m) + ',' +
                   format_double(f * row.rmse) + ',' + std::to_string(row.trials));
  write_csv(resolve_output(r.output), resolved, "sweep,n,m,rmse,trials", rows);

  // Side-car summary: slopes and the oracle value behind the RMSE column.
  const std::string summary_path =
      resolve_output(r.output + ".summary.txt");
  Report summary(summary_path);
  summary.line("report", "rates");
  summary.line("unit", r.unit);
  summary.line("oracle_value", f * report.oracle_value);
  const auto emit = [&](const char* tag, const std::optional<SlopeFit>& fit) {
    if (!fit) return;
    summary.line(std::string(tag) + "_slope", fit->slope);
    summary.line(std::string(tag) + "_intercept", fit->intercept);
    summary.line(std::string(tag) + "_points_used", static_cast<std::int64_t>(fit->points_used));
    summary.line(std::string(tag) + "_excluded_smallest",
                 std::string(fit->excluded_smallest ? "true" : "false"));
  };
  emit("n", report.slope_n);
  emit("m", report.slope_m);
  emit("joint", report.slope_joint);
  summary.finish(resolved);
  return 0;
}

TrainConfig train_config_from_json(const json& cfg, const Resolved& r) {
  TrainConfig tc;
  tc.epochs = get_or<int>(cfg, "epochs", tc.epochs);
  tc.batch_size = get_or<int>(cfg, "batch_size", tc.batch_size);
  tc.learning_rate = get_or<double>(cfg, "learning_rate", tc.learning_rate);
  tc.hidden = get_or<int>(cfg, "hidden", tc.hidden);
  tc.resample_directions_per_batch =
      get_or<bool>(cfg, "resample_directions_per_batch", tc.resample_directions_per_batch);
  tc.fix_directions_to_one = get_or<bool>(cfg, "fix_directions_to_one", false);
  const std::string opt = get_or<std::string>(cfg, "optimizer", "adaptive_moment");
  if (opt == "adaptive_moment")
    tc.optimizer = TrainConfig::Optimizer::adaptive_moment;
  else if (opt == "plain_gradient")
    tc.optimizer = TrainConfig::Optimizer::plain_gradient;
  else
    throw config_error("optimizer must be \"adaptive_moment\" or \"plain_gradient\"");
  tc.seed = r.seed;
  return tc;
}

json train_config_to_json(const TrainConfig& tc, std::int64_t slices_per_batch) {
  return {{"epochs", tc.epochs},
          {"batch_size", tc.batch_size},
          {"learning_rate", tc.learning_rate},
          {"hidden", tc.hidden},
          {"resample_directions_per_batch", tc.resample_directions_per_batch},
          {"fix_directions_to_one", tc.fix_directions_to_one},
          {"optimizer", tc.optimizer == TrainConfig::Optimizer::adaptive_moment
                            ? "adaptive_moment"
                            : "plain_gradient"},
          {"slices_per_batch", slices_per_batch}};
}

void write_curve_csv(const std::string& path, const json& resolved,
                     const std::vector<double>& curve, double f) {
  std::vector<std::string> rows;
  for (std::size_t e = 0; e < curve.size(); ++e)
    rows.push_back(std::to_string(e + 1) + ',' + format_double(f * curve[e]));
  write_csv(path, resolved, "epoch,value", rows);
}

int cmd_smine(const GlobalArgs& g) {
  if (g.config_path.empty()) throw config_error("smine requires --config");
  json cfg = load_config_file(g.config_path);
  check_command_key(cfg, "smine");
  reject_unknown_keys(cfg,
                      {"command", "x", "y", "epochs", "batch_size", "learning_rate", "hidden",
                       "optimizer", "resample_directions_per_batch", "fix_directions_to_one",
                       "slices_per_batch", "seed", "unit", "output"},
                      "smine config");
  const Resolved r = resolve_common(cfg, g, "smine");
  const std::string x_path = require_string(cfg, "x", "smine config");
  const std::string y_path = require_string(cfg, "y", "smine config");
  const auto slices_per_batch = get_or<std::int64_t>(cfg, "slices_per_batch", 0);
  const TrainConfig tc = train_config_from_json(cfg, r);

  const SampleMatrix x = load_matrix_file(x_path);
  const SampleMatrix y = load_matrix_file(y_path);
  const TrainResult result = train_smine(x, y, tc, slices_per_batch);

  json resolved = train_config_to_json(tc, slices_per_batch);
  resolved["command"] = "smine";
  resolved["x"] = x_path;
  resolved["y"] = y_path;
  resolved["seed"] = r.seed;
  resolved["unit"] = r.unit;
  resolved["output"] = r.output;

  const double f = unit_factor(r.unit);
  const std::string model_path = resolve_output(r.output + "_model.txt");
  std::ofstream model_os = open_output(model_path);
  save_dv_model(model_os, result.model);
  model_os.flush();
  if (!model_os) throw input_error("failed writing output file: " + model_path);
  std::cout << "wrote " << model_path << '\n';

  write_curve_csv(resolve_output(r.output + "_curve.csv"), resolved, result.estimate_curve, f);

  Report report(resolve_output(r.output + "_report.txt"));
  report.line("report", "smine");
  report.line("unit", r.unit);
  report.line("n", static_cast<std::int64_t>(x.rows()));
  report.line("estimate", f * result.estimate);
  report.line("epochs", static_cast<std::int64_t>(result.estimate_curve.size()));
  report.finish(resolved);
  std::cout << "estimate " << format_double(f * result.estimate) << ' ' << r.unit << '\n';
  return 0;
}

int cmd_extract(const GlobalArgs& g) {
  if (g.config_path.empty()) throw config_error("extract requires --config");
  json cfg = load_config_file(g.config_path);
  check_command_key(cfg, "extract");
  reject_unknown_keys(cfg,
                      {"command", "x", "y", "r_x", "r_y", "epochs", "batch_size", "learning_rate",
                       "hidden", "optimizer", "resample_directions_per_batch",
                       "fix_directions_to_one", "slices_per_batch", "seed", "unit", "output"},
                      "extract config");
  const Resolved r = resolve_common(cfg, g, "extract");
  const std::string x_path = require_string(cfg, "x", "extract config");
  const std::string y_path = require_string(cfg, "y", "extract config");
  if (!cfg.contains("r_x")) throw config_error("missing required key \"r_x\" in extract config");
  const int r_x = get_or<int>(cfg, "r_x", 1);
  const int r_y = get_or<int>(cfg, "r_y", 0);
  const auto slices_per_batch = get_or<std::int64_t>(cfg, "slices_per_batch", 0);
  const TrainConfig tc = train_config_from_json(cfg, r);

  const SampleMatrix x = load_matrix_file(x_path);
  const SampleMatrix y = load_matrix_file(y_path);
  const FeatureExtraction result = feature_extract(x, y, r_x, r_y, tc, slices_per_batch);

  json resolved = train_config_to_json(tc, slices_per_batch);
  resolved["command"] = "extract";
  resolved["x"] = x_path;
  resolved["y"] = y_path;
  resolved["r_x"] = r_x;
  resolved["r_y"] = r_y;
  resolved["seed"] = r.seed;
  resolved["unit"] = r.unit;
  resolved["output"] = r.output;

  const std::string maps_path = resolve_output(r.output + "_maps.txt");
  std::ofstream maps_os = open_output(maps_path);
  save_feature_maps(maps_os, result.maps);
  maps_os.flush();
  if (!maps_os) throw input_error("failed writing output file: " + maps_path);
  std::cout << "wrote " << maps_path << '\n';

  // Heatmap-ready rows of the learned maps: plain numeric CSV, row per map row.
  const std::string ax_path = resolve_output(r.output + "_ax.csv");
  save_matrix_file(ax_path, result.maps.a_x, ',');
  std::cout << "wrote " << ax_path << '\n';
  if (r_y > 0) {
    const std::string ay_path = resolve_output(r.output + "_ay.csv");
    save_matrix_file(ay_path, result.maps.a_y, ',');
    std::cout << "wrote " << ay_path << '\n';
  }

  const double f = unit_factor(r.unit);
  write_curve_csv(resolve_output(r.output + "_curve.csv"), resolved, result.estimate_curve, f);

  Report report(resolve_output(r.output + "_report.txt"));
  report.line("report", "extract");
  report.line("unit", r.unit);
  report.line("n", static_cast<std::int64_t>(x.rows()));
  report.line("r_x", static_cast<std::int64_t>(r_x));
  report.line("r_y", static_cast<std::int64_t>(r_y));
  report.line("estimate", f * result.estimate);
  report.finish(resolved);
  std::cout << "estimate " << format_double(f * result.estimate) << ' ' << r.unit << '\n';
  return 0;
}

int cmd_gen(const GlobalArgs& g) {
  if (g.config_path.empty()) throw config_error("gen requires --config");
  json cfg = load_config_file(g.config_path);
  check_command_key(cfg, "gen");
  reject_unknown_keys(cfg,
                      {"command", "scenario", "d", "n", "d_total", "x_range", "y_range", "seed",
                       "output"},
                      "gen config");
  const Resolved r = resolve_common(cfg, g, "gen");
  const std::string scenario = require_string(cfg, "scenario", "gen config");
  const Scenario::Kind kind = scenario_kind_from_name(scenario);
  const auto n = get_or<std::int64_t>(cfg, "n", 0);
  if (n < 1) throw config_error("gen config needs n >= 1");

  Scenario sc;
  if (kind == Scenario::Kind::overlap) {
    if (!cfg.contains("d_total") || !cfg.contains("x_range") || !cfg.contains("y_range"))
      throw config_error("overlap scenario needs d_total, x_range, y_range");
    const auto xr = ints_from_json(cfg.at("x_range"), "x_range");
    const auto yr = ints_from_json(cfg.at("y_range"), "y_range");
    if (xr.size() != 2 || yr.size() != 2)
      throw config_error("x_range and y_range must be [lo, hi]");
    sc = Scenario::overlap(get_or<int>(cfg, "d_total", 0), xr[0], xr[1], yr[0], yr[1], n, r.seed);
  } else {
    if (!cfg.contains("d")) throw config_error("missing required key \"d\" in gen config");
    sc = Scenario::of(kind, get_or<int>(cfg, "d", 0), n, r.seed);
  }

  const DataSet data = generate(sc);

  json resolved = {{"command", "gen"}, {"scenario", scenario}, {"n", n},
                   {"seed", r.seed},   {"output", r.output}};
  if (kind == Scenario::Kind::overlap) {
    resolved["d_total"] = sc.d_total;
    resolved["x_range"] = {sc.x_lo, sc.x_hi};
    resolved["y_range"] = {sc.y_lo, sc.y_hi};
  } else {
    resolved["d"] = sc.d;
  }

  const std::string x_path = resolve_output(r.output + "_x.csv");
  const std::string y_path = resolve_output(r.output + "_y.csv");
  save_matrix_file(x_path, data.x, ',');
  save_matrix_file(y_path, data.y, ',');
  std::cout << "wrote " << x_path << '\n' << "wrote " << y_path << '\n';

  Report report(resolve_output(r.output + "_report.txt"));
  report.line("report", "gen");
  report.line("n", static_cast<std::int64_t>(data.x.rows()));
  report.line("d_x", static_cast<std::int64_t>(data.x.cols()));
  report.line("d_y", static_cast<std::int64_t>(data.y.cols()));
  report.line("x", x_path);
  report.line("y", y_path);
  report.finish(resolved);
  return 0;
}

int dispatch(const std::string& name, const GlobalArgs& g, const std::string& x_pos,
             const std::string& y_pos) {
  if (name == "estimate") return cmd_estimate(g, x_pos, y_pos);
  if (name == "oracle") return cmd_oracle(g);
  if (name == "indep") return cmd_indep(g);
  if (name == "rates") return cmd_rates(g);
  if (name == "smine") return cmd_smine(g);
  if (name == "extract") return cmd_extract(g);
  if (name == "gen") return cmd_gen(g);
  throw config_error("unknown subcommand: " + name);
}

}  // namespace slicedmi::cli

int main(int argc, char** argv) {
  using namespace slicedmi;
  using namespace slicedmi::cli;

  CLI::App app{"sliced mutual information toolkit"};
  app.require_subcommand(1);

  GlobalArgs g;
  std::string x_pos, y_pos;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", g.config_path, "JSON config file");
    sub->add_option("--seed", g.seed, "random seed (overrides config)")
        ->each([&](const std::string&) { g.seed_given = true; });
    sub->add_option("--threads", g.threads, "worker threads, 0 = hardware (overrides config)")
        ->each([&](const std::string&) { g.threads_given = true; });
    sub->add_option("--unit", g.unit, "output unit: nats or bits (overrides config)")
        ->each([&](const std::string&) { g.unit_given = true; });
    sub->add_option("--output", g.output, "output path or path base (overrides config)")
        ->each([&](const std::string&) { g.output_given = true; });
  };

  CLI::App* est = app.add_subcommand("estimate", "sliced MI of two sample files");
  est->add_option("x", x_pos, "X samples (delimited text, row per sample)");
  est->add_option("y", y_pos, "Y samples");
  add_common(est);
  add_common(app.add_subcommand("oracle", "Monte-Carlo SMI for a Gaussian spec"));
  add_common(app.add_subcommand("indep", "independence-test AUC sweep"));
  add_common(app.add_subcommand("rates", "convergence-rate RMSE sweeps"));
  add_common(app.add_subcommand("smine", "variational sliced MI training"));
  add_common(app.add_subcommand("extract", "linear feature extraction"));
  add_common(app.add_subcommand("gen", "write synthetic scenario data"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), g, x_pos, y_pos);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 4;
  } catch (const invalid_spec_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 4;
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const slicedmi::error& e) {
    std::cerr << "estimator error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
