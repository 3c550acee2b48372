#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hrstat/hr.hpp"
#include "hrstat/io.hpp"
#include "hrstat/location_test.hpp"
#include "hrstat/qda.hpp"
#include "hrstat/simlab.hpp"

namespace {

using hrstat::ContractViolation;
using hrstat::Index;
using hrstat::Matrix;
using hrstat::ParseError;
using hrstat::Vector;
using nlohmann::ordered_json;

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    hrstat::write_text(out_path, text);
  }
}

void require_format(const std::string& format, const char* command,
                    bool allow_csv) {
  if (format == "json") return;
  if (format == "csv" && allow_csv) return;
  throw ContractViolation(std::string(command) + ": unsupported --format '" +
                          format + "'");
}

std::vector<hrstat::Method> parse_method_list(const std::string& spec) {
  if (spec == "all") return hrstat::default_methods();
  std::vector<hrstat::Method> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t pos = spec.find(',', start);
    if (pos == std::string::npos) pos = spec.size();
    const std::string token = spec.substr(start, pos - start);
    if (!token.empty()) out.push_back(hrstat::parse_method(token));
    start = pos + 1;
  }
  if (out.empty()) throw ContractViolation("no test methods given");
  return out;
}

ordered_json matrix_rows(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

ordered_json vector_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOpts {
  std::string input, out, format = "json";
  bool has_header = false;
  int bandwidth = 3;
  double lambda_c1 = 1.0, lambda_c2 = 0.5;
  double lambda = -1.0;
};

int run_estimate(const EstimateOpts& o) {
  require_format(o.format, "estimate", false);
  hrstat::CsvData data = hrstat::load_csv(o.input, o.has_header);
  hrstat::HrConfig cfg;
  cfg.bandwidth = o.bandwidth;
  cfg.lambda = o.lambda;
  cfg.lambda_c1 = o.lambda_c1;
  cfg.lambda_c2 = o.lambda_c2;
  hrstat::HrEstimate est = hrstat::hr_estimate(data.X, cfg);

  ordered_json j;
  j["config"] = ordered_json{{"command", "estimate"},
                             {"input", o.input},
                             {"has_header", o.has_header},
                             {"bandwidth", o.bandwidth},
                             {"lambda_c1", o.lambda_c1},
                             {"lambda_c2", o.lambda_c2}};
  if (o.lambda >= 0) j["config"]["lambda"] = o.lambda;
  j["n"] = data.X.rows();
  j["p"] = data.X.cols();
  j["converged"] = est.converged;
  j["iterations"] = est.iterations;
  j["bandwidth"] = est.bandwidth;
  j["mu"] = vector_json(est.mu);
  j["sigma"] = matrix_rows(est.sigma.mat());
  j["omega"] = matrix_rows(est.omega.mat());
  j["diagnostics"] =
      ordered_json{{"final_rel_dmu", est.diag.final_rel_dmu},
                   {"final_rel_dsigma", est.diag.final_rel_dsigma},
                   {"psd_projections", est.diag.psd_projections},
                   {"sglasso_kkt", est.diag.sglasso_kkt},
                   {"sglasso_sweeps", est.diag.sglasso_sweeps},
                   {"mean_sign_norm", est.diag.mean_sign_norms.empty()
                                          ? 0.0
                                          : est.diag.mean_sign_norms.back()}};
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// test

struct TestOpts {
  std::string input, method = "all", out, format = "json";
  bool has_header = false;
  double alpha = 0.05;
  int boot_m = 50;
  std::uint64_t seed = 20240501;
  int bandwidth = 3;
  double lambda_c1 = 1.0, lambda_c2 = 0.5;
  double lambda = -1.0;
};

int run_test(const TestOpts& o) {
  require_format(o.format, "test", false);
  hrstat::CsvData data = hrstat::load_csv(o.input, o.has_header);
  const std::vector<hrstat::Method> methods = parse_method_list(o.method);

  hrstat::TestConfig cfg;
  cfg.alpha = o.alpha;
  cfg.seed = o.seed;
  if (o.boot_m == 0) {
    cfg.calibration = hrstat::Calibration::Asymptotic;
  } else {
    cfg.calibration = hrstat::Calibration::Bootstrap;
    cfg.boot_m = o.boot_m;
  }
  cfg.hr.bandwidth = o.bandwidth;
  cfg.hr.lambda = o.lambda;
  cfg.hr.lambda_c1 = o.lambda_c1;
  cfg.hr.lambda_c2 = o.lambda_c2;

  auto reports = hrstat::multi_test(data.X, methods, cfg);

  ordered_json j;
  j["config"] = ordered_json{
      {"command", "test"},
      {"input", o.input},
      {"has_header", o.has_header},
      {"method", o.method},
      {"alpha", o.alpha},
      {"calibration", hrstat::calibration_name(cfg.calibration)},
      {"boot_m", o.boot_m},
      {"seed", o.seed},
      {"bandwidth", o.bandwidth},
      {"lambda_c1", o.lambda_c1},
      {"lambda_c2", o.lambda_c2}};
  if (o.lambda >= 0) j["config"]["lambda"] = o.lambda;
  j["n"] = data.X.rows();
  j["p"] = data.X.cols();
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json jr;
    jr["method"] = hrstat::method_name(r.method);
    jr["statistic"] = r.statistic;
    jr["p_value"] = r.p_value;
    jr["calibration"] = hrstat::calibration_name(r.calibration);
    if (r.boot_mean) jr["boot_mean"] = *r.boot_mean;
    if (r.boot_sd) jr["boot_sd"] = *r.boot_sd;
    if (r.alpha_reject) jr["reject"] = *r.alpha_reject;
    if (r.clamp_warnings > 0) jr["clamp_warnings"] = r.clamp_warnings;
    arr.push_back(std::move(jr));
  }
  j["reports"] = std::move(arr);
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// qda

struct QdaTrainOpts {
  std::string input, out, format = "json";
  bool has_header = false;
  bool labels = false;
  int cv_folds = 0;
  int bandwidth = 3;
  double lambda_c1 = 1.0, lambda_c2 = 0.5;
  double lambda = -1.0;
};

std::pair<Matrix, Matrix> split_by_label(const Matrix& X,
                                         const std::vector<int>& labels) {
  Index n1 = 0, n2 = 0;
  for (int l : labels) (l == 1 ? n1 : n2)++;
  if (n1 == 0 || n2 == 0) {
    throw hrstat::DegenerateDataError(
        "training data must contain both classes");
  }
  Matrix X1(n1, X.cols()), X2(n2, X.cols());
  Index r1 = 0, r2 = 0;
  for (Index i = 0; i < X.rows(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == 1) {
      X1.row(r1++) = X.row(i);
    } else {
      X2.row(r2++) = X.row(i);
    }
  }
  return {std::move(X1), std::move(X2)};
}

int run_qda_train(const QdaTrainOpts& o) {
  require_format(o.format, "qda-train", false);
  if (!o.labels) {
    throw ContractViolation(
        "qda-train needs --labels (last input column holds the class)");
  }
  hrstat::CsvData data = hrstat::load_csv(o.input, o.has_header, true);
  auto [X1, X2] = split_by_label(data.X, data.labels);

  hrstat::QdaConfig cfg;
  cfg.cv_folds = o.cv_folds;
  cfg.hr.bandwidth = o.bandwidth;
  cfg.hr.lambda = o.lambda;
  cfg.hr.lambda_c1 = o.lambda_c1;
  cfg.hr.lambda_c2 = o.lambda_c2;
  hrstat::QdaModel model = hrstat::hrqda_train(X1, X2, cfg);

  ordered_json j = ordered_json::parse(hrstat::qda_model_to_json(model));
  j["config"] = ordered_json{{"command", "qda-train"},
                             {"input", o.input},
                             {"has_header", o.has_header},
                             {"cv_folds", o.cv_folds},
                             {"bandwidth", o.bandwidth},
                             {"lambda_c1", o.lambda_c1},
                             {"lambda_c2", o.lambda_c2},
                             {"n1", X1.rows()},
                             {"n2", X2.rows()}};
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

struct QdaPredictOpts {
  std::string model_path, input, out, format = "json";
  bool has_header = false;
  bool labels = false;
};

int run_qda_predict(const QdaPredictOpts& o) {
  require_format(o.format, "qda-predict", false);
  hrstat::QdaModel model =
      hrstat::qda_model_from_json(hrstat::read_text(o.model_path));
  hrstat::CsvData data = hrstat::load_csv(o.input, o.has_header, o.labels);
  std::vector<int> predicted = hrstat::classify(model, data.X);

  ordered_json j;
  j["config"] = ordered_json{{"command", "qda-predict"},
                             {"model", o.model_path},
                             {"input", o.input},
                             {"has_header", o.has_header},
                             {"labels", o.labels}};
  j["n"] = data.X.rows();
  j["p"] = data.X.cols();
  j["c_hat"] = model.c_hat;
  j["predictions"] = predicted;
  if (o.labels) {
    hrstat::ConfusionCounts counts =
        hrstat::confusion_counts(data.labels, predicted);
    hrstat::Metrics m = hrstat::metrics(counts);
    j["confusion"] = ordered_json{
        {"tp", counts.tp}, {"tn", counts.tn}, {"fp", counts.fp}, {"fn", counts.fn}};
    j["metrics"] = ordered_json{{"acc", m.acc},
                                {"spec", m.spec},
                                {"sens", m.sens},
                                {"mcc", m.mcc},
                                {"degenerate", m.degenerate}};
  }
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

// Flat "key = value" config; '#' starts a comment line.
std::map<std::string, std::string> parse_kv_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::size_t start = 0;
  std::size_t row = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
  };
  while (start <= text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string::npos) pos = text.size();
    ++row;
    std::string line = trim(text.substr(start, pos - start));
    start = pos + 1;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value'", row);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", row);
    kv[key] = value;
  }
  return kv;
}

// Consumes keys as they are read so leftovers can be reported as typos.
class KvConfig {
 public:
  explicit KvConfig(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string take_str(const std::string& key, const std::string& fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }

  long take_int(const std::string& key, long fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    char* end = nullptr;
    const long v = std::strtol(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0') {
      throw ContractViolation("config: '" + key + "' is not an integer: " +
                              it->second);
    }
    kv_.erase(it);
    return v;
  }

  double take_num(const std::string& key, double fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0') {
      throw ContractViolation("config: '" + key + "' is not a number: " +
                              it->second);
    }
    kv_.erase(it);
    return v;
  }

  void finish() const {
    if (kv_.empty()) return;
    std::string keys;
    for (const auto& [k, v] : kv_) {
      if (!keys.empty()) keys += ", ";
      keys += k;
    }
    throw ContractViolation("config: unknown keys: " + keys);
  }

 private:
  std::map<std::string, std::string> kv_;
};

std::vector<Index> parse_index_list(const std::string& spec, const char* what) {
  std::vector<Index> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t pos = spec.find(',', start);
    if (pos == std::string::npos) pos = spec.size();
    const std::string token = spec.substr(start, pos - start);
    start = pos + 1;
    if (token.empty()) continue;
    char* end = nullptr;
    const long v = std::strtol(token.c_str(), &end, 10);
    if (end == token.c_str() || *end != '\0') {
      throw ContractViolation(std::string(what) + ": bad entry '" + token + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ContractViolation(std::string(what) + ": empty list");
  return out;
}

std::map<std::string, std::string> preset_kv(const std::string& name) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= name.size()) {
    std::size_t pos = name.find('-', start);
    if (pos == std::string::npos) pos = name.size();
    tokens.push_back(name.substr(start, pos - start));
    start = pos + 1;
  }
  if (tokens.empty()) throw ContractViolation("empty preset name");

  std::map<std::string, std::string> kv;
  const std::string& head = tokens[0];
  if (head == "table1") {
    kv["experiment"] = "size";
    kv["n"] = "100";
    kv["reps"] = "1000";
    kv["calibration"] = "bootstrap";
    kv["boot_m"] = "50";
  } else if (head == "table2") {
    kv["experiment"] = "qda";
    kv["n1"] = "100";
    kv["n2"] = "100";
    kv["reps"] = "50";
  } else if (head == "fig1") {
    kv["experiment"] = "power";
    kv["n"] = "100";
    kv["reps"] = "300";
    kv["n_null"] = "2000";
  } else {
    throw ContractViolation("unknown preset family: " + head);
  }

  std::string dist;
  long p = 120;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t.rfind("model", 0) == 0 && t.size() > 5) {
      kv["model"] = t.substr(5);
    } else if (t == "normal" || t == "t3" || t == "mixture") {
      dist = t;
    } else if (t.size() > 1 && t[0] == 'p' &&
               t.find_first_not_of("0123456789", 1) == std::string::npos) {
      kv["p"] = t.substr(1);
      p = std::strtol(t.c_str() + 1, nullptr, 10);
    } else {
      throw ContractViolation("unknown preset token: " + t);
    }
  }
  if (kv.count("model") == 0) throw ContractViolation("preset needs a model token");
  if (dist.empty()) throw ContractViolation("preset needs a distribution token");
  kv["dist"] = dist;

  if (head == "fig1") {
    // Signal strengths matched to the heavy-tailedness of each family.
    kv["kappa"] = dist == "normal" ? "2" : (dist == "t3" ? "1.5" : "0.6");
    std::string grid;
    for (long s : {1L, 2L, 5L, 10L, 30L, 60L, 90L}) {
      if (s >= p) break;
      if (!grid.empty()) grid += ",";
      grid += std::to_string(s);
    }
    grid += (grid.empty() ? "" : ",") + std::to_string(p);
    kv["s_grid"] = grid;
  }
  return kv;
}

struct SimulateOpts {
  std::string preset, config_path, out, format = "csv";
  // Negative/zero sentinels mean "not given on the command line".
  long reps = -1;
  double alpha = -1.0;
  int boot_m = -1;
  long seed = -1;
  int bandwidth = -1;
  double lambda_c1 = -1.0, lambda_c2 = -1.0;
  int threads = 0;
};

hrstat::TestConfig test_config_from(KvConfig& kv, const std::string& default_cal) {
  hrstat::TestConfig tc;
  const std::string cal = kv.take_str("calibration", default_cal);
  if (cal == "bootstrap") {
    tc.calibration = hrstat::Calibration::Bootstrap;
  } else if (cal == "asymptotic") {
    tc.calibration = hrstat::Calibration::Asymptotic;
  } else {
    throw ContractViolation("config: calibration must be bootstrap or asymptotic");
  }
  tc.boot_m = static_cast<int>(kv.take_int("boot_m", 50));
  if (tc.boot_m == 0) tc.calibration = hrstat::Calibration::Asymptotic;
  tc.hr.bandwidth = static_cast<int>(kv.take_int("bandwidth", 3));
  tc.hr.lambda = kv.take_num("lambda", -1.0);
  tc.hr.lambda_c1 = kv.take_num("lambda_c1", 1.0);
  tc.hr.lambda_c2 = kv.take_num("lambda_c2", 0.5);
  tc.hr.tol = kv.take_num("tol", 1e-4);
  return tc;
}

int run_simulate(const SimulateOpts& o) {
  require_format(o.format, "simulate", true);
  if (!o.preset.empty() && !o.config_path.empty()) {
    throw ContractViolation("simulate: --preset and --config are exclusive");
  }
  std::map<std::string, std::string> raw;
  if (!o.preset.empty()) {
    raw = preset_kv(o.preset);
  } else if (!o.config_path.empty()) {
    raw = parse_kv_text(hrstat::read_text(o.config_path));
  } else {
    throw ContractViolation("simulate needs --preset or --config");
  }
  // Command-line overrides beat the preset/config values.
  if (o.reps >= 0) raw["reps"] = std::to_string(o.reps);
  if (o.alpha >= 0) raw["alpha"] = hrstat::format_double(o.alpha);
  if (o.boot_m >= 0) raw["boot_m"] = std::to_string(o.boot_m);
  if (o.seed >= 0) raw["seed"] = std::to_string(o.seed);
  if (o.bandwidth >= 0) raw["bandwidth"] = std::to_string(o.bandwidth);
  if (o.lambda_c1 >= 0) raw["lambda_c1"] = hrstat::format_double(o.lambda_c1);
  if (o.lambda_c2 >= 0) raw["lambda_c2"] = hrstat::format_double(o.lambda_c2);
  if (o.threads > 0) raw["threads"] = std::to_string(o.threads);

  KvConfig kv(std::move(raw));
  const std::string experiment = kv.take_str("experiment", "");
  if (experiment.empty()) {
    throw ContractViolation("config: missing 'experiment' (size, power, qda)");
  }

  hrstat::SimReport report;
  if (experiment == "size") {
    hrstat::SizeExperimentConfig cfg;
    cfg.dist = hrstat::make_dist(kv.take_str("dist", "normal"));
    cfg.cov_model.id = hrstat::parse_cov_model(kv.take_str("model", "I"));
    cfg.cov_model.p = kv.take_int("p", 120);
    cfg.n = kv.take_int("n", 100);
    cfg.alpha = kv.take_num("alpha", 0.05);
    cfg.n_reps = static_cast<int>(kv.take_int("reps", 1000));
    cfg.methods = parse_method_list(kv.take_str("methods", "all"));
    cfg.test = test_config_from(kv, "bootstrap");
    cfg.seed = static_cast<std::uint64_t>(kv.take_int("seed", 20240501));
    cfg.threads = static_cast<int>(kv.take_int("threads", 0));
    kv.finish();
    report = hrstat::size_experiment(cfg);
  } else if (experiment == "power") {
    hrstat::PowerExperimentConfig cfg;
    cfg.dist = hrstat::make_dist(kv.take_str("dist", "normal"));
    cfg.cov_model.id = hrstat::parse_cov_model(kv.take_str("model", "II"));
    cfg.cov_model.p = kv.take_int("p", 120);
    cfg.n = kv.take_int("n", 100);
    cfg.alpha = kv.take_num("alpha", 0.05);
    cfg.kappa = kv.take_num("kappa", 1.5);
    cfg.s_grid = parse_index_list(kv.take_str("s_grid", "1"), "s_grid");
    cfg.n_reps = static_cast<int>(kv.take_int("reps", 300));
    cfg.n_null = static_cast<int>(kv.take_int("n_null", 2000));
    cfg.methods = parse_method_list(kv.take_str("methods", "all"));
    cfg.test = test_config_from(kv, "asymptotic");
    cfg.seed = static_cast<std::uint64_t>(kv.take_int("seed", 20240501));
    cfg.threads = static_cast<int>(kv.take_int("threads", 0));
    kv.finish();
    report = hrstat::power_experiment(cfg);
  } else if (experiment == "qda") {
    hrstat::QdaExperimentConfig cfg;
    cfg.dist = hrstat::make_dist(kv.take_str("dist", "normal"));
    cfg.model = hrstat::parse_cov_model(kv.take_str("model", "QI"));
    cfg.p = kv.take_int("p", 120);
    cfg.n1 = kv.take_int("n1", 100);
    cfg.n2 = kv.take_int("n2", 100);
    cfg.n_reps = static_cast<int>(kv.take_int("reps", 50));
    cfg.mu1 = Vector::Constant(cfg.p, kv.take_num("mu1_const", 0.0));
    cfg.mu2 = Vector::Constant(cfg.p, kv.take_num("mu2_const", 0.1));
    cfg.qda.cv_folds = static_cast<int>(kv.take_int("cv_folds", 0));
    cfg.qda.hr.bandwidth = static_cast<int>(kv.take_int("bandwidth", 3));
    cfg.qda.hr.lambda = kv.take_num("lambda", -1.0);
    cfg.qda.hr.lambda_c1 = kv.take_num("lambda_c1", 1.0);
    cfg.qda.hr.lambda_c2 = kv.take_num("lambda_c2", 0.5);
    cfg.seed = static_cast<std::uint64_t>(kv.take_int("seed", 20240501));
    cfg.threads = static_cast<int>(kv.take_int("threads", 0));
    kv.finish();
    report = hrstat::qda_experiment(cfg);
  } else {
    throw ContractViolation("config: unknown experiment '" + experiment + "'");
  }

  emit(o.out, o.format == "csv" ? hrstat::report_to_csv(report)
                                : hrstat::report_to_json(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust high-dimensional location/scatter estimation, "
               "spatial-sign location tests, and quadratic discriminant "
               "classification"};
  app.set_version_flag("--version", "hrstat 0.1.0");
  app.require_subcommand(1);

  EstimateOpts eo;
  auto* est = app.add_subcommand("estimate",
                                 "Location and scatter estimate from a CSV sample");
  est->add_option("--input", eo.input, "input CSV, one row per observation")->required();
  est->add_flag("--has-header", eo.has_header, "skip the first input line");
  est->add_option("--bandwidth", eo.bandwidth, "banding half-width h");
  est->add_option("--lambda-c1", eo.lambda_c1, "penalty rate constant c1");
  est->add_option("--lambda-c2", eo.lambda_c2, "penalty rate constant c2");
  est->add_option("--lambda", eo.lambda, "fixed penalty (overrides c1/c2)");
  est->add_option("--out", eo.out, "output path (default: stdout)");
  est->add_option("--format", eo.format, "output format: json");

  TestOpts to;
  auto* tst = app.add_subcommand("test", "One-sample location tests");
  tst->add_option("--input", to.input, "input CSV")->required();
  tst->add_flag("--has-header", to.has_header, "skip the first input line");
  tst->add_option("--method", to.method,
                  "comma list of max,sum,max2,sum2,cc1,cc2,cc3 or 'all'");
  tst->add_option("--alpha", to.alpha, "test level");
  tst->add_option("--boot-m", to.boot_m,
                  "bootstrap replicates (0 = asymptotic calibration)");
  tst->add_option("--seed", to.seed, "bootstrap seed");
  tst->add_option("--bandwidth", to.bandwidth, "banding half-width h");
  tst->add_option("--lambda-c1", to.lambda_c1, "penalty rate constant c1");
  tst->add_option("--lambda-c2", to.lambda_c2, "penalty rate constant c2");
  tst->add_option("--lambda", to.lambda, "fixed penalty (overrides c1/c2)");
  tst->add_option("--out", to.out, "output path (default: stdout)");
  tst->add_option("--format", to.format, "output format: json");

  QdaTrainOpts qo;
  auto* qtr = app.add_subcommand("qda-train", "Train the quadratic classifier");
  qtr->add_option("--input", qo.input, "training CSV")->required();
  qtr->add_flag("--labels", qo.labels,
                "last input column holds the class labels (1/2)");
  qtr->add_flag("--has-header", qo.has_header, "skip the first input line");
  qtr->add_option("--cv-folds", qo.cv_folds,
                  "cutoff tuning folds (0 = training error)");
  qtr->add_option("--bandwidth", qo.bandwidth, "banding half-width h");
  qtr->add_option("--lambda-c1", qo.lambda_c1, "penalty rate constant c1");
  qtr->add_option("--lambda-c2", qo.lambda_c2, "penalty rate constant c2");
  qtr->add_option("--lambda", qo.lambda, "fixed penalty (overrides c1/c2)");
  qtr->add_option("--out", qo.out, "model output path (default: stdout)");
  qtr->add_option("--format", qo.format, "output format: json");

  QdaPredictOpts po;
  auto* qpr = app.add_subcommand("qda-predict", "Classify rows with a saved model");
  qpr->add_option("model", po.model_path, "model JSON from qda-train")->required();
  qpr->add_option("--input", po.input, "CSV of query rows")->required();
  qpr->add_flag("--labels", po.labels,
                "last input column holds true labels; adds metrics");
  qpr->add_flag("--has-header", po.has_header, "skip the first input line");
  qpr->add_option("--out", po.out, "output path (default: stdout)");
  qpr->add_option("--format", po.format, "output format: json");

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo experiments");
  sim->add_option("--preset", so.preset,
                  "table1-model<I..IV>-<dist>-p<dim>, table2-model<QI..QIII>-"
                  "<dist>-p<dim>, fig1-model<I..IV>-<dist>-p<dim>");
  sim->add_option("--config", so.config_path, "key = value experiment file");
  sim->add_option("--reps", so.reps, "replication count override");
  sim->add_option("--alpha", so.alpha, "test level override");
  sim->add_option("--boot-m", so.boot_m, "bootstrap replicates override");
  sim->add_option("--seed", so.seed, "seed override");
  sim->add_option("--bandwidth", so.bandwidth, "banding half-width override");
  sim->add_option("--lambda-c1", so.lambda_c1, "penalty constant override");
  sim->add_option("--lambda-c2", so.lambda_c2, "penalty constant override");
  sim->add_option("--threads", so.threads, "worker threads (HRSTAT_THREADS env fallback)");
  sim->add_option("--out", so.out, "output path (default: stdout)");
  sim->add_option("--format", so.format, "output format: csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (app.got_subcommand(est)) return run_estimate(eo);
    if (app.got_subcommand(tst)) return run_test(to);
    if (app.got_subcommand(qtr)) return run_qda_train(qo);
    if (app.got_subcommand(qpr)) return run_qda_predict(po);
    if (app.got_subcommand(sim)) return run_simulate(so);
    std::cerr << "error: no command\n";
    return 3;
  } catch (const hrstat::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hrstat::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hrstat::DegenerateDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hrstat::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const hrstat::ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const hrstat::NoConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hrstat::SingularMatrixError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hrstat::CalibrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hrstat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
