#include "hrstat/qda.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "json.hpp"

namespace hrstat {

double trace_hat(const Matrix& X) {
  const Index n = X.rows();
  if (n < 2) throw ContractViolation("trace_hat: need n >= 2");
  double sum_sq = 0.0;
  for (Index i = 0; i < n; ++i) sum_sq += X.row(i).squaredNorm();
  const double nd = static_cast<double>(n);
  const Vector xbar = X.colwise().mean();
  const double t = sum_sq / (nd - 1.0) - nd / (nd - 1.0) * xbar.squaredNorm();
  return std::max(t, 1e-12);
}

std::vector<double> default_c_grid() {
  std::vector<double> grid(41);
  for (int i = 0; i < 41; ++i) grid[i] = 0.05 * i;
  return grid;
}

namespace {

double delta_sq(const Vector& mu1, const Vector& mu2, const Matrix& ot1,
                const Matrix& ot2, const Vector& x) {
  const Vector d1 = x - mu1;
  const Vector d2 = x - mu2;
  return d2.dot(ot2 * d2) - d1.dot(ot1 * d1);
}

std::vector<double> delta_sq_rows(const Vector& mu1, const Vector& mu2,
                                  const Matrix& ot1, const Matrix& ot2,
                                  const Matrix& X) {
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) {
    out[static_cast<std::size_t>(i)] =
        delta_sq(mu1, mu2, ot1, ot2, X.row(i).transpose());
  }
  return out;
}

// Misclassification count of the rule Δ̂² ≥ c·ς̂ over precomputed
// training discriminants (d1 from class 1, d2 from class 2).
long errors_at(const std::vector<double>& d1, const std::vector<double>& d2,
               double threshold) {
  long err = 0;
  for (double d : d1) {
    if (!(d >= threshold)) ++err;
  }
  for (double d : d2) {
    if (d >= threshold) ++err;
  }
  return err;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ContractViolation("estimate_c: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0) throw ContractViolation("estimate_c: negative grid value");
    if (i > 0 && grid[i] < grid[i - 1]) {
      throw ContractViolation("estimate_c: grid must be sorted ascending");
    }
  }
}

struct ClassFit {
  HrEstimate est;
  double trace = 0.0;
};

ClassFit fit_class(const Matrix& X, const HrConfig& hr, int which) {
  try {
    ClassFit out;
    out.est = hr_estimate(X, hr);
    out.trace = trace_hat(X);
    return out;
  } catch (const DegenerateDataError& e) {
    throw DegenerateDataError("class " + std::to_string(which) + ": " + e.what());
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError("class " + std::to_string(which) + ": " + e.what());
  }
}

SpdMatrix scaled_spd(const SpdMatrix& m, double s) {
  SymEigen eig = m.eigen();
  eig.values *= s;
  return SpdMatrix::from_eigen(std::move(eig));
}

Matrix rows_where(const Matrix& X, int folds, int fold, bool held_out) {
  const Index n = X.rows();
  Index count = 0;
  for (Index i = 0; i < n; ++i) {
    if ((i % folds == fold) == held_out) ++count;
  }
  Matrix out(count, X.cols());
  Index r = 0;
  for (Index i = 0; i < n; ++i) {
    if ((i % folds == fold) == held_out) out.row(r++) = X.row(i);
  }
  return out;
}

double cv_estimate_c(const Matrix& X1, const Matrix& X2,
                     const QdaConfig& config,
                     const std::vector<double>& grid) {
  const int k = config.cv_folds;
  if (X1.rows() < k || X2.rows() < k) {
    throw ContractViolation("hrqda_train: fewer rows than CV folds");
  }
  const Index p = X1.cols();
  std::vector<long> total(grid.size(), 0);
  for (int fold = 0; fold < k; ++fold) {
    Matrix tr1 = rows_where(X1, k, fold, false);
    Matrix tr2 = rows_where(X2, k, fold, false);
    Matrix ho1 = rows_where(X1, k, fold, true);
    Matrix ho2 = rows_where(X2, k, fold, true);
    ClassFit f1 = fit_class(tr1, config.hr, 1);
    ClassFit f2 = fit_class(tr2, config.hr, 2);
    SpdMatrix ot1 = scaled_spd(f1.est.omega, static_cast<double>(p) / f1.trace);
    SpdMatrix ot2 = scaled_spd(f2.est.omega, static_cast<double>(p) / f2.trace);
    const double varsigma = ot2.log_det() - ot1.log_det();
    std::vector<double> d1 =
        delta_sq_rows(f1.est.mu, f2.est.mu, ot1.mat(), ot2.mat(), ho1);
    std::vector<double> d2 =
        delta_sq_rows(f1.est.mu, f2.est.mu, ot1.mat(), ot2.mat(), ho2);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      total[g] += errors_at(d1, d2, grid[g] * varsigma);
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (total[g] < total[best]) best = g;
  }
  return grid[best];
}

}  // namespace

double estimate_c(const Vector& mu1, const Vector& mu2,
                  const Matrix& omega_tilde1, const Matrix& omega_tilde2,
                  double logdet_ratio, const Matrix& X1, const Matrix& X2,
                  const std::vector<double>& grid) {
  check_grid(grid);
  std::vector<double> d1 = delta_sq_rows(mu1, mu2, omega_tilde1, omega_tilde2, X1);
  std::vector<double> d2 = delta_sq_rows(mu1, mu2, omega_tilde1, omega_tilde2, X2);
  std::size_t best = 0;
  long best_err = errors_at(d1, d2, grid[0] * logdet_ratio);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const long err = errors_at(d1, d2, grid[g] * logdet_ratio);
    if (err < best_err) {
      best_err = err;
      best = g;
    }
  }
  return grid[best];
}

QdaModel hrqda_train(const Matrix& X1, const Matrix& X2,
                     const QdaConfig& config) {
  if (X1.cols() != X2.cols()) {
    throw DimensionError("hrqda_train: classes have different dimensions");
  }
  if (X1.rows() < 3 || X2.rows() < 3) {
    throw ContractViolation("hrqda_train: need n >= 3 per class");
  }
  const Index p = X1.cols();
  const std::vector<double> grid =
      config.c_grid.empty() ? default_c_grid() : config.c_grid;
  check_grid(grid);

  ClassFit f1 = fit_class(X1, config.hr, 1);
  ClassFit f2 = fit_class(X2, config.hr, 2);

  QdaModel model;
  model.mu1 = f1.est.mu;
  model.mu2 = f2.est.mu;
  model.omega_tilde1 = scaled_spd(f1.est.omega, static_cast<double>(p) / f1.trace);
  model.omega_tilde2 = scaled_spd(f2.est.omega, static_cast<double>(p) / f2.trace);
  model.logdet_ratio =
      model.omega_tilde2.log_det() - model.omega_tilde1.log_det();

  if (config.cv_folds == 0) {
    model.c_hat = estimate_c(model.mu1, model.mu2, model.omega_tilde1.mat(),
                             model.omega_tilde2.mat(), model.logdet_ratio, X1,
                             X2, grid);
    model.train_diag.c_method = "grid";
  } else if (config.cv_folds >= 2) {
    model.c_hat = cv_estimate_c(X1, X2, config, grid);
    model.train_diag.c_method = "cv" + std::to_string(config.cv_folds);
  } else {
    throw ContractViolation("hrqda_train: cv_folds must be 0 or >= 2");
  }

  model.train_diag.iterations1 = f1.est.iterations;
  model.train_diag.iterations2 = f2.est.iterations;
  model.train_diag.converged1 = f1.est.converged;
  model.train_diag.converged2 = f2.est.converged;
  {
    std::vector<double> d1 = delta_sq_rows(model.mu1, model.mu2,
                                           model.omega_tilde1.mat(),
                                           model.omega_tilde2.mat(), X1);
    std::vector<double> d2 = delta_sq_rows(model.mu1, model.mu2,
                                           model.omega_tilde1.mat(),
                                           model.omega_tilde2.mat(), X2);
    const double th = model.c_hat * model.logdet_ratio;
    long e1 = 0, e2 = 0;
    for (double d : d1) {
      if (!(d >= th)) ++e1;
    }
    for (double d : d2) {
      if (d >= th) ++e2;
    }
    model.train_diag.train_error =
        0.5 * (static_cast<double>(e1) / static_cast<double>(X1.rows()) +
               static_cast<double>(e2) / static_cast<double>(X2.rows()));
  }
  return model;
}

double discriminant(const QdaModel& model, const Vector& x) {
  if (x.size() != model.mu1.size()) {
    throw DimensionError("discriminant: query dimension mismatch");
  }
  return delta_sq(model.mu1, model.mu2, model.omega_tilde1.mat(),
                  model.omega_tilde2.mat(), x) -
         model.c_hat * model.logdet_ratio;
}

int classify_label(const QdaModel& model, const Vector& x) {
  return discriminant(model, x) >= 0.0 ? 1 : 2;
}

std::vector<int> classify(const QdaModel& model, const Matrix& X) {
  std::vector<int> labels(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) {
    labels[static_cast<std::size_t>(i)] =
        classify_label(model, X.row(i).transpose());
  }
  return labels;
}

ConfusionCounts confusion_counts(const std::vector<int>& truth,
                                 const std::vector<int>& predicted) {
  if (truth.empty() || truth.size() != predicted.size()) {
    throw ContractViolation("confusion_counts: need matching nonempty labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if ((t != 1 && t != 2) || (p != 1 && p != 2)) {
      throw ContractViolation("confusion_counts: labels must be 1 or 2");
    }
    if (t == 1) {
      (p == 1 ? c.tp : c.fn)++;
    } else {
      (p == 2 ? c.tn : c.fp)++;
    }
  }
  return c;
}

Metrics metrics(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double total = tp + tn + fp + fn;
  if (total <= 0) throw ContractViolation("metrics: all counts are zero");
  Metrics m;
  m.acc = (tp + tn) / total;
  if (tn + fp > 0) {
    m.spec = tn / (tn + fp);
  } else {
    m.degenerate = true;
  }
  if (tp + fn > 0) {
    m.sens = tp / (tp + fn);
  } else {
    m.degenerate = true;
  }
  const double denom_sq = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom_sq > 0) {
    m.mcc = (tp * tn - fp * fn) / std::sqrt(denom_sq);
  } else {
    m.degenerate = true;
  }
  return m;
}

namespace {

using nlohmann::ordered_json;

ordered_json vector_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

ordered_json matrix_json(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  }
  return flat;
}

Vector json_vector(const ordered_json& j, Index expect, const char* key) {
  if (!j.is_array() || (expect >= 0 && static_cast<Index>(j.size()) != expect)) {
    throw ParseError(std::string("qda model: bad array for ") + key);
  }
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

Matrix json_matrix(const ordered_json& j, Index p, const char* key) {
  if (!j.is_array() || static_cast<Index>(j.size()) != p * p) {
    throw ParseError(std::string("qda model: bad matrix for ") + key);
  }
  Matrix m(p, p);
  std::size_t k = 0;
  for (Index i = 0; i < p; ++i) {
    for (Index c = 0; c < p; ++c) m(i, c) = j[k++].get<double>();
  }
  return m;
}

}  // namespace

std::string qda_model_to_json(const QdaModel& model) {
  ordered_json j;
  j["format"] = "hrstat-qda-model";
  j["version"] = 1;
  j["p"] = model.mu1.size();
  j["mu1"] = vector_json(model.mu1);
  j["mu2"] = vector_json(model.mu2);
  j["omega_tilde1"] = matrix_json(model.omega_tilde1.mat());
  j["omega_tilde2"] = matrix_json(model.omega_tilde2.mat());
  j["logdet_ratio"] = model.logdet_ratio;
  j["c_hat"] = model.c_hat;
  j["train"] = ordered_json{{"iterations1", model.train_diag.iterations1},
                            {"iterations2", model.train_diag.iterations2},
                            {"converged1", model.train_diag.converged1},
                            {"converged2", model.train_diag.converged2},
                            {"train_error", model.train_diag.train_error},
                            {"c_method", model.train_diag.c_method}};
  return j.dump(2) + "\n";
}

QdaModel qda_model_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("qda model: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "hrstat-qda-model") {
    throw ParseError("qda model: missing or wrong format marker");
  }
  if (j.value("version", 0) != 1) {
    throw ParseError("qda model: unsupported version");
  }
  try {
    const Index p = j.at("p").get<Index>();
    if (p < 1) throw ParseError("qda model: bad dimension");
    QdaModel model;
    model.mu1 = json_vector(j.at("mu1"), p, "mu1");
    model.mu2 = json_vector(j.at("mu2"), p, "mu2");
    model.omega_tilde1 = SpdMatrix(json_matrix(j.at("omega_tilde1"), p, "omega_tilde1"));
    model.omega_tilde2 = SpdMatrix(json_matrix(j.at("omega_tilde2"), p, "omega_tilde2"));
    model.logdet_ratio = j.at("logdet_ratio").get<double>();
    model.c_hat = j.at("c_hat").get<double>();
    if (model.c_hat < 0) throw ParseError("qda model: negative c_hat");
    if (!std::isfinite(model.logdet_ratio)) {
      throw ParseError("qda model: non-finite logdet_ratio");
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      model.train_diag.iterations1 = t.value("iterations1", 0);
      model.train_diag.iterations2 = t.value("iterations2", 0);
      model.train_diag.converged1 = t.value("converged1", false);
      model.train_diag.converged2 = t.value("converged2", false);
      model.train_diag.train_error = t.value("train_error", 0.0);
      model.train_diag.c_method = t.value("c_method", std::string("grid"));
    }
    return model;
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("qda model: ") + e.what());
  }
}

}  // namespace hrstat
