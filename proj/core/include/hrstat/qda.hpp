#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrstat/hr.hpp"
#include "hrstat/matrix.hpp"

namespace hrstat {

// Unbiased estimate of tr(Cov): (n−1)⁻¹ Σ XᵢᵀXᵢ − n(n−1)⁻¹ X̄ᵀX̄, floored
// at 1e-12 so the p/t̂r rescaling stays finite on degenerate classes.
double trace_hat(const Matrix& X);

std::vector<double> default_c_grid();  // 0, 0.05, …, 2

struct QdaTrainDiag {
  int iterations1 = 0;
  int iterations2 = 0;
  bool converged1 = false;
  bool converged2 = false;
  double train_error = 0.0;  // unweighted mean class error rate at c_hat
  std::string c_method = "grid";
};

struct QdaModel {
  Vector mu1, mu2;
  SpdMatrix omega_tilde1, omega_tilde2;  // (p / t̂r(Ξ_k)) · Ω̂_k
  double logdet_ratio = 0.0;             // ς̂ = log|Ω̃₂| − log|Ω̃₁|
  double c_hat = 0.0;
  QdaTrainDiag train_diag;
};

struct QdaConfig {
  HrConfig hr;
  std::vector<double> c_grid;  // empty selects default_c_grid()
  int cv_folds = 0;            // 0: training-error grid search; k ≥ 2: k-fold CV
};

QdaModel hrqda_train(const Matrix& X1, const Matrix& X2,
                     const QdaConfig& config = {});

// Δ̂²(x) − ĉ·ς̂, with Δ̂²(x) = (x−μ̂₂)ᵀΩ̃₂(x−μ̂₂) − (x−μ̂₁)ᵀΩ̃₁(x−μ̂₁).
double discriminant(const QdaModel& model, const Vector& x);

// 1 when discriminant(model, x) ≥ 0, else 2 (the tie goes to class 1).
int classify_label(const QdaModel& model, const Vector& x);
std::vector<int> classify(const QdaModel& model, const Matrix& X);

// Grid value minimizing the training misclassification count of the rule
// Δ̂²(x) ≥ c·ς̂; ties break toward the smallest c. The grid must be sorted
// ascending with nonnegative entries.
double estimate_c(const Vector& mu1, const Vector& mu2,
                  const Matrix& omega_tilde1, const Matrix& omega_tilde2,
                  double logdet_ratio, const Matrix& X1, const Matrix& X2,
                  const std::vector<double>& grid);

struct ConfusionCounts {
  std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
};

// Class 1 is the positive class; labels must be 1 or 2.
ConfusionCounts confusion_counts(const std::vector<int>& truth,
                                 const std::vector<int>& predicted);

struct Metrics {
  double acc = 0.0;
  double spec = 0.0;
  double sens = 0.0;
  double mcc = 0.0;
  bool degenerate = false;  // a zero denominator forced a conventional 0
};

Metrics metrics(const ConfusionCounts& counts);

// Versioned JSON round-trip for trained models (matrices row-major).
std::string qda_model_to_json(const QdaModel& model);
QdaModel qda_model_from_json(const std::string& text);

}  // namespace hrstat
