#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "hrstat/rng.hpp"
#include "hrstat/sglasso.hpp"

using hrstat::Index;
using hrstat::Matrix;
using hrstat::Vector;

namespace {

// Sign-covariance-like input: SPD with trace 1.
Matrix unit_trace_spd(Index p, std::uint64_t seed) {
  hrstat::Rng rng(seed);
  Matrix A(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) A(i, j) = rng.normal();
  }
  Matrix S = A * A.transpose() / static_cast<double>(p) +
             Matrix::Identity(p, p) * 0.5;
  return S / S.trace();
}

}  // namespace

TEST_SUITE("sglasso") {

TEST_CASE("lambda_default follows the rate formula") {
  CHECK(hrstat::lambda_default(100, 120) ==
        doctest::Approx(std::sqrt(std::log(120.0) / 100.0) +
                        0.5 / std::sqrt(120.0))
            .epsilon(1e-14));
  CHECK(hrstat::lambda_default(100, 120) == doctest::Approx(0.2644468).epsilon(1e-6));
  CHECK(hrstat::lambda_default(400, 120, 2.0, 0.0) ==
        doctest::Approx(2.0 * std::sqrt(std::log(120.0) / 400.0)).epsilon(1e-14));
}

TEST_CASE("solution matches a proximal-gradient oracle") {
  const Index p = 6;
  const Matrix s_hat = unit_trace_spd(p, 11);
  const double lambda = 0.15;

  hrstat::SglassoConfig cfg;
  cfg.theta_tol = 1e-10;
  cfg.kkt_tol = 1e-8;
  cfg.max_sweeps = 2000;
  hrstat::PrecisionEstimate est = hrstat::sglasso(s_hat, p, lambda, cfg);

  const Matrix S = static_cast<double>(p) * s_hat;
  const Matrix oracle = reference::glasso_ista(S, lambda, true, 50000, 1e-12);

  CHECK((est.omega.mat() - oracle).cwiseAbs().maxCoeff() < 2e-5);
  // Both objectives should agree to high accuracy at the optimum.
  const double f_est = reference::glasso_objective(S, est.omega.mat(), lambda, true);
  const double f_orc = reference::glasso_objective(S, oracle, lambda, true);
  CHECK(f_est == doctest::Approx(f_orc).epsilon(1e-8));
  CHECK(est.kkt_residual <= cfg.kkt_tol);
}

TEST_CASE("unpenalized diagonal variant also matches the oracle") {
  const Index p = 5;
  const Matrix s_hat = unit_trace_spd(p, 29);
  const double lambda = 0.2;

  hrstat::SglassoConfig cfg;
  cfg.penalize_diagonal = false;
  cfg.theta_tol = 1e-10;
  cfg.kkt_tol = 1e-8;
  cfg.max_sweeps = 2000;
  hrstat::PrecisionEstimate est = hrstat::sglasso(s_hat, p, lambda, cfg);

  const Matrix S = static_cast<double>(p) * s_hat;
  const Matrix oracle = reference::glasso_ista(S, lambda, false, 50000, 1e-12);
  CHECK((est.omega.mat() - oracle).cwiseAbs().maxCoeff() < 2e-5);
}

TEST_CASE("large lambda drives off-diagonals to zero") {
  const Index p = 5;
  const Matrix s_hat = unit_trace_spd(p, 3);
  hrstat::PrecisionEstimate est = hrstat::sglasso(s_hat, p, 5.0);
  Matrix off = est.omega.mat();
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("objective decreases along the recorded trace") {
  const Index p = 6;
  const Matrix s_hat = unit_trace_spd(p, 47);
  hrstat::SglassoConfig cfg;
  cfg.record_objective = true;
  hrstat::PrecisionEstimate est = hrstat::sglasso(s_hat, p, 0.1, cfg);
  REQUIRE(est.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < est.objective_trace.size(); ++i) {
    CHECK(est.objective_trace[i] <= est.objective_trace[i - 1] + 1e-12);
  }
  CHECK(est.objective == doctest::Approx(est.objective_trace.back()));
}

TEST_CASE("exhausting max_sweeps throws and carries the best iterate") {
  const Index p = 8;
  const Matrix s_hat = unit_trace_spd(p, 13);
  hrstat::SglassoConfig cfg;
  cfg.max_sweeps = 1;
  cfg.theta_tol = 1e-14;
  cfg.kkt_tol = 1e-14;
  try {
    hrstat::sglasso(s_hat, p, 0.05, cfg);
    FAIL("expected NoConvergenceError");
  } catch (const hrstat::NoConvergenceError& e) {
    CHECK(e.best().omega.dim() == p);
    CHECK(e.best().iterations == 1);
  }
}

TEST_CASE("invalid inputs are rejected") {
  const Matrix s_hat = unit_trace_spd(4, 5);
  CHECK_THROWS_AS(hrstat::sglasso(s_hat, 4, -0.1), hrstat::ContractViolation);
  Matrix bad = s_hat;
  bad(0, 1) += 1.0;  // asymmetric
  CHECK_THROWS_AS(hrstat::sglasso(bad, 4, 0.1), hrstat::ContractViolation);
}

TEST_CASE("lambda selection is deterministic and picks from the grid") {
  hrstat::Rng rng(61);
  const Index n = 50, p = 5;
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) X(i, j) = rng.normal();
  }
  const Vector mu = Vector::Zero(p);
  const std::vector<double> grid = {0.05, 0.1, 0.2, 0.4};
  const double l1 = hrstat::sglasso_select_lambda(X, mu, grid, 5);
  const double l2 = hrstat::sglasso_select_lambda(X, mu, grid, 5);
  CHECK(l1 == l2);
  CHECK(std::count(grid.begin(), grid.end(), l1) == 1);
}

}  // TEST_SUITE
