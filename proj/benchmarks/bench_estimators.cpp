// Micro-benchmarks for the estimation hot paths at the simulation scale
// (n=100 rows, p up to 120). These are the per-replicate costs that decide
// how long a bootstrap-calibrated Monte-Carlo run takes.

#include <benchmark/benchmark.h>

#include "hrstat/hr.hpp"
#include "hrstat/location_test.hpp"
#include "hrstat/sglasso.hpp"
#include "hrstat/simlab.hpp"
#include "hrstat/spatial.hpp"

namespace {

hrstat::Matrix make_sample(hrstat::Index n, hrstat::Index p,
                           std::uint64_t seed) {
  const hrstat::CovPair cov = hrstat::make_cov({hrstat::CovModelId::I, p});
  return hrstat::gen_elliptical(hrstat::normal_spec(),
                                hrstat::Vector::Zero(p), cov.sigma, n, seed);
}

void BM_SpatialMedian(benchmark::State& state) {
  const auto X = make_sample(100, state.range(0), 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hrstat::spatial_median(X));
  }
}
BENCHMARK(BM_SpatialMedian)->Arg(60)->Arg(120);

void BM_Sglasso(benchmark::State& state) {
  const hrstat::Index p = state.range(0);
  const auto X = make_sample(100, p, 12);
  const auto med = hrstat::spatial_median(X);
  const hrstat::Matrix s_hat = hrstat::sign_cov(X, med.mu);
  const double lambda = hrstat::lambda_default(X.rows(), p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hrstat::sglasso(s_hat, p, lambda));
  }
}
BENCHMARK(BM_Sglasso)->Arg(60)->Arg(120);

void BM_HrEstimate(benchmark::State& state) {
  const auto X = make_sample(100, state.range(0), 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hrstat::hr_estimate(X));
  }
}
BENCHMARK(BM_HrEstimate)->Arg(60)->Arg(120);

void BM_DiagonalHr(benchmark::State& state) {
  const auto X = make_sample(100, state.range(0), 14);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hrstat::diagonal_hr(X));
  }
}
BENCHMARK(BM_DiagonalHr)->Arg(60)->Arg(120);

// Full seven-method battery without bootstrap: the asymptotic per-replicate
// cost. A bootstrap run multiplies this by roughly M+1.
void BM_MultiTestAsymptotic(benchmark::State& state) {
  const auto X = make_sample(100, state.range(0), 15);
  hrstat::TestConfig cfg;
  cfg.calibration = hrstat::Calibration::Asymptotic;
  const auto methods = hrstat::default_methods();
  for (auto _ : state) {
    benchmark::DoNotOptimize(hrstat::multi_test(X, methods, cfg));
  }
}
BENCHMARK(BM_MultiTestAsymptotic)->Arg(60)->Arg(120);

}  // namespace

BENCHMARK_MAIN();
