#include <benchmark/benchmark.h>

#include "bsim/initialize.hpp"
#include "bsim/sampler.hpp"
#include "bsim/spline.hpp"
#include "bsim/synth.hpp"

using namespace bsim;

namespace {

Scenario bench_scenario(int n, int p) {
  Scenario s;
  s.n = n;
  s.p = p;
  s.m_star = Vector::Zero(p);
  s.m_star(0) = 0.5;
  s.beta_star = Vector::Ones(p).normalized();
  s.amplitude = 2.0;
  s.seed = 11;
  return s;
}

struct Fixture {
  Dataset data;
  Initialization init;
  HyperParameters hyper;

  explicit Fixture(int n, int p)
      : data(generate(bench_scenario(n, p))),
        init(initialize(data, Family(FamilyKind::bernoulli), InitOptions{})) {
    hyper.beta0 = init.state.beta;
    hyper.m0 = Vector::Zero(data.x_main.cols());
    hyper.q = 100.0 * Matrix::Identity(data.x_main.cols(), data.x_main.cols());
    hyper.rho = init.rho;
  }
};

void BM_BasisEvaluate(benchmark::State& st) {
  const auto basis = BSplineBasis::clamped_uniform(-3, 3, static_cast<int>(st.range(0)));
  double u = -3.0, acc = 0.0;
  for (auto _ : st) {
    acc += basis.evaluate(u).sum();
    u = u > 3.0 ? -3.0 : u + 0.001;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_BasisEvaluate)->Arg(8)->Arg(20);

void BM_ReducedDesign(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), 5);
  for (auto _ : st) {
    auto d = build_reduced_design(f.data.x_index, f.data.arm, f.init.state.beta, f.init.system);
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_ReducedDesign)->Arg(1000)->Arg(10000);

void BM_BetaLogMarginal(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), 5);
  GibbsSampler sampler(f.data, f.init.family, f.init.system, f.hyper);
  for (auto _ : st)
    benchmark::DoNotOptimize(sampler.beta_log_marginal(f.init.state.beta, f.init.state.m));
}
BENCHMARK(BM_BetaLogMarginal)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_GibbsSweep(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), 5);
  GibbsSampler sampler(f.data, f.init.family, f.init.system, f.hyper);
  ParameterState state = f.init.state;
  Rng rng(5);
  for (auto _ : st) sampler.sweep(state, rng);
}
BENCHMARK(BM_GibbsSweep)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
