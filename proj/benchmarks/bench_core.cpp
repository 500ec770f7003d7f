#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "precaution/decision.hpp"
#include "precaution/model_zoo.hpp"
#include "precaution/random.hpp"
#include "precaution/support_geometry.hpp"

using namespace precaution;

namespace {

zoo::FamilySpec gjt_spec() {
  zoo::FamilySpec s;
  s.family = zoo::Family::GlobalWarming;
  s.params = {{"gamma", 0.5}, {"eta", 1.0}, {"a_lo", 0.05}};
  s.functions["u"] = zoo::CatalogFunction::log();
  return s;
}

prob::JointSignalModel signal(std::size_t n, std::size_t m) {
  Rng rng(1);
  std::vector<std::vector<double>> joint(n, std::vector<double>(m));
  double total = 0.0;
  for (auto& row : joint) {
    for (auto& v : row) total += (v = 0.1 + rng.uniform01());
  }
  for (auto& row : joint) {
    for (auto& v : row) v /= total;
  }
  std::vector<double> xs(m);
  for (std::size_t i = 0; i < m; ++i) xs[i] = 0.05 + 0.3 * static_cast<double>(i) / static_cast<double>(m);
  return prob::JointSignalModel(joint, prob::StateSpace(xs));
}

void BM_EpsteinJ(benchmark::State& state) {
  const auto sig = signal(4, static_cast<std::size_t>(state.range(0)));
  const auto model = zoo::build_model(gjt_spec(), sig.states());
  decision::SolverConfig cfg;
  cfg.b_grid = 101;
  const auto rho = prob::prior_of(sig);
  for (auto _ : state) benchmark::DoNotOptimize(decision::epstein_J(model, 0.5, rho, cfg));
}
BENCHMARK(BM_EpsteinJ)->Arg(2)->Arg(4)->Arg(6);

void BM_SignalValue(benchmark::State& state) {
  const auto sig = signal(static_cast<std::size_t>(state.range(0)), 4);
  const auto model = zoo::build_model(gjt_spec(), sig.states());
  decision::SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(decision::signal_value(model, 0.5, sig, cfg));
}
BENCHMARK(BM_SignalValue)->Arg(2)->Arg(6);

void BM_StarDifference(benchmark::State& state) {
  Rng rng(3);
  const auto k = static_cast<std::size_t>(state.range(0));
  auto random_set = [&] {
    std::vector<geometry::Vector> v(k, geometry::Vector(3));
    for (auto& p : v) {
      for (auto& x : p) x = rng.uniform(-1, 1);
    }
    return geometry::PayoffSet(v);
  };
  const auto outer = random_set();
  const auto inner = random_set();
  for (auto _ : state) benchmark::DoNotOptimize(geometry::star_difference(outer, inner));
}
BENCHMARK(BM_StarDifference)->Arg(8)->Arg(32)->Arg(101);

}  // namespace

BENCHMARK_MAIN();
