#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "qpgm/classifier.hpp"
#include "qpgm/metrics.hpp"

using namespace qpgm;

namespace {

struct Data {
  std::vector<FeatureVector> rows;
  std::vector<ClassId> labels;
};

Data make_data(std::size_t m, std::size_t d, std::size_t classes) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Data out;
  for (std::size_t i = 0; i < m; ++i) {
    FeatureVector x(static_cast<Eigen::Index>(d));
    for (auto& v : x) v = g(rng);
    x[0] += 3.0 * static_cast<double>(i % classes);
    out.rows.push_back(x);
    out.labels.push_back(i % classes);
  }
  return out;
}

void BM_DenseFit(benchmark::State& state) {
  const auto data = make_data(120, 3, 3);
  FitOptions opts;
  opts.engine = EngineKind::Dense;
  opts.copies = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_classifier(data.rows, data.labels, 3, opts));
}
BENCHMARK(BM_DenseFit)->Arg(1)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_GramFit(benchmark::State& state) {
  const auto data = make_data(static_cast<std::size_t>(state.range(0)), 30, 3);
  FitOptions opts;
  opts.copies = 60;
  for (auto _ : state) benchmark::DoNotOptimize(fit_classifier(data.rows, data.labels, 3, opts));
}
BENCHMARK(BM_GramFit)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_GramScore(benchmark::State& state) {
  const auto data = make_data(300, 30, 3);
  FitOptions opts;
  opts.copies = 60;
  const auto model = fit_classifier(data.rows, data.labels, 3, opts);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(model.score(data.rows[i++ % data.rows.size()]));
}
BENCHMARK(BM_GramScore);

void BM_Auc(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u;
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> s(n);
  auto member = std::make_unique<bool[]>(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = u(rng);
    member[i] = i % 2;
  }
  for (auto _ : state) benchmark::DoNotOptimize(auc_ovr(s, std::span<const bool>(member.get(), n)));
}
BENCHMARK(BM_Auc)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
