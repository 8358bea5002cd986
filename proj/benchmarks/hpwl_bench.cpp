#include <benchmark/benchmark.h>

#include <random>

#include "hpwl/clustering.hpp"
#include "hpwl/dataset.hpp"
#include "hpwl/eval.hpp"
#include "hpwl/hypergraph.hpp"
#include "hpwl/solver.hpp"

namespace {

hpwl::DataMatrix gaussian_data(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0, 1);
  hpwl::DataMatrix x;
  x.values.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x.values(i, j) = gauss(rng);
  return x;
}

void BM_Kmeans(benchmark::State& state) {
  const auto x = gaussian_data(state.range(0), 32, 7);
  for (auto _ : state) {
    auto model = hpwl::kmeans(x, static_cast<int>(state.range(0) / 10), 7);
    benchmark::DoNotOptimize(model.means);
  }
}
BENCHMARK(BM_Kmeans)->Arg(200)->Arg(800);

void BM_BuildIncidence(benchmark::State& state) {
  const auto x = gaussian_data(state.range(0), 16, 11);
  Eigen::MatrixXd centroids = x.values.topRows(state.range(0) / 4);
  for (auto _ : state) {
    auto h = hpwl::build_incidence(centroids, 5);
    benchmark::DoNotOptimize(h.incidence);
  }
}
BENCHMARK(BM_BuildIncidence)->Arg(80)->Arg(320);

// direct d x d solve vs the n x n reformulation on wide data
void BM_UpdateP(benchmark::State& state) {
  const bool fast = state.range(0) != 0;
  const Eigen::Index n = 150, d = 600;
  const auto x = gaussian_data(n, d, 3);
  auto model = hpwl::snap_centroids(x, hpwl::kmeans(x, 15, 3));
  auto h = hpwl::build_incidence(model.centroids, 5);
  const auto d_diag = hpwl::build_point_weights(x, model, h.sigma);
  const auto z_k = hpwl::build_global_target(x.values, d_diag, 10);
  hpwl::PqSolver solver(x.values, model.centroids, model.centroid_indices, d_diag, z_k, 1.0, 1.0);
  solver.set_delta_prime(hpwl::symmetrized(hpwl::laplacian(h)));
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(10, 10);
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(d, 0.5);
  for (auto _ : state) {
    Eigen::MatrixXd p = fast ? solver.update_p_fast(q, b) : solver.update_p_direct(q, b);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_UpdateP)->Arg(0)->Arg(1);

void BM_Fit(benchmark::State& state) {
  const auto x = gaussian_data(state.range(0), state.range(1), 13);
  hpwl::HpwlParams params;
  for (auto _ : state) {
    auto ranking = hpwl::fit(x, params, 13);
    benchmark::DoNotOptimize(ranking.scores);
  }
}
BENCHMARK(BM_Fit)->Args({100, 50})->Args({200, 400});

void BM_KnnPredict(benchmark::State& state) {
  const auto train = gaussian_data(state.range(0), 20, 17);
  const auto test = gaussian_data(100, 20, 18);
  Eigen::VectorXi labels(state.range(0));
  for (Eigen::Index i = 0; i < labels.size(); ++i) labels(i) = static_cast<int>(i % 3);
  for (auto _ : state) {
    auto pred = hpwl::knn_predict(train.values, labels, test.values, 5);
    benchmark::DoNotOptimize(pred);
  }
}
BENCHMARK(BM_KnnPredict)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
