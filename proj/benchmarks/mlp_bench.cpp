#include <benchmark/benchmark.h>

#include "llpl/nn/mlp.hpp"

namespace {

void BM_PolicyForwardBackward(benchmark::State& state) {
  const auto batch = state.range(0);
  const auto model = llpl::nn::MlpModel::glorot({5, 64, 64, 1}, llpl::nn::Activation::kTanh, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, batch);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(1, batch);
  for (auto _ : state) benchmark::DoNotOptimize(llpl::nn::backward_mse(model, x, y));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_PolicyForwardBackward)->Arg(1)->Arg(32)->Arg(256);

void BM_CriticForwardBackward(benchmark::State& state) {
  const auto batch = state.range(0);
  const auto model =
      llpl::nn::MlpModel::glorot({6, 128, 128, 128, 128, 1}, llpl::nn::Activation::kRelu, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, batch);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(1, batch);
  for (auto _ : state) benchmark::DoNotOptimize(llpl::nn::backward_mse(model, x, y));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_CriticForwardBackward)->Arg(64);

}  // namespace
