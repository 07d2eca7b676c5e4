#include "llpl/lifelong/update.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "llpl/error.hpp"
#include "llpl/il/train.hpp"
#include "llpl/lifelong/agem.hpp"
#include "llpl/log.hpp"

namespace llpl::lifelong {

namespace {

std::vector<Eigen::Index> sample_indices(std::size_t population, std::size_t count,
                                         std::mt19937_64& rng) {
  std::vector<Eigen::Index> idx(population);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  if (count >= population) return idx;
  // Partial Fisher-Yates: the first `count` slots become a uniform subset.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

UpdateReport lifelong_update(il::Policy& policy, const il::Dataset& data,
                             const EpisodicMemory& memory, const EvalConfig& cfg,
                             std::uint64_t seed, bool project) {
  if (data.empty()) throw Error(ErrorKind::kEmptyDataset, "no incremental data to learn from");
  if (memory.empty()) throw Error(ErrorKind::kEmptyMemory, "episodic memory is empty");
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const il::Batch all = il::make_batch(data.samples, policy.normalizer);
  const il::Batch mem_all = il::make_batch(memory.entries, policy.normalizer);
  const std::size_t n = data.size();
  const std::size_t m = memory.size();

  std::mt19937_64 rng(seed);
  const auto held_idx = sample_indices(m, cfg.ref_batch_size, rng);
  const il::Batch held = il::gather(mem_all, held_idx, 0, held_idx.size());

  UpdateReport report;
  report.n_data = n;
  report.loss_data_pre = nn::mse_loss(policy.model, all.inputs, all.targets);
  report.loss_mem_pre = nn::mse_loss(policy.model, held.inputs, held.targets);

  const Eigen::VectorXd before = policy.model.flatten();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  try {
    for (int epoch = 0; epoch < cfg.update_epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t b = 0; b < n; b += cfg.batch_size) {
        const il::Batch mb = il::gather(all, order, b, std::min(n, b + cfg.batch_size));
        nn::GradientVector g = nn::backward_mse(policy.model, mb.inputs, mb.targets).grad;
        if (project) {
          const auto ref_idx = sample_indices(m, cfg.ref_batch_size, rng);
          const il::Batch ref = il::gather(mem_all, ref_idx, 0, ref_idx.size());
          const nn::GradientVector g_ref =
              nn::backward_mse(policy.model, ref.inputs, ref.targets).grad;
          if (gradients_conflict(g, g_ref)) {
            ++report.projected_steps;
            g = agem_project(g, g_ref);
          }
        }
        nn::sgd_step(policy.model, g, cfg.lr);
        ++report.steps;
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNonFiniteLoss) throw;
    policy.model.load(before);
    log::warn("lifelong_update: non-finite loss, parameters rolled back");
    throw;
  }

  report.loss_data_post = nn::mse_loss(policy.model, all.inputs, all.targets);
  report.loss_mem_post = nn::mse_loss(policy.model, held.inputs, held.targets);
  if (!std::isfinite(report.loss_data_post) || !std::isfinite(report.loss_mem_post)) {
    policy.model.load(before);
    throw Error(ErrorKind::kNonFiniteLoss, "lifelong update produced a non-finite loss");
  }
  if (report.loss_mem_post > report.loss_mem_pre * 1.05) {
    log::warn("lifelong_update: memory loss rose from " + std::to_string(report.loss_mem_pre) +
              " to " + std::to_string(report.loss_mem_post));
  }
  report.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log::info("lifelong_update: " + std::to_string(n) + " samples, " +
            std::to_string(report.steps) + " steps, projection rate " +
            std::to_string(report.projection_rate()));
  return report;
}

}  // namespace llpl::lifelong
