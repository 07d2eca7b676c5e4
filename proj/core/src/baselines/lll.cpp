#include "llpl/baselines/lll.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "llpl/error.hpp"

namespace llpl::baselines {

namespace {

std::vector<il::Sample> draw(const std::vector<il::Sample>& from, double ratio, std::uint64_t seed) {
  const auto count = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(from.size())));
  std::vector<std::size_t> idx(from.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(count, idx.size()));
  std::sort(idx.begin(), idx.end());
  std::vector<il::Sample> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(from[i]);
  return out;
}

void check_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(ErrorKind::kConfig, "sample_ratio must lie in (0, 1]");
  }
}

}  // namespace

lifelong::KnowledgeRule random_sampling_rule(double sample_ratio) {
  check_ratio(sample_ratio);
  lifelong::KnowledgeRule rule;
  rule.screen = [](const il::Dataset& incremental, const lifelong::EpisodicMemory&) {
    return incremental;
  };
  rule.grow = [sample_ratio](const lifelong::EpisodicMemory& memory, const il::Dataset& incremental,
                             const il::Dataset&, std::uint64_t seed) {
    lifelong::EpisodicMemory out = memory;
    for (auto& s : draw(incremental.samples, sample_ratio, seed)) out.entries.push_back(s);
    return out;
  };
  return rule;
}

lifelong::EpisodicMemory random_memory(const il::Dataset& demonstration, double sample_ratio,
                                       const nn::Normalizer& normalizer, std::uint64_t seed) {
  check_ratio(sample_ratio);
  if (demonstration.empty()) throw Error(ErrorKind::kEmptyDataset, "demonstration is empty");
  lifelong::EpisodicMemory m;
  m.normalizer = normalizer;
  m.entries = draw(demonstration.samples, sample_ratio, seed);
  return m;
}

lifelong::LoopResult run_lll_baseline(il::Policy& policy, lifelong::EpisodicMemory& memory,
                                      const lifelong::Environment& env,
                                      const lifelong::Schedule& schedule,
                                      lifelong::LoopOptions options, double sample_ratio) {
  options.rule = random_sampling_rule(sample_ratio);
  return lifelong::run_llpl_loop(policy, memory, env, schedule, options);
}

}  // namespace llpl::baselines
