#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "llpl/il/sample.hpp"
#include "llpl/nn/normalizer.hpp"

namespace llpl::lifelong {

/// Knowledge score of a sample; lower is better.
enum class EvalMetric { kSteerSquared, kLateralAccel };

EvalMetric parse_eval_metric(const std::string& name);
std::string to_string(EvalMetric m);

double evaluate(const il::Sample& s, EvalMetric metric);

struct EvalConfig {
  double eta_d = 0.02;
  double eta_m = 0.05;
  std::size_t ref_batch_size = 256;
  int update_epochs = 50;
  std::size_t batch_size = 32;
  double lr = 1e-2;
  EvalMetric metric = EvalMetric::kSteerSquared;

  /// Throws Error(kConfig).
  void validate() const;
};

struct EpisodicMemory {
  std::vector<il::Sample> entries;
  double eta_m = 0.05;
  nn::Normalizer normalizer;
  std::optional<std::size_t> capacity;
  EvalMetric metric = EvalMetric::kSteerSquared;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

/// Squared Euclidean distance between the normalized features of two samples.
double similarity(const il::Sample& a, const il::Sample& b, const nn::Normalizer& normalizer);

/// Keeps samples that are novel (no memory entry within eta_d), or whose
/// score is no worse than every memory entry within eta_d. Input order is kept.
il::Dataset screen_incremental(const il::Dataset& data, const EpisodicMemory& memory, double eta_d);

/// Sequential insertion in input order. A sample with no entry within eta_m
/// is appended (unless the memory is at capacity). Otherwise the lowest-score
/// member of its neighborhood plus itself wins, incumbents winning ties, and
/// the winner replaces the whole neighborhood at the position of its first
/// member.
EpisodicMemory update_memory(const EpisodicMemory& memory, const il::Dataset& screened, double eta_m);

/// Shuffles the demonstration with `seed` and inserts it into an empty memory.
/// Throws Error(kEmptyDataset).
EpisodicMemory init_memory(const il::Dataset& demonstration, double eta_m,
                           const nn::Normalizer& normalizer, std::uint64_t seed,
                           std::optional<std::size_t> capacity = std::nullopt,
                           EvalMetric metric = EvalMetric::kSteerSquared);

/// Dataset CSV plus an effort column.
void write_memory_csv(const std::filesystem::path& file, const EpisodicMemory& memory);
EpisodicMemory read_memory_csv(const std::filesystem::path& file, double eta_m,
                               const nn::Normalizer& normalizer);

}  // namespace llpl::lifelong
