#include "llpl/lifelong/memory.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "llpl/error.hpp"
#include "llpl/log.hpp"

namespace llpl::lifelong {

namespace {

using Normalized = std::array<double, il::kFeatureDim>;

Normalized normalize(const il::Sample& s, const nn::Normalizer& n) {
  const auto f = s.features();
  Normalized out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[i] = (f[i] - n.mean(k)) / n.std(k);
  }
  return out;
}

double distance(const Normalized& a, const Normalized& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

std::vector<Normalized> normalize_all(const std::vector<il::Sample>& samples,
                                      const nn::Normalizer& n) {
  std::vector<Normalized> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(normalize(s, n));
  return out;
}

void check_normalizer(const nn::Normalizer& n) {
  if (n.dim() != il::kFeatureDim) {
    throw Error(ErrorKind::kShapeMismatch, "memory normalizer must have dimension 5");
  }
}

}  // namespace

EvalMetric parse_eval_metric(const std::string& name) {
  if (name == "steer_squared") return EvalMetric::kSteerSquared;
  if (name == "lateral_accel") return EvalMetric::kLateralAccel;
  throw Error(ErrorKind::kConfig, "unknown eval metric '" + name + "'");
}

std::string to_string(EvalMetric m) {
  return m == EvalMetric::kSteerSquared ? "steer_squared" : "lateral_accel";
}

double evaluate(const il::Sample& s, EvalMetric metric) {
  if (metric == EvalMetric::kSteerSquared) return s.effort;
  const double ay = s.state.vx * s.state.yaw_rate;
  return ay * ay;
}

void EvalConfig::validate() const {
  if (!(eta_d > 0.0)) throw Error(ErrorKind::kConfig, "eta_d must be positive");
  if (!(eta_m > 0.0)) throw Error(ErrorKind::kConfig, "eta_m must be positive");
  if (ref_batch_size == 0) throw Error(ErrorKind::kConfig, "ref_batch_size must be positive");
  if (batch_size == 0) throw Error(ErrorKind::kConfig, "batch_size must be positive");
  if (update_epochs < 0) throw Error(ErrorKind::kConfig, "update_epochs must be non-negative");
  if (!(lr > 0.0)) throw Error(ErrorKind::kConfig, "lr must be positive");
}

double similarity(const il::Sample& a, const il::Sample& b, const nn::Normalizer& normalizer) {
  check_normalizer(normalizer);
  return distance(normalize(a, normalizer), normalize(b, normalizer));
}

il::Dataset screen_incremental(const il::Dataset& data, const EpisodicMemory& memory, double eta_d) {
  il::Dataset out;
  out.provenance = data.provenance;
  if (memory.empty()) {
    out.samples = data.samples;
    return out;
  }
  check_normalizer(memory.normalizer);
  const auto mem = normalize_all(memory.entries, memory.normalizer);
  for (const auto& s : data.samples) {
    const Normalized ns = normalize(s, memory.normalizer);
    const double score = evaluate(s, memory.metric);
    double nearest = std::numeric_limits<double>::infinity();
    bool beats_neighbors = true;
    bool has_neighbor = false;
    for (std::size_t j = 0; j < mem.size(); ++j) {
      const double d = distance(ns, mem[j]);
      nearest = std::min(nearest, d);
      if (d <= eta_d) {
        has_neighbor = true;
        if (score > evaluate(memory.entries[j], memory.metric)) beats_neighbors = false;
      }
    }
    if (nearest >= eta_d || (has_neighbor && beats_neighbors)) out.samples.push_back(s);
  }
  return out;
}

EpisodicMemory update_memory(const EpisodicMemory& memory, const il::Dataset& screened,
                             double eta_m) {
  check_normalizer(memory.normalizer);
  EpisodicMemory out = memory;
  out.eta_m = eta_m;
  auto& entries = out.entries;
  auto norm = normalize_all(entries, out.normalizer);
  std::vector<std::size_t> neighborhood;

  for (const auto& s : screened.samples) {
    const Normalized ns = normalize(s, out.normalizer);
    neighborhood.clear();
    for (std::size_t j = 0; j < norm.size(); ++j) {
      if (distance(ns, norm[j]) <= eta_m) neighborhood.push_back(j);
    }
    if (neighborhood.empty()) {
      if (out.capacity && entries.size() >= *out.capacity) {
        log::debug("update_memory: capacity reached, sample dropped");
        continue;
      }
      entries.push_back(s);
      norm.push_back(ns);
      continue;
    }
    std::size_t best = neighborhood.front();
    double best_score = evaluate(entries[best], out.metric);
    for (std::size_t j : neighborhood) {
      const double sc = evaluate(entries[j], out.metric);
      if (sc < best_score) {
        best = j;
        best_score = sc;
      }
    }
    const std::size_t slot = neighborhood.front();
    if (evaluate(s, out.metric) < best_score) {
      entries[slot] = s;
      norm[slot] = ns;
    } else if (best != slot) {
      entries[slot] = entries[best];
      norm[slot] = norm[best];
    }
    for (auto it = neighborhood.rbegin(); it != neighborhood.rend(); ++it) {
      if (*it == slot) continue;
      entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(*it));
      norm.erase(norm.begin() + static_cast<std::ptrdiff_t>(*it));
    }
  }
  return out;
}

EpisodicMemory init_memory(const il::Dataset& demonstration, double eta_m,
                           const nn::Normalizer& normalizer, std::uint64_t seed,
                           std::optional<std::size_t> capacity, EvalMetric metric) {
  if (demonstration.empty()) throw Error(ErrorKind::kEmptyDataset, "demonstration is empty");
  il::Dataset shuffled = demonstration;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.samples.begin(), shuffled.samples.end(), rng);
  EpisodicMemory empty;
  empty.eta_m = eta_m;
  empty.normalizer = normalizer;
  empty.capacity = capacity;
  empty.metric = metric;
  return update_memory(empty, shuffled, eta_m);
}

void write_memory_csv(const std::filesystem::path& file, const EpisodicMemory& memory) {
  il::Dataset d;
  d.samples = memory.entries;
  d.provenance = "memory";
  il::write_dataset_csv(file, d, true);
}

EpisodicMemory read_memory_csv(const std::filesystem::path& file, double eta_m,
                               const nn::Normalizer& normalizer) {
  EpisodicMemory m;
  m.entries = il::read_dataset_csv(file).samples;
  m.eta_m = eta_m;
  m.normalizer = normalizer;
  return m;
}

}  // namespace llpl::lifelong
