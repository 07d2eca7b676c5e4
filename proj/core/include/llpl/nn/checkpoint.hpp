#pragma once

#include <filesystem>
#include <optional>

#include "llpl/nn/mlp.hpp"
#include "llpl/nn/normalizer.hpp"

namespace llpl::nn {

/// Plain-text checkpoint:
///
///   llpl-mlp v1
///   <layer sizes, space separated>
///   <activation>
///   <parameters in canonical flat order, %.17g>
///   [normalizer <dim>
///    <mean...>
///    <std...>]
///
/// Seventeen significant digits make the round trip bit-exact.
struct Checkpoint {
  MlpModel model;
  std::optional<Normalizer> normalizer;
};

void write_checkpoint(const std::filesystem::path& file, const MlpModel& model,
                      const Normalizer* normalizer = nullptr);

/// Throws Error(kMissingArtifact) if the file does not exist, Error(kIo) if malformed.
Checkpoint read_checkpoint(const std::filesystem::path& file);

}  // namespace llpl::nn
