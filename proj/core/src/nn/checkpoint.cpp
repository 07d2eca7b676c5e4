#include "llpl/nn/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "llpl/error.hpp"

namespace llpl::nn {

namespace {

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << v[i];
  }
  out << '\n';
}

Eigen::VectorXd read_vector(std::istream& in, Eigen::Index n, const std::string& what) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> v[i])) throw Error(ErrorKind::kIo, "checkpoint truncated in " + what);
  }
  return v;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& file, const MlpModel& model,
                      const Normalizer* normalizer) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write checkpoint " + file.string());
  out.precision(17);
  out << "llpl-mlp v1\n";
  for (std::size_t i = 0; i < model.layer_sizes().size(); ++i) {
    if (i) out << ' ';
    out << model.layer_sizes()[i];
  }
  out << '\n' << to_string(model.activation()) << '\n';
  write_vector(out, model.flatten());
  if (normalizer) {
    out << "normalizer " << normalizer->dim() << '\n';
    write_vector(out, normalizer->mean);
    write_vector(out, normalizer->std);
  }
}

Checkpoint read_checkpoint(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) {
    throw Error(ErrorKind::kMissingArtifact, "checkpoint not found: " + file.string());
  }
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  if (line != "llpl-mlp v1") throw Error(ErrorKind::kIo, "not an llpl-mlp v1 checkpoint: " + file.string());

  std::getline(in, line);
  std::istringstream sizes_line(line);
  std::vector<std::size_t> sizes;
  std::size_t s = 0;
  while (sizes_line >> s) sizes.push_back(s);

  std::string act;
  std::getline(in, act);
  MlpModel model(sizes, parse_activation(act));
  model.load(read_vector(in, model.parameter_count(), "parameters"));

  Checkpoint ck{std::move(model), std::nullopt};
  std::string tag;
  if (in >> tag) {
    if (tag != "normalizer") throw Error(ErrorKind::kIo, "unexpected section '" + tag + "' in checkpoint");
    Eigen::Index dim = 0;
    in >> dim;
    Normalizer n;
    n.mean = read_vector(in, dim, "normalizer mean");
    n.std = read_vector(in, dim, "normalizer std");
    ck.normalizer = std::move(n);
  }
  return ck;
}

}  // namespace llpl::nn
