#include "llpl/lifelong/agem.hpp"

#include "llpl/error.hpp"
#include "llpl/log.hpp"

namespace llpl::lifelong {

bool gradients_conflict(const nn::GradientVector& g, const nn::GradientVector& g_ref) {
  return g.dot(g_ref) < 0.0;
}

nn::GradientVector agem_project(const nn::GradientVector& g, const nn::GradientVector& g_ref) {
  if (g.size() != g_ref.size()) {
    throw Error(ErrorKind::kShapeMismatch, "gradient and reference gradient differ in length");
  }
  const double dot = g.dot(g_ref);
  if (dot >= 0.0) return g;
  const double ref_sq = g_ref.squared_norm();
  if (ref_sq < 1e-24) {
    log::warn("agem_project: reference gradient vanished; returning the raw gradient");
    return g;
  }
  return nn::GradientVector(g.values - (dot / ref_sq) * g_ref.values);
}

}  // namespace llpl::lifelong
