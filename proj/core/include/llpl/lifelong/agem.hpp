#pragma once

#include "llpl/nn/mlp.hpp"

namespace llpl::lifelong {

/// A-GEM projection. If g . g_ref >= 0 the gradient is returned unchanged
/// (bitwise). Otherwise g is projected onto the half-space g~ . g_ref >= 0:
///
///   g~ = g - (g . g_ref / g_ref . g_ref) g_ref
///
/// A vanishing reference gradient (||g_ref|| < 1e-12) with a negative dot
/// product leaves g unchanged and logs a warning.
nn::GradientVector agem_project(const nn::GradientVector& g, const nn::GradientVector& g_ref);

/// True when the step along g would increase the reference loss to first order.
bool gradients_conflict(const nn::GradientVector& g, const nn::GradientVector& g_ref);

}  // namespace llpl::lifelong
