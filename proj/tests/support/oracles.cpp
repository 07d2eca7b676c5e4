#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

namespace llpl::testing {

Eigen::VectorXd numeric_gradient(nn::MlpModel& model, const std::function<double()>& loss,
                                 const std::vector<Eigen::Index>& indices, double h) {
  std::vector<Eigen::Index> idx = indices;
  if (idx.empty()) {
    idx.resize(static_cast<std::size_t>(model.parameter_count()));
    for (Eigen::Index i = 0; i < model.parameter_count(); ++i) idx[static_cast<std::size_t>(i)] = i;
  }
  Eigen::VectorXd params = model.flatten();
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Eigen::Index i = idx[k];
    const double saved = params(i);
    params(i) = saved + h;
    model.load(params);
    const double up = loss();
    params(i) = saved - h;
    model.load(params);
    const double down = loss();
    params(i) = saved;
    out(static_cast<Eigen::Index>(k)) = (up - down) / (2.0 * h);
  }
  model.load(params);
  return out;
}

WideMlp WideMlp::from(const nn::MlpModel& model) {
  WideMlp w;
  w.sizes = model.layer_sizes();
  w.activation = model.activation();
  const Eigen::VectorXd flat = model.flatten();
  w.params.assign(flat.data(), flat.data() + flat.size());
  return w;
}

std::vector<long double> WideMlp::forward(const std::vector<long double>& input) const {
  std::vector<long double> x = input, y;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t n_in = sizes[l], n_out = sizes[l + 1];
    y.assign(n_out, 0.0L);
    for (std::size_t j = 0; j < n_out; ++j) {
      long double acc = params[offset + n_out * n_in + j];
      for (std::size_t i = 0; i < n_in; ++i) acc += params[offset + j * n_in + i] * x[i];
      y[j] = acc;
    }
    offset += n_out * n_in + n_out;
    if (l + 2 < sizes.size()) {
      for (auto& v : y) v = activation == nn::Activation::kTanh ? std::tanh(v) : std::max(v, 0.0L);
    }
    x.swap(y);
  }
  return x;
}

Eigen::VectorXd wide_numeric_gradient(WideMlp& model, const std::function<long double()>& loss,
                                      const std::vector<Eigen::Index>& indices, long double h) {
  std::vector<Eigen::Index> idx = indices;
  if (idx.empty()) {
    idx.resize(model.params.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    long double& p = model.params[static_cast<std::size_t>(idx[k])];
    const long double saved = p;
    p = saved + h;
    const long double up = loss();
    p = saved - h;
    const long double down = loss();
    p = saved;
    out(static_cast<Eigen::Index>(k)) = static_cast<double>((up - down) / (2.0L * h));
  }
  return out;
}

double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                          double floor) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double den = std::max({std::abs(analytic(i)), std::abs(numeric(i)), floor});
    worst = std::max(worst, std::abs(analytic(i) - numeric(i)) / den);
  }
  return worst;
}

Eigen::VectorXd least_norm_projection(const Eigen::VectorXd& g, const Eigen::VectorXd& g_ref) {
  // x(mu) = g + mu g_ref; feasibility residual phi(mu) = g_ref . x(mu) is increasing in mu.
  auto residual = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) acc += g_ref(i) * (g(i) + mu * g_ref(i));
    return acc;
  };
  if (residual(0.0) >= 0.0) return g;
  double lo = 0.0, hi = 1.0;
  while (residual(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  Eigen::VectorXd x(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) x(i) = g(i) + hi * g_ref(i);
  return x;
}

double brute_distance(const il::Sample& a, const il::Sample& b, const nn::Normalizer& n) {
  const auto fa = a.features();
  const auto fb = b.features();
  double acc = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const double sd = std::max(n.std(static_cast<Eigen::Index>(i)), nn::Normalizer::kMinStd);
    const double za = (fa[i] - n.mean(static_cast<Eigen::Index>(i))) / sd;
    const double zb = (fb[i] - n.mean(static_cast<Eigen::Index>(i))) / sd;
    acc += (za - zb) * (za - zb);
  }
  return acc;
}

std::vector<il::Sample> brute_screen(const std::vector<il::Sample>& data,
                                     const std::vector<il::Sample>& memory,
                                     const nn::Normalizer& n, double eta_d) {
  std::vector<il::Sample> kept;
  for (const auto& s : data) {
    bool novel = true;
    for (const auto& m : memory) {
      if (brute_distance(s, m, n) < eta_d) novel = false;
    }
    bool similar_exists = false;
    bool no_worse = true;
    for (const auto& m : memory) {
      if (brute_distance(s, m, n) <= eta_d) {
        similar_exists = true;
        if (s.steer * s.steer > m.steer * m.steer) no_worse = false;
      }
    }
    if (novel || (similar_exists && no_worse)) kept.push_back(s);
  }
  return kept;
}

std::vector<il::Sample> brute_update(std::vector<il::Sample> memory,
                                     const std::vector<il::Sample>& incoming,
                                     const nn::Normalizer& n, double eta_m, std::size_t capacity) {
  for (const auto& s : incoming) {
    std::vector<bool> member(memory.size(), false);
    bool any = false;
    for (std::size_t j = 0; j < memory.size(); ++j) {
      member[j] = brute_distance(s, memory[j], n) <= eta_m;
      any = any || member[j];
    }
    if (!any) {
      if (capacity == 0 || memory.size() < capacity) memory.push_back(s);
      continue;
    }
    // Candidates in order: incumbents by memory position, newcomer last. The
    // first candidate attaining the minimum wins, so incumbents win ties.
    const il::Sample* winner = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < memory.size(); ++j) {
      if (member[j] && memory[j].steer * memory[j].steer < best) {
        best = memory[j].steer * memory[j].steer;
        winner = &memory[j];
      }
    }
    if (s.steer * s.steer < best) winner = &s;
    const il::Sample w = *winner;
    std::vector<il::Sample> next;
    bool placed = false;
    for (std::size_t j = 0; j < memory.size(); ++j) {
      if (!member[j]) {
        next.push_back(memory[j]);
      } else if (!placed) {
        next.push_back(w);
        placed = true;
      }
    }
    memory = std::move(next);
  }
  return memory;
}

double lqr_first_action(const Eigen::Matrix4d& A, const Eigen::Vector4d& B, const Eigen::Vector4d& q,
                        double r, int horizon, const Eigen::Vector4d& x0) {
  const Eigen::Matrix4d Q = q.asDiagonal();
  Eigen::Matrix4d P = Q;
  Eigen::RowVector4d K = Eigen::RowVector4d::Zero();
  for (int k = horizon - 1; k >= 0; --k) {
    const double s = r + B.dot(P * B);
    K = (B.transpose() * P * A) / s;
    const Eigen::Matrix4d next = (k == 0 ? Eigen::Matrix4d::Zero() : Q) + A.transpose() * P * (A - B * K);
    P = 0.5 * (next + next.transpose());
  }
  return -(K * x0)(0);
}

double HeadingMap::invert(double vy0, double r0, double dpsi) const {
  return (dpsi - gain_state(0) * vy0 - gain_state(1) * r0) / gain_steer;
}

namespace {

void lateral_matrices(const sim::VehicleParams& p, double vx, Eigen::Matrix2d& a, Eigen::Vector2d& b) {
  const double cf = p.cornering_stiffness_front, cr = p.cornering_stiffness_rear;
  const double lf = p.dist_front_axle, lr = p.dist_rear_axle;
  a << -(cf + cr) / (p.mass * vx), (lr * cr - lf * cf) / (p.mass * vx) - vx,
      (lr * cr - lf * cf) / (p.yaw_inertia * vx), -(lf * lf * cf + lr * lr * cr) / (p.yaw_inertia * vx);
  b << cf / p.mass, lf * cf / p.yaw_inertia;
}

}  // namespace

HeadingMap heading_map(const sim::VehicleParams& p, double vx, double window) {
  Eigen::Matrix2d a;
  Eigen::Vector2d b;
  lateral_matrices(p, vx, a, b);
  // z = (vy, r, psi, steer): psi' = r, steer' = 0.
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<2, 2>() = a;
  m.block<2, 1>(0, 3) = b;
  m(2, 1) = 1.0;
  const Eigen::Matrix4d e = (m * window).exp();
  HeadingMap h;
  h.gain_state << e(2, 0), e(2, 1);
  h.gain_steer = e(2, 3);
  return h;
}

Eigen::Vector2d steady_state(const sim::VehicleParams& p, double vx, double steer) {
  Eigen::Matrix2d a;
  Eigen::Vector2d b;
  lateral_matrices(p, vx, a, b);
  return a.partialPivLu().solve(-b * steer);
}

il::Sample random_sample(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  il::StateFeatures st{g(rng), g(rng), g(rng)};
  sim::TransitionFeatures tr{g(rng), g(rng)};
  return il::Sample::make(st, tr, u(rng));
}

}  // namespace llpl::testing
