#include "llpl/il/demonstration.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "llpl/error.hpp"

namespace llpl::il {

sim::DrivingLog generate_demonstration(const sim::VehicleParams& params, const sim::SimConfig& cfg,
                                       const DemoOptions& options, std::uint64_t seed) {
  if (options.speeds.empty()) throw Error(ErrorKind::kConfig, "demonstration needs at least one speed");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  sim::DrivingLog log;
  log.period = cfg.control_period;
  const double dt = cfg.control_period;
  const auto steps = static_cast<long>(std::lround(options.duration_per_speed / dt));
  // AR(1) discretization of a first-order low-pass with unit stationary variance.
  const double pole = std::exp(-kTwoPi * options.noise_cutoff * dt);
  const double drive = std::sqrt(1.0 - pole * pole);
  const double noise_sigma = options.noise_std * params.steer_limit;

  long tick = 0;
  for (std::size_t seg = 0; seg < options.speeds.size(); ++seg) {
    struct Wave {
      double amp, freq, phase;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < options.sinusoids; ++i) {
      Wave w;
      w.freq = options.freq_min + (options.freq_max - options.freq_min) * unit(rng);
      w.amp = (options.amp_min + (options.amp_max - options.amp_min) * unit(rng)) * params.steer_limit;
      w.phase = kTwoPi * unit(rng);
      waves.push_back(w);
    }

    sim::VehicleState state;
    state.vx = options.speeds[seg];
    double noise = noise_sigma * gauss(rng);
    double prev = 0.0;
    for (long k = 0; k < steps; ++k, ++tick) {
      const double t_local = k * dt;
      double cmd = noise;
      for (const auto& w : waves) cmd += w.amp * std::sin(kTwoPi * w.freq * t_local + w.phase);
      // Start each segment from zero steer so the rate limit shapes the entry.
      const double steer = sim::clip_steer(sim::rate_limit_steer(cmd, prev, params, dt), params);

      sim::LogRecord rec;
      rec.t = tick * dt;
      rec.state = state;
      rec.steer = steer;
      rec.section = static_cast<int>(seg) + 1;
      log.records.push_back(rec);

      state = sim::advance_control_period(state, steer, params, cfg);
      prev = steer;
      noise = pole * noise + drive * noise_sigma * gauss(rng);
    }
  }
  return log;
}

}  // namespace llpl::il
