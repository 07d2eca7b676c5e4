#include "llpl/il/sample.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "llpl/error.hpp"

namespace llpl::il {

StateFeatures state_features(const sim::VehicleState& s) { return {s.vx, s.vy, s.yaw_rate}; }

Sample Sample::make(const StateFeatures& state, const sim::TransitionFeatures& transition,
                    double steer) {
  Sample s;
  s.state = state;
  s.transition = transition;
  s.steer = steer;
  s.effort = steer * steer;
  return s;
}

std::array<double, kFeatureDim> Sample::features() const {
  return {state.vx, state.vy, state.yaw_rate, transition.dy_body, transition.dpsi};
}

Eigen::VectorXd feature_vector(const StateFeatures& state, const sim::TransitionFeatures& transition) {
  Eigen::VectorXd v(kFeatureDim);
  v << state.vx, state.vy, state.yaw_rate, transition.dy_body, transition.dpsi;
  return v;
}

std::pair<StateFeatures, sim::TransitionFeatures> split_features(const Eigen::VectorXd& f) {
  if (f.size() != kFeatureDim) throw Error(ErrorKind::kShapeMismatch, "feature vector must have 5 entries");
  return {StateFeatures{f[0], f[1], f[2]}, sim::TransitionFeatures{f[3], f[4]}};
}

Eigen::MatrixXd feature_matrix(const std::vector<Sample>& samples) {
  Eigen::MatrixXd m(kFeatureDim, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = feature_vector(samples[i].state, samples[i].transition);
  }
  return m;
}

Eigen::MatrixXd steer_matrix(const std::vector<Sample>& samples) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = samples[i].steer;
  return m;
}

namespace {

// [begin, end) index ranges of contiguous segments: equal section tag and a
// uniform time step.
std::vector<std::pair<std::size_t, std::size_t>> segments(const sim::DrivingLog& log) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto& r = log.records;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= r.size(); ++i) {
    const bool split = i == r.size() || r[i].section != r[i - 1].section ||
                       std::abs(r[i].t - r[i - 1].t - log.period) > 1e-6 * log.period;
    if (split) {
      if (i > begin) out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

}  // namespace

std::size_t count_windows(const sim::DrivingLog& log, int window_steps) {
  const auto w = static_cast<std::size_t>(window_steps);
  std::size_t n = 0;
  for (const auto& [b, e] : segments(log)) {
    if (e - b > w) n += e - b - w;
  }
  return n;
}

std::vector<std::size_t> window_starts(const sim::DrivingLog& log, int window_steps,
                                       const ExtractOptions& options) {
  if (window_steps < 1) throw Error(ErrorKind::kConfig, "window_steps must be >= 1");
  const auto w = static_cast<std::size_t>(window_steps);
  std::vector<std::size_t> out;
  bool any_window = false;
  for (const auto& [b, e] : segments(log)) {
    if (e - b <= w) continue;
    any_window = true;
    for (std::size_t k = b; k + w < e; ++k) {
      if (options.filter_steer_variation) {
        const double s0 = log.records[k].steer;
        double max_dev = 0.0;
        for (std::size_t j = k; j < k + w; ++j) {
          max_dev = std::max(max_dev, std::abs(log.records[j].steer - s0));
        }
        if (max_dev > options.max_steer_variation) continue;
      }
      out.push_back(k);
    }
  }
  if (!any_window) {
    throw Error(ErrorKind::kLogTooShort, "log has no segment longer than the window (" +
                                             std::to_string(window_steps) + " steps)");
  }
  return out;
}

Sample window_sample(const sim::DrivingLog& log, std::size_t k, int window_steps) {
  const auto& start = log.records.at(k);
  const auto& end = log.records.at(k + static_cast<std::size_t>(window_steps)).state;
  const double dx = end.pos_x - start.state.pos_x;
  const double dy = end.pos_y - start.state.pos_y;
  const double c = std::cos(start.state.yaw);
  const double s = std::sin(start.state.yaw);
  sim::TransitionFeatures tr;
  tr.dy_body = -s * dx + c * dy;
  tr.dpsi = sim::wrap_angle(end.yaw - start.state.yaw);
  return Sample::make(state_features(start.state), tr, start.steer);
}

Dataset extract_samples(const sim::DrivingLog& log, int window_steps, const ExtractOptions& options) {
  Dataset out;
  out.provenance = "log";
  for (std::size_t k : window_starts(log, window_steps, options)) {
    out.samples.push_back(window_sample(log, k, window_steps));
  }
  return out;
}

void write_dataset_csv(const std::filesystem::path& file, const Dataset& data, bool with_effort) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  out.precision(17);
  out << "vx,vy,yaw_rate,dy_body,dpsi,steer" << (with_effort ? ",effort" : "") << '\n';
  for (const auto& s : data.samples) {
    out << s.state.vx << ',' << s.state.vy << ',' << s.state.yaw_rate << ',' << s.transition.dy_body
        << ',' << s.transition.dpsi << ',' << s.steer;
    if (with_effort) out << ',' << s.effort;
    out << '\n';
  }
}

Dataset read_dataset_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kMissingArtifact, "dataset not found: " + file.string());
  std::string header;
  std::getline(in, header);
  const bool with_effort = header == "vx,vy,yaw_rate,dy_body,dpsi,steer,effort";
  if (!with_effort && header != "vx,vy,yaw_rate,dy_body,dpsi,steer") {
    throw Error(ErrorKind::kIo, "unexpected dataset header in " + file.string());
  }
  Dataset d;
  d.provenance = file.stem().string();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    StateFeatures st;
    sim::TransitionFeatures tr;
    double steer = 0.0, effort = 0.0;
    char c = 0;
    row >> st.vx >> c >> st.vy >> c >> st.yaw_rate >> c >> tr.dy_body >> c >> tr.dpsi >> c >> steer;
    if (with_effort) row >> c >> effort;
    if (!row) throw Error(ErrorKind::kIo, "malformed dataset row in " + file.string());
    d.samples.push_back(Sample::make(st, tr, steer));
  }
  return d;
}

}  // namespace llpl::il
