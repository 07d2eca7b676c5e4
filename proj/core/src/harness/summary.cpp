#include "llpl/harness/summary.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "llpl/error.hpp"

namespace llpl::harness {

TrajectoryMetrics trajectory_metrics(const sim::DrivingLog& log) {
  TrajectoryMetrics m;
  const auto& r = log.records;
  m.steps = r.size();
  if (r.empty()) return m;
  double sq_lat = 0.0, sq_head = 0.0, abs_lat = 0.0, effort = 0.0;
  for (const auto& rec : r) {
    sq_lat += rec.e_lat * rec.e_lat;
    sq_head += rec.e_head * rec.e_head;
    abs_lat += std::abs(rec.e_lat);
    effort += rec.steer * rec.steer * log.period;
  }
  const double n = static_cast<double>(r.size());
  m.rmse_e_lat = std::sqrt(sq_lat / n);
  m.rmse_e_head = std::sqrt(sq_head / n);
  m.mean_abs_e_lat = abs_lat / n;
  m.control_effort = effort;
  if (r.size() > 1) {
    double sq_rate = 0.0;
    for (std::size_t k = 1; k < r.size(); ++k) {
      const double rate = (r[k].steer - r[k - 1].steer) / log.period;
      sq_rate += rate * rate;
    }
    m.steer_rate_rms = std::sqrt(sq_rate / static_cast<double>(r.size() - 1));
  }
  return m;
}

bool RunSummary::any_off_path() const {
  for (const auto& e : epochs) {
    if (e.off_path) return true;
  }
  return false;
}

namespace {

constexpr const char* kSummaryHeader =
    "method,epoch,rmse_e_lat,rmse_e_head,mean_abs_e_lat,control_effort,steer_rate_rms,steps,"
    "mem_size,mem_increment,screened_count,update_wall_s,off_path,trajectory";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& file) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kIo, "bad number '" + s + "' in " + file.string());
  }
}

std::int64_t parse_int(const std::string& s, const std::filesystem::path& file) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kIo, "bad integer '" + s + "' in " + file.string());
  }
}

}  // namespace

void write_summary_csv(const std::filesystem::path& file, const RunSummary& summary) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  out.precision(17);
  out << kSummaryHeader << '\n';
  for (const auto& e : summary.epochs) {
    const auto& m = e.metrics;
    out << summary.method << ',' << e.label << ',' << m.rmse_e_lat << ',' << m.rmse_e_head << ','
        << m.mean_abs_e_lat << ',' << m.control_effort << ',' << m.steer_rate_rms << ',' << m.steps
        << ',' << e.mem_size << ',' << e.mem_increment << ',' << e.screened_count << ','
        << e.update_wall_s << ',' << (e.off_path ? 1 : 0) << ',' << e.trajectory << '\n';
  }
}

RunSummary read_summary_csv(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) {
    throw Error(ErrorKind::kMissingRun, "no run summary at " + file.string());
  }
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) {
    throw Error(ErrorKind::kIo, "unexpected summary header in " + file.string());
  }
  RunSummary s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 14) throw Error(ErrorKind::kIo, "bad summary row in " + file.string());
    if (s.method.empty()) s.method = c[0];
    EpochSummary e;
    e.label = c[1];
    e.metrics.rmse_e_lat = parse_double(c[2], file);
    e.metrics.rmse_e_head = parse_double(c[3], file);
    e.metrics.mean_abs_e_lat = parse_double(c[4], file);
    e.metrics.control_effort = parse_double(c[5], file);
    e.metrics.steer_rate_rms = parse_double(c[6], file);
    e.metrics.steps = static_cast<std::size_t>(parse_int(c[7], file));
    e.mem_size = parse_int(c[8], file);
    e.mem_increment = parse_int(c[9], file);
    e.screened_count = parse_int(c[10], file);
    e.update_wall_s = parse_double(c[11], file);
    e.off_path = parse_int(c[12], file) != 0;
    e.trajectory = c[13];
    s.epochs.push_back(std::move(e));
  }
  return s;
}

std::vector<ComparisonRow> compare_summaries(const std::vector<RunSummary>& runs,
                                             std::size_t baseline) {
  if (baseline >= runs.size()) throw Error(ErrorKind::kMissingRun, "baseline run index out of range");
  const RunSummary& base = runs[baseline];
  std::vector<ComparisonRow> rows;
  for (const auto& run : runs) {
    for (const auto& e : run.epochs) {
      ComparisonRow row;
      row.method = run.method;
      row.epoch = e.label;
      row.rmse_e_lat = e.metrics.rmse_e_lat;
      row.rmse_e_head = e.metrics.rmse_e_head;
      row.effort = e.metrics.control_effort;
      row.mem_size = e.mem_size;
      row.pct_vs_baseline = std::numeric_limits<double>::quiet_NaN();
      for (const auto& b : base.epochs) {
        if (b.label != e.label) continue;
        const double ref = b.metrics.rmse_e_lat;
        if (ref > 0.0) {
          row.pct_vs_baseline = 100.0 * (ref - e.metrics.rmse_e_lat) / ref;
        } else if (e.metrics.rmse_e_lat == ref) {
          row.pct_vs_baseline = 0.0;
        }
        break;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_comparison_csv(const std::filesystem::path& file, const std::vector<ComparisonRow>& rows) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  out.precision(17);
  out << "method,epoch,rmse_e_lat,rmse_e_head,effort,mem_size,pct_vs_baseline\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.epoch << ',' << r.rmse_e_lat << ',' << r.rmse_e_head << ','
        << r.effort << ',' << r.mem_size << ',' << r.pct_vs_baseline << '\n';
  }
}

}  // namespace llpl::harness
