#include "llpl/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "llpl/error.hpp"

namespace llpl::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw Error(ErrorKind::kConfig, "invalid value '" + value + "' for " + key + ": expected " + what);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, raw, "a number");
  return out;
}

long long to_integer(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, raw, "an integer");
  return out;
}

std::size_t to_count(const std::string& key, const std::string& raw) {
  const long long v = to_integer(key, raw);
  if (v < 0) bad_value(key, raw, "a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, raw, "a boolean");
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
std::string fmt_list(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(values[i]);
    } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
      out += values[i].string();
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

struct Binding {
  std::string section;
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

Binding real(const std::string& sec, const std::string& key, double& ref) {
  const std::string name = sec + "." + key;
  return {sec, key, [&ref, name](const std::string& v) { ref = to_double(name, v); },
          [&ref] { return fmt(ref); }};
}

Binding integer(const std::string& sec, const std::string& key, int& ref) {
  const std::string name = sec + "." + key;
  return {sec, key, [&ref, name](const std::string& v) { ref = static_cast<int>(to_integer(name, v)); },
          [&ref] { return std::to_string(ref); }};
}

Binding count(const std::string& sec, const std::string& key, std::size_t& ref) {
  const std::string name = sec + "." + key;
  return {sec, key, [&ref, name](const std::string& v) { ref = to_count(name, v); },
          [&ref] { return std::to_string(ref); }};
}

Binding seed(const std::string& sec, const std::string& key, std::uint64_t& ref) {
  const std::string name = sec + "." + key;
  return {sec, key, [&ref, name](const std::string& v) { ref = to_count(name, v); },
          [&ref] { return std::to_string(ref); }};
}

Binding flag(const std::string& sec, const std::string& key, bool& ref) {
  const std::string name = sec + "." + key;
  return {sec, key, [&ref, name](const std::string& v) { ref = to_bool(name, v); },
          [&ref] { return std::string(ref ? "true" : "false"); }};
}

Binding path(const std::string& sec, const std::string& key, std::filesystem::path& ref) {
  return {sec, key, [&ref](const std::string& v) { ref = trim(v); }, [&ref] { return ref.string(); }};
}

Binding reals(const std::string& sec, const std::string& key, std::vector<double>& ref) {
  const std::string name = sec + "." + key;
  return {sec, key,
          [&ref, name](const std::string& v) {
            ref.clear();
            for (const auto& item : split_list(v)) ref.push_back(to_double(name, item));
          },
          [&ref] { return fmt_list(ref); }};
}

template <typename E>
Binding choice(const std::string& sec, const std::string& key, E& ref,
               std::function<E(const std::string&)> parse, std::function<std::string(E)> show) {
  return {sec, key, [&ref, parse](const std::string& v) { ref = parse(trim(v)); },
          [&ref, show] { return show(ref); }};
}

std::vector<Binding> bindings(ExperimentConfig& c) {
  std::vector<Binding> b;
  b.push_back(choice<Method>("experiment", "method", c.method, parse_method,
                             [](Method m) { return to_string(m); }));
  b.push_back(seed("experiment", "seed", c.seed));
  b.push_back(path("experiment", "output_dir", c.output_dir));
  b.push_back(path("experiment", "artifact_dir", c.artifact_dir));

  b.push_back(choice<sim::ScenarioId>("scenario", "id", c.scenario, sim::parse_scenario_id,
                                      [](sim::ScenarioId s) { return sim::to_string(s); }));
  auto& sp = c.scenario_params;
  b.push_back(real("scenario", "lane_offset", sp.lane_offset));
  b.push_back(seed("scenario", "road_seed", sp.road_seed));
  b.push_back(integer("scenario", "sections", sp.sections));
  b.push_back(real("scenario", "section_length", sp.section_length));
  b.push_back(real("scenario", "sharp_curvature_max", sp.sharp_curvature_max));
  b.push_back(real("scenario", "gentle_curvature_max", sp.gentle_curvature_max));
  b.push_back(integer("scenario", "sharp_sections", sp.sharp_sections));
  b.push_back(real("scenario", "run_out", sp.run_out));
  b.push_back(path("scenario", "waypoint_csv", sp.waypoint_csv));

  auto& sc = c.schedule;
  b.push_back(choice<Protocol>("schedule", "protocol", sc.protocol, parse_protocol,
                               [](Protocol p) { return to_string(p); }));
  b.push_back(integer("schedule", "epochs", sc.epochs));
  b.push_back(flag("schedule", "update_after_last", sc.update_after_last));
  b.push_back(real("schedule", "speed", sc.speed));
  b.push_back(reals("schedule", "section_speeds", sc.section_speeds));
  b.push_back(real("schedule", "update_duration", sc.update_duration));

  auto& v = c.vehicle;
  b.push_back(real("vehicle", "mass", v.mass));
  b.push_back(real("vehicle", "yaw_inertia", v.yaw_inertia));
  b.push_back(real("vehicle", "dist_front_axle", v.dist_front_axle));
  b.push_back(real("vehicle", "dist_rear_axle", v.dist_rear_axle));
  b.push_back(real("vehicle", "cornering_stiffness_front", v.cornering_stiffness_front));
  b.push_back(real("vehicle", "cornering_stiffness_rear", v.cornering_stiffness_rear));
  b.push_back(real("vehicle", "steer_limit", v.steer_limit));
  b.push_back(real("vehicle", "steer_rate_limit", v.steer_rate_limit));

  b.push_back(real("sim", "control_period", c.sim.control_period));
  b.push_back(real("sim", "integration_substep", c.sim.integration_substep));
  b.push_back(real("sim", "horizon_window", c.sim.horizon_window));
  b.push_back(real("sim", "off_path_limit", c.off_path_limit));

  auto& d = c.demo;
  b.push_back(reals("demo", "speeds", d.speeds));
  b.push_back(real("demo", "duration_per_speed", d.duration_per_speed));
  b.push_back(integer("demo", "sinusoids", d.sinusoids));
  b.push_back(real("demo", "freq_min", d.freq_min));
  b.push_back(real("demo", "freq_max", d.freq_max));
  b.push_back(real("demo", "amp_min", d.amp_min));
  b.push_back(real("demo", "amp_max", d.amp_max));
  b.push_back(real("demo", "noise_std", d.noise_std));
  b.push_back(real("demo", "noise_cutoff", d.noise_cutoff));
  b.push_back(flag("demo", "filter_steer_variation", c.extract.filter_steer_variation));
  b.push_back(real("demo", "max_steer_variation", c.extract.max_steer_variation));

  b.push_back(integer("il", "epochs", c.il.epochs));
  b.push_back(count("il", "batch_size", c.il.batch_size));
  b.push_back(choice<il::Optimizer>("il", "optimizer", c.il.optimizer, il::parse_optimizer,
                                    [](il::Optimizer o) { return il::to_string(o); }));
  b.push_back(real("il", "lr", c.il.lr));

  auto& l = c.llpl;
  b.push_back(real("llpl", "eta_d", l.eta_d));
  b.push_back(real("llpl", "eta_m", l.eta_m));
  b.push_back(count("llpl", "ref_batch_size", l.ref_batch_size));
  b.push_back(integer("llpl", "update_epochs", l.update_epochs));
  b.push_back(count("llpl", "batch_size", l.batch_size));
  b.push_back(real("llpl", "lr", l.lr));
  b.push_back(choice<lifelong::EvalMetric>("llpl", "metric", l.metric, lifelong::parse_eval_metric,
                                           [](lifelong::EvalMetric m) { return lifelong::to_string(m); }));
  b.push_back(count("llpl", "memory_capacity", c.memory_capacity));

  b.push_back(real("lll", "sample_ratio", c.lll_sample_ratio));

  auto& m = c.mpc;
  b.push_back(integer("mpc", "horizon_steps", m.horizon_steps));
  b.push_back({"mpc", "weight_state",
               [&m](const std::string& s) {
                 const auto items = split_list(s);
                 if (items.size() != 4) bad_value("mpc.weight_state", s, "four numbers");
                 for (std::size_t i = 0; i < 4; ++i) m.weight_state[i] = to_double("mpc.weight_state", items[i]);
               },
               [&m] { return fmt_list(std::vector<double>(m.weight_state.begin(), m.weight_state.end())); }});
  b.push_back(real("mpc", "weight_control", m.weight_control));
  b.push_back(flag("mpc", "curvature_feedforward", m.curvature_feedforward));

  auto& r = c.rl;
  b.push_back(real("rl", "gamma", r.gamma));
  b.push_back(real("rl", "lambda_pg", r.lambda_pg));
  b.push_back(real("rl", "tau_target", r.tau_target));
  b.push_back(real("rl", "noise_frac", r.noise_frac));
  b.push_back(integer("rl", "warmup_sections", r.warmup_sections));
  b.push_back({"rl", "critic_layers",
               [&r](const std::string& s) {
                 r.critic_hidden.clear();
                 for (const auto& item : split_list(s)) r.critic_hidden.push_back(to_count("rl.critic_layers", item));
               },
               [&r] { return fmt_list(r.critic_hidden); }});
  b.push_back(count("rl", "batch_size", r.batch_size));
  b.push_back(integer("rl", "updates_per_section", r.updates_per_section));
  b.push_back(real("rl", "actor_lr", r.actor_lr));
  b.push_back(real("rl", "critic_lr", r.critic_lr));

  b.push_back(real("noise", "sigma_vy", c.noise.sigma_vy));
  b.push_back(real("noise", "sigma_yaw_rate", c.noise.sigma_yaw_rate));
  b.push_back(real("noise", "sigma_steer_log", c.noise.sigma_steer_log));
  b.push_back(flag("noise", "corrupt_demonstration", c.noise.corrupt_demonstration));

  b.push_back({"compare", "runs",
               [&c](const std::string& s) {
                 c.compare_runs.clear();
                 for (const auto& item : split_list(s)) c.compare_runs.emplace_back(item);
               },
               [&c] { return fmt_list(c.compare_runs); }});
  b.push_back({"compare", "baseline", [&c](const std::string& s) { c.compare_baseline = trim(s); },
               [&c] { return c.compare_baseline; }});
  return b;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "il") return Method::kIl;
  if (name == "llpl") return Method::kLlpl;
  if (name == "lll") return Method::kLll;
  if (name == "il_retrain") return Method::kIlRetrain;
  if (name == "rl") return Method::kRl;
  if (name == "mpc") return Method::kMpc;
  throw Error(ErrorKind::kConfig, "unknown method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kIl: return "il";
    case Method::kLlpl: return "llpl";
    case Method::kLll: return "lll";
    case Method::kIlRetrain: return "il_retrain";
    case Method::kRl: return "rl";
    case Method::kMpc: return "mpc";
  }
  return "unknown";
}

Protocol parse_protocol(const std::string& name) {
  if (name == "revisit") return Protocol::kRevisit;
  if (name == "sections") return Protocol::kSections;
  if (name == "fixed_duration") return Protocol::kFixedDuration;
  throw Error(ErrorKind::kConfig, "unknown protocol '" + name + "'");
}

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::kRevisit: return "revisit";
    case Protocol::kSections: return "sections";
    case Protocol::kFixedDuration: return "fixed_duration";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  vehicle.validate();
  sim.validate();
  llpl.validate();
  rl.validate();
  auto mpc_checked = mpc;
  mpc_checked.period = sim.control_period;
  mpc_checked.steer_min = -vehicle.steer_limit;
  mpc_checked.steer_max = vehicle.steer_limit;
  mpc_checked.validate();
  if (!(off_path_limit > 0.0)) throw Error(ErrorKind::kConfig, "sim.off_path_limit must be positive");
  if (schedule.epochs < 1) throw Error(ErrorKind::kConfig, "schedule.epochs must be >= 1");
  if (!(schedule.speed > 0.5)) throw Error(ErrorKind::kConfig, "schedule.speed must exceed 0.5 m/s");
  for (double s : schedule.section_speeds) {
    if (!(s > 0.5)) throw Error(ErrorKind::kConfig, "schedule.section_speeds must exceed 0.5 m/s");
  }
  if (!(schedule.update_duration > 0.0)) {
    throw Error(ErrorKind::kConfig, "schedule.update_duration must be positive");
  }
  if (demo.speeds.empty()) throw Error(ErrorKind::kConfig, "demo.speeds must not be empty");
  for (double s : demo.speeds) {
    if (!(s > 0.5)) throw Error(ErrorKind::kConfig, "demo.speeds must exceed 0.5 m/s");
  }
  if (!(demo.duration_per_speed > 0.0)) throw Error(ErrorKind::kConfig, "demo.duration_per_speed must be positive");
  if (demo.sinusoids < 0) throw Error(ErrorKind::kConfig, "demo.sinusoids must be >= 0");
  if (!(demo.freq_min > 0.0 && demo.freq_min <= demo.freq_max)) {
    throw Error(ErrorKind::kConfig, "demo frequencies must satisfy 0 < freq_min <= freq_max");
  }
  if (!(demo.amp_min >= 0.0 && demo.amp_min <= demo.amp_max)) {
    throw Error(ErrorKind::kConfig, "demo amplitudes must satisfy 0 <= amp_min <= amp_max");
  }
  if (!(demo.noise_std >= 0.0) || !(demo.noise_cutoff > 0.0)) {
    throw Error(ErrorKind::kConfig, "demo noise must have std >= 0 and a positive cutoff");
  }
  if (il.epochs < 0 || il.batch_size == 0 || !(il.lr > 0.0)) {
    throw Error(ErrorKind::kConfig, "il needs epochs >= 0, batch_size > 0 and lr > 0");
  }
  if (!(lll_sample_ratio > 0.0 && lll_sample_ratio <= 1.0)) {
    throw Error(ErrorKind::kConfig, "lll.sample_ratio must lie in (0, 1]");
  }
  if (noise.sigma_vy < 0.0 || noise.sigma_yaw_rate < 0.0 || noise.sigma_steer_log < 0.0) {
    throw Error(ErrorKind::kConfig, "noise sigmas must be non-negative");
  }
  if (scenario == sim::ScenarioId::kFromWaypoints && scenario_params.waypoint_csv.empty()) {
    throw Error(ErrorKind::kConfig, "scenario.waypoint_csv is required for id = waypoints");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::kConfig, std::string("malformed config: ") + e.message() +
                                        " at line " + std::to_string(e.line()));
  }
  ExperimentConfig cfg;
  auto table = bindings(cfg);
  std::set<std::string> sections;
  for (const auto& b : table) sections.insert(b.section);

  for (const auto& [section, keys] : tree) {
    if (!keys.data().empty() && keys.empty()) {
      throw Error(ErrorKind::kConfig, "key '" + section + "' must appear inside a section");
    }
    if (!sections.count(section)) throw Error(ErrorKind::kConfig, "unknown section [" + section + "]");
    for (const auto& [key, value] : keys) {
      auto it = std::find_if(table.begin(), table.end(), [&](const Binding& b) {
        return b.section == section && b.key == key;
      });
      if (it == table.end()) throw Error(ErrorKind::kConfig, "unknown key " + section + "." + key);
      it->set(value.data());
    }
  }
  cfg.mpc.period = cfg.sim.control_period;
  cfg.mpc.steer_min = -cfg.vehicle.steer_limit;
  cfg.mpc.steer_max = cfg.vehicle.steer_limit;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  std::ostringstream out;
  std::string current;
  for (const auto& b : bindings(copy)) {
    if (b.section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << b.section << "]\n";
      current = b.section;
    }
    out << b.key << " = " << b.get() << '\n';
  }
  return out.str();
}

void write_config(const std::filesystem::path& file, const ExperimentConfig& cfg) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  out << format_config(cfg);
}

}  // namespace llpl::harness
