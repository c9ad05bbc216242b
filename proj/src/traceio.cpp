#include "fogsim/traceio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace fogsim {

namespace {

constexpr std::string_view kTraceHeader =
    "time_s,ue_id,x_m,y_m,speed_mps,heading_rad";
constexpr std::string_view kFogHeader = "fog_id,x_m,y_m,radius_m,capacity_hz";

constexpr std::uint64_t kTraceTag = 0x7472616365ULL;  // "trace"
constexpr std::uint64_t kUeTag = 0x7565ULL;
constexpr std::uint64_t kFogTag = 0x666f67ULL;

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_number(std::string_view field, std::size_t line_no,
                    const char* what) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError(line_no, std::string("non-numeric ") + what + " '" +
                                  std::string(field) + "'");
  return value;
}

/// Walks full lines of `bytes`, calling fn(line_no, line) starting at line 1.
template <typename Fn>
void for_each_line(std::string_view bytes, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    ++line_no;
    fn(line_no, trim_cr(bytes.substr(start, end - start)));
    if (end == bytes.size()) break;
    start = end + 1;
  }
}

}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  if (std::strtod(buf, nullptr) != v)
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failure on " + path.string());
}

std::vector<TraceSample> parse_trace_csv(std::string_view bytes) {
  std::vector<TraceSample> samples;
  std::map<std::string, double, std::less<>> last_time;
  bool saw_header = false;

  for_each_line(bytes, [&](std::size_t line_no, std::string_view line) {
    if (line_no == 1) {
      if (line != kTraceHeader)
        throw ParseError(1, "expected header '" + std::string(kTraceHeader) +
                                "', got '" + std::string(line) + "'");
      saw_header = true;
      return;
    }
    if (line.empty()) return;
    const auto fields = split_fields(line);
    if (fields.size() != 6)
      throw ParseError(line_no, "expected 6 columns, got " +
                                    std::to_string(fields.size()));
    TraceSample s;
    s.time_s = parse_number(fields[0], line_no, "time_s");
    s.ue_id = std::string(fields[1]);
    s.x_m = parse_number(fields[2], line_no, "x_m");
    s.y_m = parse_number(fields[3], line_no, "y_m");
    s.speed_mps = parse_number(fields[4], line_no, "speed_mps");
    s.heading_rad = normalize_heading(parse_number(fields[5], line_no,
                                                   "heading_rad"));
    if (s.ue_id.empty()) throw ParseError(line_no, "empty ue_id");
    if (s.time_s < 0.0) throw ParseError(line_no, "negative time_s");
    if (s.speed_mps < 0.0) throw ParseError(line_no, "negative speed_mps");
    if (auto it = last_time.find(s.ue_id); it != last_time.end()) {
      if (s.time_s <= it->second)
        throw ParseError(line_no, "time regression for UE '" + s.ue_id + "'");
      it->second = s.time_s;
    } else {
      last_time.emplace(s.ue_id, s.time_s);
    }
    samples.push_back(std::move(s));
  });

  if (!saw_header) throw ParseError(1, "empty trace file");
  return samples;
}

std::string serialize_trace_csv(std::span<const TraceSample> samples) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& s : samples) {
    out += fmt_double(s.time_s);
    out += ',';
    out += s.ue_id;
    out += ',';
    out += fmt_double(s.x_m);
    out += ',';
    out += fmt_double(s.y_m);
    out += ',';
    out += fmt_double(s.speed_mps);
    out += ',';
    out += fmt_double(s.heading_rad);
    out += '\n';
  }
  return out;
}

double sumo_angle_to_heading(double angle_deg) {
  return normalize_heading((90.0 - angle_deg) * std::numbers::pi / 180.0);
}

namespace {

std::optional<std::string_view> find_attr(std::string_view attrs,
                                          std::string_view name) {
  std::size_t pos = 0;
  while (pos < attrs.size()) {
    const std::size_t hit = attrs.find(name, pos);
    if (hit == std::string_view::npos) return std::nullopt;
    const std::size_t after = hit + name.size();
    const bool boundary_before =
        hit == 0 || attrs[hit - 1] == ' ' || attrs[hit - 1] == '\t';
    if (!boundary_before || after >= attrs.size() || attrs[after] != '=') {
      pos = hit + 1;
      continue;
    }
    if (after + 1 >= attrs.size() || attrs[after + 1] != '"') return std::nullopt;
    const std::size_t close = attrs.find('"', after + 2);
    if (close == std::string_view::npos) return std::nullopt;
    return attrs.substr(after + 2, close - (after + 2));
  }
  return std::nullopt;
}

}  // namespace

std::vector<TraceSample> parse_sumo_fcd(std::string_view bytes) {
  std::vector<TraceSample> samples;
  bool in_timestep = false;
  double current_time = 0.0;
  std::size_t pos = 0;
  std::size_t line_no = 1;

  const auto advance_to = [&](std::size_t target) {
    for (std::size_t i = pos; i < target && i < bytes.size(); ++i)
      if (bytes[i] == '\n') ++line_no;
    pos = target;
  };

  while (true) {
    const std::size_t open = bytes.find('<', pos);
    if (open == std::string_view::npos) break;
    advance_to(open);
    if (bytes.compare(open, 4, "<!--") == 0) {
      const std::size_t end = bytes.find("-->", open);
      if (end == std::string_view::npos)
        throw ParseError(line_no, "unterminated comment");
      advance_to(end + 3);
      continue;
    }
    if (bytes.compare(open, 2, "<?") == 0) {
      const std::size_t end = bytes.find("?>", open);
      if (end == std::string_view::npos)
        throw ParseError(line_no, "unterminated declaration");
      advance_to(end + 2);
      continue;
    }
    const std::size_t close = bytes.find('>', open);
    if (close == std::string_view::npos)
      throw ParseError(line_no, "unterminated tag");
    std::string_view tag = bytes.substr(open + 1, close - open - 1);
    const std::size_t tag_line = line_no;
    advance_to(close + 1);

    bool self_closing = false;
    if (!tag.empty() && tag.back() == '/') {
      self_closing = true;
      tag.remove_suffix(1);
    }
    if (!tag.empty() && tag.front() == '/') {
      if (tag.substr(1) == "timestep") in_timestep = false;
      continue;
    }
    const std::size_t name_end = tag.find_first_of(" \t\n\r");
    const std::string_view name = tag.substr(0, name_end);
    const std::string_view attrs =
        name_end == std::string_view::npos ? std::string_view{}
                                           : tag.substr(name_end);

    if (name == "timestep") {
      const auto time_attr = find_attr(attrs, "time");
      if (!time_attr)
        throw ParseError(tag_line, "timestep without time attribute");
      current_time = parse_number(*time_attr, tag_line, "time");
      in_timestep = !self_closing;
    } else if (name == "vehicle") {
      if (!in_timestep)
        throw ParseError(tag_line, "vehicle element outside a timestep");
      TraceSample s;
      s.time_s = current_time;
      const auto id = find_attr(attrs, "id");
      const auto x = find_attr(attrs, "x");
      const auto y = find_attr(attrs, "y");
      const auto speed = find_attr(attrs, "speed");
      const auto angle = find_attr(attrs, "angle");
      if (!id || !x || !y || !speed || !angle)
        throw ParseError(tag_line, "vehicle missing id/x/y/speed/angle");
      s.ue_id = std::string(*id);
      s.x_m = parse_number(*x, tag_line, "x");
      s.y_m = parse_number(*y, tag_line, "y");
      s.speed_mps = parse_number(*speed, tag_line, "speed");
      s.heading_rad =
          sumo_angle_to_heading(parse_number(*angle, tag_line, "angle"));
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

std::vector<TraceSample> synthetic_trace(int n_ues, double field_w_m,
                                         double field_h_m, double horizon_s,
                                         Rng& rng) {
  if (n_ues < 1) throw ScenarioError("synthetic trace needs n_ues >= 1");
  std::vector<TraceSample> samples;
  const int steps = static_cast<int>(std::floor(horizon_s));
  int width = 1;
  for (int v = n_ues - 1; v >= 10; v /= 10) ++width;
  width = std::min(width, 9);

  for (int u = 0; u < n_ues; ++u) {
    char name[32];
    std::snprintf(name, sizeof(name), "ue%0*d", width, u);
    double x = rng.uniform(0.0, field_w_m);
    double y = rng.uniform(0.0, field_h_m);
    double wx = 0.0, wy = 0.0, speed = 0.0, heading = 0.0;
    const auto pick_waypoint = [&] {
      do {
        wx = rng.uniform(0.0, field_w_m);
        wy = rng.uniform(0.0, field_h_m);
      } while (std::hypot(wx - x, wy - y) < 1.0);
      speed = rng.uniform(5.0, 15.0);
      heading = normalize_heading(std::atan2(wy - y, wx - x));
    };
    pick_waypoint();

    for (int t = 0; t <= steps; ++t) {
      samples.push_back({static_cast<double>(t), name, x, y, speed, heading});
      double remaining = 1.0;
      while (remaining > 1e-12) {
        const double dist = std::hypot(wx - x, wy - y);
        const double step = speed * remaining;
        if (step < dist) {
          x += (wx - x) / dist * step;
          y += (wy - y) / dist * step;
          remaining = 0.0;
        } else {
          remaining -= dist / speed;
          x = wx;
          y = wy;
          pick_waypoint();
        }
      }
    }
  }
  return samples;
}

Trace::Trace(std::vector<TraceSample> samples) {
  std::map<std::string, std::vector<TraceSample>, std::less<>> grouped;
  for (auto& s : samples) grouped[s.ue_id].push_back(std::move(s));
  for (auto& [name, rows] : grouped) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const TraceSample& a, const TraceSample& b) {
                       return a.time_s < b.time_s;
                     });
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].time_s <= rows[i - 1].time_s)
        throw ScenarioError("duplicate trace sample for UE '" + name + "' at t=" +
                            fmt_double(rows[i].time_s));
    duration_s_ = std::max(duration_s_, rows.back().time_s);
    names_.push_back(name);
    per_ue_.push_back(std::move(rows));
  }
}

MobilityState Trace::state_at(std::size_t ue, double t_s, bool* exact) const {
  const auto& rows = per_ue_[ue];
  auto it = std::upper_bound(rows.begin(), rows.end(), t_s + 1e-9,
                             [](double t, const TraceSample& s) {
                               return t < s.time_s;
                             });
  const TraceSample& s = it == rows.begin() ? rows.front() : *(it - 1);
  if (exact) *exact = std::abs(s.time_s - t_s) <= 1e-9;
  return {t_s, s.x_m, s.y_m, s.speed_mps, s.heading_rad};
}

PresenceWindow Trace::presence(std::size_t ue) const {
  return {per_ue_[ue].front().time_s, per_ue_[ue].back().time_s};
}

double Trace::actual_exit_time(std::size_t ue, const FogNode& fog,
                               double t_from) const {
  const auto& rows = per_ue_[ue];
  auto it = std::upper_bound(rows.begin(), rows.end(), t_from + 1e-9,
                             [](double t, const TraceSample& s) {
                               return t < s.time_s;
                             });
  for (; it != rows.end(); ++it)
    if (!fog.covers(it->x_m, it->y_m)) return it->time_s;
  // Covered through the last sample; the UE is held there afterwards.
  return std::numeric_limits<double>::infinity();
}

std::vector<FogNode> parse_fog_layout_csv(std::string_view bytes) {
  std::vector<FogNode> fogs;
  bool saw_header = false;
  for_each_line(bytes, [&](std::size_t line_no, std::string_view line) {
    if (line_no == 1) {
      if (line != kFogHeader)
        throw ParseError(1, "expected header '" + std::string(kFogHeader) +
                                "', got '" + std::string(line) + "'");
      saw_header = true;
      return;
    }
    if (line.empty()) return;
    const auto fields = split_fields(line);
    if (fields.size() != 5)
      throw ParseError(line_no, "expected 5 columns, got " +
                                    std::to_string(fields.size()));
    const double id = parse_number(fields[0], line_no, "fog_id");
    const double x = parse_number(fields[1], line_no, "x_m");
    const double y = parse_number(fields[2], line_no, "y_m");
    const double radius = parse_number(fields[3], line_no, "radius_m");
    const double capacity = parse_number(fields[4], line_no, "capacity_hz");
    if (radius <= 0.0) throw ParseError(line_no, "radius_m must be > 0");
    if (capacity <= 0.0) throw ParseError(line_no, "capacity_hz must be > 0");
    const int fog_id = static_cast<int>(id);
    for (const auto& f : fogs)
      if (f.id == fog_id)
        throw ParseError(line_no, "duplicate fog_id " + std::to_string(fog_id));
    fogs.emplace_back(fog_id, x, y, radius, capacity);
  });
  if (!saw_header) throw ParseError(1, "empty fog layout file");
  return fogs;
}

std::string serialize_fog_layout_csv(std::span<const FogNode> fogs) {
  std::string out(kFogHeader);
  out += '\n';
  for (const auto& f : fogs) {
    out += std::to_string(f.id);
    out += ',';
    out += fmt_double(f.x_m);
    out += ',';
    out += fmt_double(f.y_m);
    out += ',';
    out += fmt_double(f.radius_m);
    out += ',';
    out += fmt_double(f.capacity_hz);
    out += '\n';
  }
  return out;
}

std::vector<FogNode> auto_fog_layout(int n, double field_w_m, double field_h_m,
                                     std::pair<double, double> capacity_hz,
                                     Rng& rng) {
  const int cols = std::max(
      1, static_cast<int>(std::ceil(std::sqrt(n * field_w_m / field_h_m))));
  const int rows = (n + cols - 1) / cols;
  const double sx = field_w_m / cols;
  const double sy = field_h_m / rows;
  const double radius = 1.5 * std::min(sx, sy);
  std::vector<FogNode> fogs;
  fogs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    fogs.emplace_back(i, (c + 0.5) * sx, (r + 0.5) * sy, radius,
                      rng.uniform(capacity_hz.first, capacity_hz.second));
  }
  return fogs;
}

namespace {

using nlohmann::json;

class ConfigReader {
 public:
  ConfigReader(const json& obj, std::string prefix,
               std::vector<std::string>& problems)
      : obj_(obj), prefix_(std::move(prefix)), problems_(problems) {}

  void scalar(const char* key, double& out) {
    if (auto it = obj_.find(key); it != obj_.end()) {
      if (!read_number(*it, out)) type_error(key, "a number");
      seen_.push_back(key);
    }
  }

  void scalar_int(const char* key, int& out) {
    if (auto it = obj_.find(key); it != obj_.end()) {
      if (it->is_number_integer())
        out = it->get<int>();
      else
        type_error(key, "an integer");
      seen_.push_back(key);
    }
  }

  void flag(const char* key, bool& out) {
    if (auto it = obj_.find(key); it != obj_.end()) {
      if (it->is_boolean())
        out = it->get<bool>();
      else
        type_error(key, "a boolean");
      seen_.push_back(key);
    }
  }

  /// A range key accepts either a scalar (degenerate range) or [lo, hi].
  void range(const char* key, std::pair<double, double>& out) {
    if (auto it = obj_.find(key); it != obj_.end()) {
      double v = 0.0;
      if (read_number(*it, v)) {
        out = {v, v};
      } else if (it->is_array() && it->size() == 2 && read_number((*it)[0], out.first) &&
                 read_number((*it)[1], out.second)) {
        // parsed in the condition
      } else {
        type_error(key, "a number or [lo, hi]");
      }
      seen_.push_back(key);
    }
  }

  const json* object(const char* key) {
    if (auto it = obj_.find(key); it != obj_.end()) {
      seen_.push_back(key);
      if (it->is_object()) return &*it;
      type_error(key, "an object");
    }
    return nullptr;
  }

  void finish() {
    for (const auto& [key, value] : obj_.items()) {
      (void)value;
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
        problems_.push_back("unknown key '" + prefix_ + key + "'");
    }
  }

 private:
  static bool read_number(const json& j, double& out) {
    if (!j.is_number()) return false;
    out = j.get<double>();
    return true;
  }

  void type_error(const char* key, const char* expected) {
    problems_.push_back("key '" + prefix_ + key + "' must be " + expected);
  }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& problems_;
  std::vector<std::string> seen_;
};

void throw_if_problems(const std::vector<std::string>& problems) {
  if (problems.empty()) return;
  std::string msg = "invalid scenario config:";
  for (const auto& p : problems) msg += "\n  - " + p;
  throw ScenarioError(msg);
}

}  // namespace

ScenarioConfig parse_scenario_config(std::string_view json_bytes) {
  json root;
  try {
    root = json::parse(json_bytes);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object())
    throw ScenarioError("config root must be a JSON object");

  ScenarioConfig cfg;
  std::vector<std::string> problems;
  ConfigReader reader(root, "", problems);
  reader.scalar("horizon_s", cfg.horizon_s);
  reader.scalar_int("n_ues", cfg.n_ues);
  reader.scalar_int("n_fog", cfg.n_fog);
  reader.scalar("field_w_m", cfg.field_w_m);
  reader.scalar("field_h_m", cfg.field_h_m);
  reader.range("ue_freq_hz", cfg.ue_freq_hz);
  reader.range("fog_capacity_hz", cfg.fog_capacity_hz);
  reader.range("tx_power_w", cfg.tx_power_w);
  reader.range("bandwidth_hz", cfg.bandwidth_hz);
  reader.scalar("noise_dbm", cfg.noise_dbm);
  reader.scalar("interference_dbm", cfg.interference_dbm);
  reader.scalar("wired_rate_bps", cfg.wired_rate_bps);
  reader.scalar("kappa", cfg.kappa);
  reader.scalar("delta", cfg.delta);
  reader.scalar("alloc_min_hz", cfg.alloc_min_hz);
  reader.range("data_size_bits", cfg.data_size_bits);
  reader.range("cycles_per_bit", cfg.cycles_per_bit);
  reader.range("latency_weight", cfg.latency_weight);
  reader.range("periodic_period_s", cfg.periodic_period_s);
  reader.range("aperiodic_rate_hz", cfg.aperiodic_rate_hz);

  if (const json* solver = reader.object("solver")) {
    ConfigReader sr(*solver, "solver.", problems);
    sr.scalar_int("population", cfg.solver.population);
    sr.scalar_int("generations", cfg.solver.generations);
    sr.scalar_int("clusters", cfg.solver.clusters);
    sr.scalar("fnef_coeff", cfg.solver.fnef_coeff);
    sr.scalar("latency_thresh_s", cfg.solver.latency_thresh_s);
    sr.scalar("step_scale", cfg.solver.step_scale);
    sr.scalar("selection_prob", cfg.solver.selection_prob);
    sr.flag("parallel", cfg.solver.parallel);
    sr.finish();
  }
  if (const json* gcga = reader.object("gcga")) {
    ConfigReader gr(*gcga, "gcga.", problems);
    gr.scalar_int("population", cfg.gcga.population);
    gr.scalar_int("generations", cfg.gcga.generations);
    gr.scalar_int("tournament", cfg.gcga.tournament);
    gr.scalar("crossover_rate", cfg.gcga.crossover_rate);
    gr.scalar("mutation_rate", cfg.gcga.mutation_rate);
    gr.scalar("mutation_scale", cfg.gcga.mutation_scale);
    gr.scalar("cost_band", cfg.gcga.cost_band);
    gr.flag("parallel", cfg.gcga.parallel);
    gr.finish();
  }
  reader.finish();
  throw_if_problems(problems);
  cfg.validate();
  return cfg;
}

void ScenarioConfig::validate() const {
  std::vector<std::string> problems;
  const auto require = [&](bool ok, const char* msg) {
    if (!ok) problems.emplace_back(msg);
  };
  const auto positive_range = [&](std::pair<double, double> r,
                                  const char* name) {
    if (!(r.first > 0.0) || !(r.second >= r.first))
      problems.push_back(std::string(name) + " must be a positive range");
  };

  require(horizon_s > 0.0, "horizon_s must be > 0");
  require(n_ues >= 1, "n_ues must be >= 1");
  require(n_fog >= 1, "n_fog must be >= 1");
  require(field_w_m > 0.0 && field_h_m > 0.0, "field dimensions must be > 0");
  positive_range(ue_freq_hz, "ue_freq_hz");
  positive_range(fog_capacity_hz, "fog_capacity_hz");
  positive_range(tx_power_w, "tx_power_w");
  positive_range(bandwidth_hz, "bandwidth_hz");
  positive_range(data_size_bits, "data_size_bits");
  positive_range(cycles_per_bit, "cycles_per_bit");
  positive_range(periodic_period_s, "periodic_period_s");
  require(aperiodic_rate_hz.first >= 0.0 &&
              aperiodic_rate_hz.second >= aperiodic_rate_hz.first,
          "aperiodic_rate_hz must be a non-negative range");
  require(latency_weight.first >= 0.0 && latency_weight.second <= 1.0 &&
              latency_weight.first <= latency_weight.second,
          "latency_weight must be a range within [0,1]");
  require(wired_rate_bps > 0.0, "wired_rate_bps must be > 0");
  require(kappa > 0.0, "kappa must be > 0");
  require(delta >= 0.0, "delta must be >= 0");
  require(alloc_min_hz > 0.0, "alloc_min_hz must be > 0");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    problems.push_back(std::string("solver.") + e.what());
  }
  require(gcga.population >= 1, "gcga.population must be >= 1");
  require(gcga.generations >= 0, "gcga.generations must be >= 0");
  require(gcga.tournament >= 1, "gcga.tournament must be >= 1");
  require(gcga.crossover_rate >= 0.0 && gcga.crossover_rate <= 1.0,
          "gcga.crossover_rate must be in [0,1]");
  require(gcga.mutation_rate >= 0.0 && gcga.mutation_rate <= 1.0,
          "gcga.mutation_rate must be in [0,1]");
  require(gcga.mutation_scale >= 0.0, "gcga.mutation_scale must be >= 0");
  require(gcga.cost_band >= 0.0, "gcga.cost_band must be >= 0");
  throw_if_problems(problems);
}

void Scenario::validate() const {
  std::vector<std::string> problems;
  if (trace.n_ues() == 0) problems.emplace_back("trace has no UEs");
  if (fogs.empty()) problems.emplace_back("fog layout is empty");
  if (trace.duration_s() + 1e-9 < horizon_s)
    problems.push_back("trace duration " + fmt_double(trace.duration_s()) +
                       " s does not cover horizon " + fmt_double(horizon_s) +
                       " s");
  for (const auto& f : fogs) {
    if (f.x_m < 0.0 || f.x_m > field_w_m || f.y_m < 0.0 || f.y_m > field_h_m)
      problems.push_back("fog node " + std::to_string(f.id) +
                         " lies outside the field bounds");
    if (!(f.capacity_hz > 0.0) || !(f.radius_m > 0.0))
      problems.push_back("fog node " + std::to_string(f.id) +
                         " has non-positive radius or capacity");
  }
  if (ues.size() != trace.n_ues())
    problems.emplace_back("UE parameter set does not match the trace");
  throw_if_problems(problems);
}

Scenario build_scenario(const ScenarioConfig& config,
                        std::optional<std::vector<TraceSample>> trace,
                        std::optional<std::vector<FogNode>> fogs,
                        std::uint64_t seed) {
  config.validate();
  Scenario sc;
  sc.config = config;
  sc.seed = seed;
  sc.horizon_s = config.horizon_s;
  sc.field_w_m = config.field_w_m;
  sc.field_h_m = config.field_h_m;

  if (!trace) {
    Rng trace_rng(mix_seed({seed, kTraceTag}));
    trace = synthetic_trace(config.n_ues, config.field_w_m, config.field_h_m,
                            config.horizon_s, trace_rng);
  }
  sc.trace = Trace(std::move(*trace));

  if (fogs) {
    sc.fogs = std::move(*fogs);
  } else {
    Rng fog_rng(mix_seed({seed, kFogTag}));
    sc.fogs = auto_fog_layout(config.n_fog, config.field_w_m, config.field_h_m,
                              config.fog_capacity_hz, fog_rng);
  }

  sc.ues.reserve(sc.trace.n_ues());
  for (std::size_t i = 0; i < sc.trace.n_ues(); ++i) {
    Rng ue_rng(mix_seed({seed, kUeTag, static_cast<std::uint64_t>(i)}));
    UserEquipment ue;
    ue.id = static_cast<int>(i);
    ue.local_frequency_hz =
        ue_rng.uniform(config.ue_freq_hz.first, config.ue_freq_hz.second);
    ue.tx_power_w =
        ue_rng.uniform(config.tx_power_w.first, config.tx_power_w.second);
    ue.bandwidth_hz =
        ue_rng.uniform(config.bandwidth_hz.first, config.bandwidth_hz.second);
    sc.ues.push_back(ue);
  }

  sc.params.kappa = config.kappa;
  sc.params.noise_dbm = config.noise_dbm;
  sc.params.interference_dbm = config.interference_dbm;
  sc.params.wired_rate_bps = config.wired_rate_bps;
  sc.params.migration_coeff = config.delta;
  sc.params.alloc_min_hz = config.alloc_min_hz;

  sc.generator.periodic_period_s = config.periodic_period_s;
  sc.generator.aperiodic_rate_hz = config.aperiodic_rate_hz;
  sc.generator.data_size_bits = config.data_size_bits;
  sc.generator.cycles_per_bit = config.cycles_per_bit;
  sc.generator.latency_weight = config.latency_weight;
  sc.generator.horizon_s = config.horizon_s;

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::optional<std::filesystem::path>& config_path,
                       const std::optional<std::filesystem::path>& trace_path,
                       const std::optional<std::filesystem::path>& fog_path,
                       std::uint64_t seed) {
  ScenarioConfig config;
  if (config_path)
    config = parse_scenario_config(read_text_file(*config_path));

  std::optional<std::vector<TraceSample>> trace;
  if (trace_path) {
    const std::string bytes = read_text_file(*trace_path);
    const bool xml = trace_path->extension() == ".xml" ||
                     (!bytes.empty() && bytes.front() == '<');
    trace = xml ? parse_sumo_fcd(bytes) : parse_trace_csv(bytes);
  }

  std::optional<std::vector<FogNode>> fogs;
  if (fog_path) fogs = parse_fog_layout_csv(read_text_file(*fog_path));

  return build_scenario(config, std::move(trace), std::move(fogs), seed);
}

}  // namespace fogsim
