#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fogsim/baselines.hpp"
#include "fogsim/engine.hpp"
#include "fogsim/mobility.hpp"
#include "fogsim/model.hpp"
#include "fogsim/rng.hpp"
#include "fogsim/solver.hpp"

namespace fogsim {

struct ParseError : std::runtime_error {
  std::size_t line;
  ParseError(std::size_t line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceSample {
  double time_s = 0.0;
  std::string ue_id;
  double x_m = 0.0;
  double y_m = 0.0;
  double speed_mps = 0.0;
  double heading_rad = 0.0;

  bool operator==(const TraceSample&) const = default;
};

/// Canonical trace format. Header is fixed:
///   time_s,ue_id,x_m,y_m,speed_mps,heading_rad
std::vector<TraceSample> parse_trace_csv(std::string_view bytes);
std::string serialize_trace_csv(std::span<const TraceSample> samples);

/// SUMO floating-car-data export (timestep/vehicle elements). SUMO angles
/// are degrees clockwise from north; headings come out as math radians.
std::vector<TraceSample> parse_sumo_fcd(std::string_view bytes);

/// Converts a SUMO angle to a math-convention heading in [0, 2pi).
double sumo_angle_to_heading(double angle_deg);

/// Random-waypoint motion sampled at 1 s, horizon+1 samples per UE, speeds
/// in [5, 15) m/s, positions inside [0,w] x [0,h].
std::vector<TraceSample> synthetic_trace(int n_ues, double field_w_m,
                                         double field_h_m, double horizon_s,
                                         Rng& rng);

struct PresenceWindow {
  double from_s = 0.0;
  double to_s = 0.0;
};

/// Indexed mobility trace with hold-last-state queries and ground-truth
/// coverage-exit lookup.
class Trace {
 public:
  Trace() = default;
  explicit Trace(std::vector<TraceSample> samples);

  std::size_t n_ues() const { return names_.size(); }
  const std::vector<std::string>& ue_names() const { return names_; }
  double duration_s() const { return duration_s_; }

  /// State at time t: the latest sample at or before t, or the first sample
  /// when t precedes it. `exact` reports whether a sample sits at t.
  MobilityState state_at(std::size_t ue, double t_s,
                         bool* exact = nullptr) const;

  PresenceWindow presence(std::size_t ue) const;

  /// First sample time strictly after t_from where the UE sits outside the
  /// fog disk; +inf when it stays covered through its last sample. This is
  /// the ground truth the solver's sojourn prediction is measured against.
  double actual_exit_time(std::size_t ue, const FogNode& fog,
                          double t_from) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<TraceSample>> per_ue_;
  double duration_s_ = 0.0;
};

/// Fog layout format: fog_id,x_m,y_m,radius_m,capacity_hz
std::vector<FogNode> parse_fog_layout_csv(std::string_view bytes);
std::string serialize_fog_layout_csv(std::span<const FogNode> fogs);

/// Grid placement of n nodes with coverage radius ~1.5x the nearest-neighbor
/// spacing and per-node capacity draws.
std::vector<FogNode> auto_fog_layout(int n, double field_w_m, double field_h_m,
                                     std::pair<double, double> capacity_hz,
                                     Rng& rng);

/// All scenario knobs with their default values. Two-sided entries are
/// per-entity draw ranges; a scalar in the config file collapses the range.
struct ScenarioConfig {
  double horizon_s = 600.0;
  int n_ues = 70;
  int n_fog = 35;
  double field_w_m = 2000.0;
  double field_h_m = 2000.0;
  std::pair<double, double> ue_freq_hz{2e9, 3e9};
  std::pair<double, double> fog_capacity_hz{4e9, 6e9};
  std::pair<double, double> tx_power_w{0.08, 0.1};
  std::pair<double, double> bandwidth_hz{1e7, 2e7};
  double noise_dbm = -174.0;
  double interference_dbm = -75.0;
  double wired_rate_bps = 15e6;
  double kappa = 1e-27;
  double delta = 1e-7;
  double alloc_min_hz = 1e6;
  std::pair<double, double> data_size_bits{125e6, 175e6};
  std::pair<double, double> cycles_per_bit{30.0, 120.0};
  std::pair<double, double> latency_weight{0.0, 1.0};
  std::pair<double, double> periodic_period_s{30.0, 40.0};
  std::pair<double, double> aperiodic_rate_hz{0.05, 0.2};
  SolverConfig solver;
  GcgaConfig gcga;

  /// Collects every problem and throws one ScenarioError listing them all.
  void validate() const;
};

/// Strict JSON parse: unknown keys and out-of-range values are errors. An
/// empty object yields the full defaults.
ScenarioConfig parse_scenario_config(std::string_view json_bytes);

struct Scenario {
  ScenarioConfig config;
  SystemParams params;
  std::vector<UserEquipment> ues;  // per-entity draws applied
  std::vector<FogNode> fogs;
  Trace trace;
  TaskGeneratorSpec generator;
  std::uint64_t seed = 1;
  double horizon_s = 0.0;
  double field_w_m = 0.0;
  double field_h_m = 0.0;

  void validate() const;
};

/// Materializes a scenario: missing trace/fog inputs fall back to a seeded
/// synthetic trace and the auto grid layout. Entity parameter draws are
/// seeded by `seed`.
Scenario build_scenario(const ScenarioConfig& config,
                        std::optional<std::vector<TraceSample>> trace,
                        std::optional<std::vector<FogNode>> fogs,
                        std::uint64_t seed);

Scenario load_scenario(const std::optional<std::filesystem::path>& config_path,
                       const std::optional<std::filesystem::path>& trace_path,
                       const std::optional<std::filesystem::path>& fog_path,
                       std::uint64_t seed);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

/// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v);

}  // namespace fogsim
