#pragma once

#include <span>
#include <utility>

#include "fogsim/model.hpp"

namespace fogsim {

struct MobilityState {
  double t_s = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;
  double speed_mps = 0.0;    // v
  double heading_rad = 0.0;  // alpha, 0 = +x, counterclockwise, in [0, 2pi)
};

/// Normalizes an angle into [0, 2pi).
double normalize_heading(double rad);

/// Straight-line position after dt seconds of constant-velocity motion.
std::pair<double, double> predict_position(const MobilityState& state,
                                           double dt_s);

/// Predicted remaining time inside a fog node's coverage disk.
struct SojournResult {
  enum class Kind {
    NotCovered,  // UE is outside the disk
    Exits,       // leaves after `seconds`
    Forever,     // stationary inside the disk, never exits
  };
  Kind kind = Kind::NotCovered;
  double seconds = 0.0;  // meaningful for Exits only

  bool covered() const { return kind != Kind::NotCovered; }
  bool finite() const { return kind == Kind::Exits; }

  static SojournResult not_covered() { return {Kind::NotCovered, 0.0}; }
  static SojournResult exits(double s) { return {Kind::Exits, s}; }
  static SojournResult forever() { return {Kind::Forever, 0.0}; }
};

/// Solves the coverage-exit quadratic for a UE under constant velocity. The
/// smallest non-negative root is the exit time; a UE on the boundary counts
/// as covered.
SojournResult sojourn_time(const MobilityState& state, const FogNode& fog);

/// Probability that the UE exits coverage within `task_duration_s`, under an
/// exponential sojourn model: 1 - exp(-duration/sojourn).
double migration_probability(double sojourn_s, double task_duration_s);
double migration_probability(const SojournResult& sojourn,
                             double task_duration_s);

/// Workload forecast: min(theta, horizon * n), where theta is the summed
/// sojourn time of the covered UEs.
double predicted_workload(double theta_s, std::size_t n_covered,
                          double horizon_s);
double predicted_workload(const FogNode& fog,
                          std::span<const MobilityState> covered_ues,
                          double horizon_s);

}  // namespace fogsim
