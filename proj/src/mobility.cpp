#include "fogsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fogsim {

double normalize_heading(double rad) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(rad, two_pi);
  if (r < 0.0) r += two_pi;
  if (r == two_pi) r = 0.0;
  return r;
}

std::pair<double, double> predict_position(const MobilityState& state,
                                           double dt_s) {
  return {state.x_m + state.speed_mps * std::cos(state.heading_rad) * dt_s,
          state.y_m + state.speed_mps * std::sin(state.heading_rad) * dt_s};
}

SojournResult sojourn_time(const MobilityState& state, const FogNode& fog) {
  const double dx = state.x_m - fog.x_m;
  const double dy = state.y_m - fog.y_m;
  const double c = dx * dx + dy * dy - fog.radius_m * fog.radius_m;
  if (c > 0.0) return SojournResult::not_covered();

  const double v = state.speed_mps;
  if (v == 0.0) return SojournResult::forever();

  const double a = v * v;
  const double b =
      2.0 * v * (dx * std::cos(state.heading_rad) + dy * std::sin(state.heading_rad));
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return SojournResult::not_covered();
  // c <= 0 makes the + root the unique non-negative one.
  return SojournResult::exits((-b + std::sqrt(disc)) / (2.0 * a));
}

double migration_probability(double sojourn_s, double task_duration_s) {
  if (task_duration_s <= 0.0) return 0.0;
  if (sojourn_s <= 0.0) return 1.0;  // limit of 1 - exp(-d/s) as s -> 0+
  return 1.0 - std::exp(-task_duration_s / sojourn_s);
}

double migration_probability(const SojournResult& sojourn,
                             double task_duration_s) {
  switch (sojourn.kind) {
    case SojournResult::Kind::Forever: return 0.0;
    case SojournResult::Kind::NotCovered: return 1.0;
    case SojournResult::Kind::Exits:
      return migration_probability(sojourn.seconds, task_duration_s);
  }
  return 1.0;
}

double predicted_workload(double theta_s, std::size_t n_covered,
                          double horizon_s) {
  return std::min(theta_s, horizon_s * static_cast<double>(n_covered));
}

double predicted_workload(const FogNode& fog,
                          std::span<const MobilityState> covered_ues,
                          double horizon_s) {
  double theta = 0.0;
  std::size_t n = 0;
  for (const auto& state : covered_ues) {
    const auto s = sojourn_time(state, fog);
    if (!s.covered()) continue;
    ++n;
    theta += s.finite() ? s.seconds : std::numeric_limits<double>::infinity();
  }
  return predicted_workload(theta, n, horizon_s);
}

}  // namespace fogsim
