#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogsim {

// All quantities are SI: seconds, bits, Hz (cycles/s), watts, joules, meters.

struct Task {
  int id = 0;
  int ue_id = 0;
  double release_time_s = 0.0;
  double data_size_bits = 0.0;     // D
  double cycles_per_bit = 0.0;     // epsilon
  double latency_weight = 0.0;     // lambda^T in [0,1]

  /// CPU cycles needed to execute the task (f = D * epsilon).
  double required_cycles() const { return data_size_bits * cycles_per_bit; }
};

/// Single-server FIFO record for on-device execution.
struct LocalQueue {
  double free_at_s = 0.0;

  double wait_for(double now_s) const {
    return free_at_s > now_s ? free_at_s - now_s : 0.0;
  }
};

struct UserEquipment {
  int id = 0;
  double local_frequency_hz = 0.0;  // c^u
  double tx_power_w = 0.0;          // P^u
  double bandwidth_hz = 0.0;        // W, per-UE channel draw
  LocalQueue queue;
};

/// One committed slice of a fog node's compute pool: `alloc_hz` is held for
/// [start_s, end_s). Entries may start in the future (queued admissions).
struct PoolInterval {
  double alloc_hz = 0.0;
  double start_s = 0.0;
  double end_s = 0.0;
  int task_id = -1;
};

/// Admission bookkeeping for a fog node. A request is admitted as soon as it
/// fits the remaining capacity, but never before any earlier request that is
/// still waiting (FIFO). Completion times are deterministic, so the wait of a
/// new request can be computed in closed form at request time.
class FogPool {
 public:
  FogPool() = default;
  explicit FogPool(double capacity_hz) : capacity_hz_(capacity_hz) {}

  double capacity_hz() const { return capacity_hz_; }

  /// Earliest admission time for a request arriving at `now_s`, without
  /// committing it.
  double earliest_admission(double alloc_hz, double exec_s, double now_s,
                            std::span<const PoolInterval> extra = {}) const;

  /// Commits the request and returns the admission wait in seconds.
  double admit_or_queue(double alloc_hz, double exec_s, double now_s,
                        int task_id = -1);

  /// Sum of allocations held at time t.
  double committed_at(double t_s) const;

  /// Drops intervals that ended at or before `now_s`.
  void drop_completed(double now_s);

  std::span<const PoolInterval> committed() const { return committed_; }

 private:
  double capacity_hz_ = 0.0;
  std::vector<PoolInterval> committed_;
};

/// Shared admission math over a base interval set plus scratch extras; used
/// by FogPool itself and by solver-side what-if evaluation.
double earliest_admission(std::span<const PoolInterval> base,
                          std::span<const PoolInterval> extra,
                          double capacity_hz, double alloc_hz, double exec_s,
                          double now_s);

struct FogNode {
  int id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  double radius_m = 0.0;   // rho, coverage radius
  double capacity_hz = 0.0;
  FogPool pool;

  FogNode() = default;
  FogNode(int id_, double x, double y, double radius, double capacity)
      : id(id_), x_m(x), y_m(y), radius_m(radius), capacity_hz(capacity),
        pool(capacity) {}

  /// Coverage is the closed disk (boundary counts as covered).
  bool covers(double x, double y) const {
    const double dx = x - x_m, dy = y - y_m;
    return dx * dx + dy * dy <= radius_m * radius_m;
  }
};

struct SystemParams {
  double kappa = 1e-27;            // effective switched capacitance, J s^2/cycle^3
  double noise_dbm = -174.0;       // sigma^2
  double interference_dbm = -75.0; // I, constant across pairs
  double wired_rate_bps = 15e6;    // r_fc, fog-to-cloud link
  double migration_coeff = 1e-7;   // delta, cost units per bit
  double alloc_min_hz = 1e6;       // floor on fog allocations
};

inline double dbm_to_mw(double dbm) {
  return std::pow(10.0, dbm / 10.0);
}

struct OffloadDecision {
  int task_id = 0;
  int s = 0;                    // 1 = offloaded
  std::optional<int> fog_id;    // destination fog node, if any
  int cloud = 0;                // 1 = cloud destination
  double alloc_hz = 0.0;        // meaningful only when fog_id is set
};

enum class Constraint { C1, C2, C3, C4, C5 };

std::string to_string(Constraint c);

struct ConstraintViolation : std::runtime_error {
  Constraint which;
  explicit ConstraintViolation(Constraint c);
};

struct NoRelayAvailable : std::runtime_error {
  NoRelayAvailable() : std::runtime_error("no fog node in coverage to relay to the cloud") {}
};

/// Checks C1-C5 against the given fog set; returns the first violated
/// constraint or nullopt if the decision is feasible.
std::optional<Constraint> validate_decision(const OffloadDecision& d,
                                            std::span<const FogNode> fogs);

struct CostBreakdown {
  double latency_s = 0.0;
  double energy_j = 0.0;
  double migration_penalty = 0.0;
  double total = 0.0;
};

struct UplinkQuality {
  double rate_bps = 0.0;
  double sinr = 0.0;
};

/// Wireless uplink between a UE and any covering fog node. Interference is a
/// single constant, so the rate depends on the UE alone.
UplinkQuality uplink(const UserEquipment& ue, const SystemParams& params);

CostBreakdown local_cost(const Task& task, const UserEquipment& ue,
                         double wait_s, const SystemParams& params);

CostBreakdown fog_cost(const Task& task, const UserEquipment& ue,
                       const FogNode& fog, double alloc_hz, double wait_s,
                       const SystemParams& params);

/// Cost of relaying through `relay_fog` to the cloud. Cloud execution time is
/// zero; the task is complete once the wired transfer finishes.
CostBreakdown cloud_cost(const Task& task, const UserEquipment& ue,
                         const FogNode& relay_fog, const SystemParams& params);

/// 1 iff the UE leaves coverage before the task completes (sojourn shorter
/// than the [start, end] span); the boundary case counts as staying.
int migration_indicator(double sojourn_s, double start_s, double end_s);

CostBreakdown with_migration(CostBreakdown cost, const Task& task,
                             int migrated, const SystemParams& params);

struct CostContext {
  const Task& task;
  const UserEquipment& ue;
  std::span<const FogNode> fogs;
  const FogNode* relay = nullptr;  // cloud path relay, if reachable
  double wait_s = 0.0;
  int migrated = 0;
  const SystemParams& params;
};

/// Dispatches to the local / fog / cloud cost of a validated decision.
/// Throws ConstraintViolation for infeasible decisions and NoRelayAvailable
/// for cloud decisions without a relay.
CostBreakdown total_cost(const OffloadDecision& decision,
                         const CostContext& ctx);

}  // namespace fogsim
