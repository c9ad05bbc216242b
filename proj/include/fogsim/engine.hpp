#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fogsim/model.hpp"
#include "fogsim/rng.hpp"
#include "fogsim/solver.hpp"

namespace fogsim {

struct Scenario;        // traceio.hpp
struct PresenceWindow;  // traceio.hpp

enum class EventKind {
  MobilityTick,
  ExecDone,
  MigrationOccurred,
  TransmissionDone,
  ExecStart,
  TaskRelease,
};

/// Queue entries pop in (time, kind, seq) order. The kind rank makes state
/// updates (mobility, pool releases) land before the decisions taken at the
/// same timestamp.
struct Event {
  double time_s = 0.0;
  EventKind kind = EventKind::MobilityTick;
  std::uint64_t seq = 0;
  int task_id = -1;
};

struct TaskGeneratorSpec {
  std::pair<double, double> periodic_period_s{30.0, 40.0};
  std::pair<double, double> aperiodic_rate_hz{0.05, 0.2};
  std::pair<double, double> data_size_bits{125e6, 175e6};
  std::pair<double, double> cycles_per_bit{30.0, 120.0};
  std::pair<double, double> latency_weight{0.0, 1.0};
  double horizon_s = 600.0;
};

/// Periodic plus Poisson-arrival tasks for every UE, release times quantized
/// to the 1 s decision grid, ids assigned in (release, ue) order. The window
/// variant clips each UE's releases to its trace presence.
std::vector<Task> generate_tasks(std::span<const UserEquipment> ues,
                                 const TaskGeneratorSpec& spec, Rng& rng);
std::vector<Task> generate_tasks(std::span<const UserEquipment> ues,
                                 const TaskGeneratorSpec& spec,
                                 std::span<const PresenceWindow> windows,
                                 Rng& rng);

enum class DecisionKind { Local, Fog, Cloud };
std::string_view to_string(DecisionKind kind);

struct TaskRecord {
  int task_id = 0;
  int ue_id = 0;
  double release_t_s = 0.0;
  DecisionKind kind = DecisionKind::Local;
  int fog_id = -1;       // -1 when not a fog decision
  double alloc_hz = 0.0;
  double latency_s = 0.0;
  double energy_j = 0.0;
  int migrated = 0;
  double cost = 0.0;
};

struct MetricsLedger {
  std::vector<TaskRecord> rows;
  int released = 0;
  int completed = 0;
  int migration_count = 0;
  double total_cost = 0.0;
  double mean_task_cost = 0.0;
  double max_task_cost = 0.0;
  double normalized_cost = 0.0;  // mean / max within this run
  int trace_gap_ticks = 0;
  int pool_audit_violations = 0;
  int decision_audit_violations = 0;
  std::uint64_t events_processed = 0;

  void finalize();
};

enum class AlgoKind { Mofco, Gcga, RandomAssign, OnlyCloud, OnlyLocal };

/// CLI spelling of an algorithm (gcga maps to the "gcga-approx" label in
/// outputs).
std::string_view to_string(AlgoKind kind);
std::string_view algo_label(AlgoKind kind);
std::optional<AlgoKind> parse_algo(std::string_view name);

using AssignFn = std::function<std::vector<OffloadDecision>(
    std::span<const Task>, const WorldSnapshot&)>;

AssignFn make_assigner(AlgoKind kind, const Scenario& scenario,
                       std::uint64_t seed);

/// Runs the full discrete-event loop: 1 s mobility ticks from the trace,
/// per-tick batched assignment, pool admission, ground-truth migration
/// detection, and drains the queue past the horizon until empty.
MetricsLedger run(const Scenario& scenario, AlgoKind algo, std::uint64_t seed);
MetricsLedger run(const Scenario& scenario, const AssignFn& assign,
                  std::uint64_t seed);

/// Mean per-task cost of each ledger divided by the maximum single-task cost
/// across the whole group.
std::vector<double> normalized_cost(
    std::span<const MetricsLedger* const> group);

}  // namespace fogsim
