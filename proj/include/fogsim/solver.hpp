#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fogsim/mobility.hpp"
#include "fogsim/model.hpp"
#include "fogsim/rng.hpp"

namespace fogsim {

struct SolverConfig {
  int population = 40;            // p
  int generations = 20;           // g
  int clusters = 5;               // k
  double fnef_coeff = 0.3;        // f_eval
  double latency_thresh_s = 4.0;  // l_thresh
  double step_scale = 0.1;        // R, fraction of destination capacity
  double selection_prob = 0.5;    // chance a member enters the competition step
  std::uint64_t rng_seed = 1;
  bool parallel = false;          // OpenMP population kernels; same results either way

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Read-only view of the world at one decision timestep. Fog pools carry the
/// commitments known at snapshot time; everything downstream of a snapshot is
/// a pure function of it.
struct WorldSnapshot {
  double now_s = 0.0;
  std::vector<UserEquipment> ues;
  std::vector<MobilityState> ue_states;  // parallel to `ues`
  std::vector<FogNode> fogs;
  SystemParams params;
  double field_w_m = 0.0;
  double field_h_m = 0.0;

  int ue_index(int ue_id) const;
  int fog_index(int fog_id) const;
};

/// Scratch commitments layered over the snapshot pools so that a candidate
/// joint assignment sees the allocations it already made for earlier tasks.
class PoolExtras {
 public:
  PoolExtras() = default;
  explicit PoolExtras(std::size_t n_fogs) : per_fog_(n_fogs) {}

  void resize(std::size_t n_fogs) { per_fog_.resize(n_fogs); }
  void commit(std::size_t fog_idx, const PoolInterval& iv) {
    per_fog_[fog_idx].push_back(iv);
  }
  std::span<const PoolInterval> for_fog(std::size_t fog_idx) const {
    return per_fog_[fog_idx];
  }
  void clear() {
    for (auto& v : per_fog_) v.clear();
  }

 private:
  std::vector<std::vector<PoolInterval>> per_fog_;
};

struct FogAssessment {
  double wait_s = 0.0;
  double t_trans_s = 0.0;
  double t_exec_s = 0.0;
  double latency_s = 0.0;  // t_exec + t_trans + wait
  double phi = 0.0;        // fog cost total, migration-free
  double mig_prob = 0.0;   // P(exit before completion)
};

/// Per-batch precomputation shared by MOFCO and the baselines: uplink rates,
/// coverage sets, per-node sojourn sums, local/cloud reference costs, and
/// what-if fog evaluation against the pool snapshots.
class BatchContext {
 public:
  BatchContext(std::span<const Task> tasks, const WorldSnapshot& world);

  const WorldSnapshot& world() const { return *world_; }
  std::span<const Task> tasks() const { return tasks_; }
  std::size_t size() const { return tasks_.size(); }

  std::size_t ue_of(std::size_t ti) const { return info_[ti].ue; }
  double rate_bps(std::size_t ti) const { return info_[ti].rate_bps; }
  double t_trans_s(std::size_t ti) const { return info_[ti].t_trans_s; }
  std::span<const std::size_t> covering_fogs(std::size_t ti) const {
    return info_[ti].covering;
  }
  std::optional<std::size_t> relay(std::size_t ti) const {
    return info_[ti].relay;
  }

  /// Local execution cost with the UE queue wait from the snapshot.
  double local_total(std::size_t ti) const { return info_[ti].local_total; }
  /// Cloud cost via the nearest covering relay; +inf when none covers.
  double cloud_total_or_inf(std::size_t ti) const {
    return info_[ti].cloud_total;
  }

  SojournResult sojourn(std::size_t ti, std::size_t fog_idx) const;

  FogAssessment assess_fog(std::size_t ti, std::size_t fog_idx,
                           double alloc_hz,
                           const PoolExtras* extras = nullptr) const;

  /// Workload forecast for FNEF: summed covered-UE sojourns capped at
  /// horizon * |covered| so stationary UEs cannot blow it up.
  double workload_forecast(std::size_t fog_idx, double horizon_s) const;
  double fnef_term(std::size_t fog_idx, double latency_s,
                   const SolverConfig& cfg) const;

  /// Reward of running task `ti` on `fog_idx` with `alloc_hz`:
  /// -(phi + FNEF + P * delta * D).
  double fitness(std::size_t ti, std::size_t fog_idx, double alloc_hz,
                 const SolverConfig& cfg,
                 const PoolExtras* extras = nullptr) const;

 private:
  struct TaskInfo {
    std::size_t ue = 0;
    double rate_bps = 0.0;
    double t_trans_s = 0.0;
    std::vector<std::size_t> covering;
    std::optional<std::size_t> relay;
    double local_total = 0.0;
    double cloud_total = 0.0;
  };
  struct FogInfo {
    double theta_raw_s = 0.0;  // may be +inf (stationary covered UEs)
    std::size_t covered_count = 0;
  };

  std::span<const Task> tasks_;
  const WorldSnapshot* world_;
  std::vector<TaskInfo> info_;
  std::vector<FogInfo> fog_info_;
};

/// Closed-form cost-optimal allocation (lambda/(2(1-lambda)kappa))^(1/3),
/// clamped to [alloc_min, capacity].
double optimal_allocation(const Task& task, const SystemParams& params,
                          double capacity_hz);

/// Signed workload term: -theta*f_eval below the latency threshold,
/// +theta*f_eval at or above it.
double fnef(double theta_s, double f_eval, double l_thresh_s,
            double expected_latency_s);
double fnef_for_node(const FogNode& fog,
                     std::span<const MobilityState> covered_ues, double f_eval,
                     double l_thresh_s, double expected_latency_s);

struct EligibilityEntry {
  std::vector<std::size_t> eligible;         // fog indices into world.fogs
  std::optional<OffloadDecision> immediate;  // set iff `eligible` is empty
};

struct EligibilityReport {
  std::vector<EligibilityEntry> entries;  // one per batch task
};

/// Step 1: keep a candidate fog node only if its best case (optimal
/// allocation, current queue wait, no migration) beats both the local and the
/// cloud option; otherwise decide local/cloud immediately.
EligibilityEntry eliminate_fog_nodes(const BatchContext& ctx, std::size_t ti);
EligibilityReport eliminate_fog_nodes(const BatchContext& ctx);

/// One member of the evolutionary game: a joint fog assignment for the
/// step-2 tasks plus the per-task strategy vector driving its moves.
struct Individual {
  std::vector<int> destinations;  // fog index per step-2 task
  std::vector<double> positions;  // allocation per step-2 task, Hz
  std::vector<double> strategy;   // sigma per step-2 task, in [0,1]
  double fitness = 0.0;
};

/// Sum of per-task rewards. Tasks are evaluated in order and each commits its
/// allocation into `scratch`, so crowding within the individual is priced in.
double evaluate_individual(const BatchContext& ctx,
                           std::span<const std::size_t> step2,
                           const Individual& ind, const SolverConfig& cfg,
                           PoolExtras& scratch);

/// Accept a proposal with probability min(1, cost_current/cost_proposed);
/// improving proposals always pass. Costs at or below zero are floored so the
/// ratio stays meaningful.
bool metropolis_accept(double cost_current, double cost_proposed, Rng& rng);

/// Re-draws each task's destination from its eligible set and keeps the
/// change per metropolis_accept on the whole-individual cost.
void metropolis_refine(Individual& ind, const BatchContext& ctx,
                       std::span<const std::size_t> step2,
                       std::span<const std::vector<std::size_t>> eligible,
                       const SolverConfig& cfg, PoolExtras& scratch, Rng& rng);

/// Lloyd k-means over per-task (destination x, destination y, allocation)
/// features, normalized by field size and node capacity. Every individual
/// lands in exactly one cluster; empty clusters steal the farthest member.
std::vector<std::vector<std::size_t>> cluster_population(
    std::span<const Individual> population, int k,
    std::span<const FogNode> fogs, double field_w_m, double field_h_m,
    Rng& rng);

/// Random walk on allocations: pos += R * capacity * N(0, sigma) per task,
/// clamped to [alloc_min, capacity]. sigma = 0 leaves the entry untouched.
void update_positions(Individual& ind, std::span<const FogNode> fogs,
                      double step_scale, double alloc_min_hz, Rng& rng);

/// Pulls `ind` toward the cluster best: copies the strategy vector and moves
/// positions by r * (best - pos), r ~ U[0.5, 1), clamped to the member's own
/// destination capacities.
void pull_toward_best(Individual& ind, const Individual& best,
                      std::span<const FogNode> fogs, double alloc_min_hz,
                      double r);

/// Competition step over one cluster: each non-best member is selected with
/// `selection_prob` and, if selected, pulled toward the cluster best. The
/// best member is never modified.
void modify_strategies(std::vector<Individual>& population,
                       std::span<const std::size_t> cluster,
                       double selection_prob, std::span<const FogNode> fogs,
                       double alloc_min_hz, Rng& rng);

struct EgtObserver {
  /// Called after each generation with the best fitness of every cluster.
  std::function<void(int generation, std::span<const double> cluster_best)>
      on_generation;
};

/// Step 2: population init, Metropolis destination refinement, k-means
/// clustering, then g generations of strategy-driven moves and competition.
/// Returns one fog decision per step-2 task, taken from the fittest member.
std::vector<OffloadDecision> egt_optimize(
    const BatchContext& ctx, std::span<const std::size_t> step2,
    std::span<const std::vector<std::size_t>> eligible,
    const SolverConfig& cfg, std::uint64_t seed,
    const EgtObserver* observer = nullptr);

/// The full two-step assignment for one release batch. Returned decisions are
/// in task order and satisfy C1-C5.
std::vector<OffloadDecision> mofco_assign(std::span<const Task> tasks,
                                          const WorldSnapshot& world,
                                          const SolverConfig& cfg);

}  // namespace fogsim
