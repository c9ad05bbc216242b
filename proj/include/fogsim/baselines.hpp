#pragma once

#include <span>
#include <vector>

#include "fogsim/rng.hpp"
#include "fogsim/solver.hpp"

namespace fogsim {

enum class BaselineKind { OnlyCloud, OnlyLocal, RandomAssign, Gcga };

/// Every task goes to the cloud via its nearest covering relay; tasks with no
/// coverage run locally.
std::vector<OffloadDecision> only_cloud(std::span<const Task> tasks,
                                        const WorldSnapshot& world);

/// Every task runs on its own UE.
std::vector<OffloadDecision> only_local(std::span<const Task> tasks,
                                        const WorldSnapshot& world);

/// Fair coin per task between local execution and a uniformly chosen covering
/// fog node with a uniform allocation; no coverage means local.
std::vector<OffloadDecision> random_assign(std::span<const Task> tasks,
                                           const WorldSnapshot& world,
                                           Rng& rng);

/// Gini coefficient of a value set: 0 for perfectly equal values, growing
/// toward 1 with concentration. Empty or all-zero inputs give 0.
double gini_coefficient(std::span<const double> values);

struct GcgaConfig {
  int population = 40;
  int generations = 20;
  int tournament = 3;
  double crossover_rate = 0.9;
  double mutation_rate = 0.2;   // per-gene
  double mutation_scale = 0.1;  // stddev as a fraction of node capacity
  double cost_band = 0.05;      // near-best band considered for load balancing
  bool parallel = false;
};

/// Generational GA over allocation vectors: tournament selection, one-point
/// crossover, per-gene Gaussian mutation, single-member elitism. `initial`
/// seeds the first population members; the rest are drawn uniformly.
std::vector<double> ga_refine_allocations(
    const BatchContext& ctx, std::span<const std::size_t> task_indices,
    std::span<const std::size_t> destinations, const GcgaConfig& cfg, Rng& rng,
    std::span<const std::vector<double>> initial = {});

/// Approximation of the Gini-coefficient + genetic-algorithm baseline:
/// per-task greedy comparison of local / cloud / best fog cost (migration
/// expectation included via the predicted sojourn), fog choice within the
/// near-best cost band picked to minimize the resulting utilization Gini,
/// then a generational GA refining the allocations of the fog-bound tasks.
std::vector<OffloadDecision> gcga_assign(std::span<const Task> tasks,
                                         const WorldSnapshot& world,
                                         const GcgaConfig& cfg, Rng& rng);

}  // namespace fogsim
