#include "fogsim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fogsim/parallel.hpp"

namespace fogsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

OffloadDecision local_decision(int task_id) {
  OffloadDecision d;
  d.task_id = task_id;
  return d;
}
}  // namespace

std::vector<OffloadDecision> only_cloud(std::span<const Task> tasks,
                                        const WorldSnapshot& world) {
  BatchContext ctx(tasks, world);
  std::vector<OffloadDecision> out;
  out.reserve(tasks.size());
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    OffloadDecision d = local_decision(tasks[ti].id);
    if (ctx.relay(ti)) {
      d.s = 1;
      d.cloud = 1;
    }
    out.push_back(d);
  }
  return out;
}

std::vector<OffloadDecision> only_local(std::span<const Task> tasks,
                                        const WorldSnapshot& world) {
  (void)world;
  std::vector<OffloadDecision> out;
  out.reserve(tasks.size());
  for (const Task& t : tasks) out.push_back(local_decision(t.id));
  return out;
}

std::vector<OffloadDecision> random_assign(std::span<const Task> tasks,
                                           const WorldSnapshot& world,
                                           Rng& rng) {
  BatchContext ctx(tasks, world);
  const double alloc_min = world.params.alloc_min_hz;
  std::vector<OffloadDecision> out;
  out.reserve(tasks.size());
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    OffloadDecision d = local_decision(tasks[ti].id);
    const auto covering = ctx.covering_fogs(ti);
    if (rng.bernoulli(0.5) && !covering.empty()) {
      const std::size_t fog_idx =
          covering[rng.uniform_int(static_cast<int>(covering.size()))];
      const double cap = world.fogs[fog_idx].capacity_hz;
      d.s = 1;
      d.fog_id = world.fogs[fog_idx].id;
      d.alloc_hz = cap - (cap - alloc_min) * rng.uniform();
    }
    out.push_back(d);
  }
  return out;
}

double gini_coefficient(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (mean <= 0.0) return 0.0;
  double abs_diff = 0.0;
  for (double a : values)
    for (double b : values) abs_diff += std::abs(a - b);
  const double n = static_cast<double>(values.size());
  return abs_diff / (2.0 * n * n * mean);
}

namespace {

/// Predicted-migration surcharge for running `ti` on `fog_idx` given the
/// assessed latency (Eq.-18-style indicator on the predicted sojourn).
double predicted_migration_cost(const BatchContext& ctx, std::size_t ti,
                                std::size_t fog_idx, double latency_s) {
  const auto sj = ctx.sojourn(ti, fog_idx);
  const int migrates = sj.finite() && sj.seconds < latency_s ? 1 : 0;
  return migrates * ctx.world().params.migration_coeff *
         ctx.tasks()[ti].data_size_bits;
}

/// Outstanding allocation (running or queued) per fog node, as a fraction of
/// capacity.
std::vector<double> utilization(const WorldSnapshot& world,
                                const PoolExtras& extras) {
  std::vector<double> u(world.fogs.size(), 0.0);
  for (std::size_t j = 0; j < world.fogs.size(); ++j) {
    double held = 0.0;
    for (const auto& iv : world.fogs[j].pool.committed())
      if (iv.end_s > world.now_s) held += iv.alloc_hz;
    for (const auto& iv : extras.for_fog(j))
      if (iv.end_s > world.now_s) held += iv.alloc_hz;
    u[j] = held / world.fogs[j].capacity_hz;
  }
  return u;
}

struct GaProblem {
  const BatchContext* ctx;
  std::span<const std::size_t> task_indices;
  std::span<const std::size_t> destinations;

  double cost_of(std::span<const double> genome, PoolExtras& scratch) const {
    scratch.clear();
    double cost = 0.0;
    for (std::size_t g = 0; g < genome.size(); ++g) {
      const std::size_t ti = task_indices[g];
      const std::size_t fog_idx = destinations[g];
      const auto a = ctx->assess_fog(ti, fog_idx, genome[g], &scratch);
      cost += a.phi + predicted_migration_cost(*ctx, ti, fog_idx, a.latency_s);
      const double start = ctx->world().now_s + a.t_trans_s + a.wait_s;
      scratch.commit(fog_idx,
                     {genome[g], start, start + a.t_exec_s,
                      ctx->tasks()[ti].id});
    }
    return cost;
  }
};

}  // namespace

std::vector<double> ga_refine_allocations(
    const BatchContext& ctx, std::span<const std::size_t> task_indices,
    std::span<const std::size_t> destinations, const GcgaConfig& cfg, Rng& rng,
    std::span<const std::vector<double>> initial) {
  const WorldSnapshot& world = ctx.world();
  const std::size_t genes = task_indices.size();
  const std::size_t pop_n = static_cast<std::size_t>(cfg.population);
  const double alloc_min = world.params.alloc_min_hz;
  GaProblem problem{&ctx, task_indices, destinations};

  const auto cap_of = [&](std::size_t g) {
    return world.fogs[destinations[g]].capacity_hz;
  };

  std::vector<std::vector<double>> pop(pop_n);
  for (std::size_t i = 0; i < pop_n; ++i) {
    if (i < initial.size()) {
      pop[i] = initial[i];
      continue;
    }
    pop[i].resize(genes);
    for (std::size_t g = 0; g < genes; ++g)
      pop[i][g] = cap_of(g) - (cap_of(g) - alloc_min) * rng.uniform();
  }

  std::vector<double> cost(pop_n);
  const auto evaluate_all = [&] {
    for_each_index(pop_n, cfg.parallel, [&](std::size_t i) {
      PoolExtras scratch(world.fogs.size());
      cost[i] = problem.cost_of(pop[i], scratch);
    });
  };
  evaluate_all();

  const auto tournament = [&]() -> std::size_t {
    std::size_t best = static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(pop_n)));
    for (int t = 1; t < cfg.tournament; ++t) {
      const std::size_t c = static_cast<std::size_t>(
          rng.uniform_int(static_cast<int>(pop_n)));
      if (cost[c] < cost[best]) best = c;
    }
    return best;
  };

  for (int gen = 0; gen < cfg.generations; ++gen) {
    std::size_t elite = 0;
    for (std::size_t i = 1; i < pop_n; ++i)
      if (cost[i] < cost[elite]) elite = i;

    std::vector<std::vector<double>> next;
    next.reserve(pop_n);
    next.push_back(pop[elite]);
    while (next.size() < pop_n) {
      std::vector<double> child = pop[tournament()];
      if (genes > 1 && rng.bernoulli(cfg.crossover_rate)) {
        const auto& other = pop[tournament()];
        const std::size_t cut = 1 + static_cast<std::size_t>(rng.uniform_int(
                                        static_cast<int>(genes - 1)));
        for (std::size_t g = cut; g < genes; ++g) child[g] = other[g];
      }
      for (std::size_t g = 0; g < genes; ++g) {
        if (!rng.bernoulli(cfg.mutation_rate)) continue;
        child[g] += rng.normal(0.0, cfg.mutation_scale * cap_of(g));
        child[g] = std::clamp(child[g], alloc_min, cap_of(g));
      }
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    evaluate_all();
  }

  std::size_t winner = 0;
  for (std::size_t i = 1; i < pop_n; ++i)
    if (cost[i] < cost[winner]) winner = i;
  return pop[winner];
}

std::vector<OffloadDecision> gcga_assign(std::span<const Task> tasks,
                                         const WorldSnapshot& world,
                                         const GcgaConfig& cfg, Rng& rng) {
  BatchContext ctx(tasks, world);
  std::vector<OffloadDecision> out(tasks.size());

  PoolExtras extras(world.fogs.size());
  std::vector<double> local_free(world.ues.size());
  for (std::size_t u = 0; u < world.ues.size(); ++u)
    local_free[u] = world.ues[u].queue.free_at_s;

  std::vector<std::size_t> fog_tasks;
  std::vector<std::size_t> fog_dest;
  std::vector<double> fog_alloc;

  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const Task& task = tasks[ti];
    const std::size_t ue_idx = ctx.ue_of(ti);
    const UserEquipment& ue = world.ues[ue_idx];

    const double local_wait =
        std::max(0.0, local_free[ue_idx] - world.now_s);
    const double phi_local =
        local_cost(task, ue, local_wait, world.params).total;
    const double phi_cloud = ctx.cloud_total_or_inf(ti);

    // Best fog option: migration-aware cost; near-best band balanced by the
    // utilization Gini.
    double best_score = kInf;
    std::vector<std::pair<std::size_t, double>> scored;  // fog idx -> score
    std::vector<FogAssessment> assessments(world.fogs.size());
    for (std::size_t fog_idx : ctx.covering_fogs(ti)) {
      const double alloc = optimal_allocation(task, world.params,
                                              world.fogs[fog_idx].capacity_hz);
      const auto a = ctx.assess_fog(ti, fog_idx, alloc, &extras);
      const double score =
          a.phi + predicted_migration_cost(ctx, ti, fog_idx, a.latency_s);
      assessments[fog_idx] = a;
      scored.emplace_back(fog_idx, score);
      best_score = std::min(best_score, score);
    }

    std::optional<std::size_t> chosen;
    double chosen_score = kInf;
    if (!scored.empty()) {
      const auto base = utilization(world, extras);
      double best_gini = kInf;
      for (const auto& [fog_idx, score] : scored) {
        if (score > best_score * (1.0 + cfg.cost_band)) continue;
        auto u = base;
        const double alloc = optimal_allocation(
            task, world.params, world.fogs[fog_idx].capacity_hz);
        u[fog_idx] += alloc / world.fogs[fog_idx].capacity_hz;
        const double g = gini_coefficient(u);
        if (g < best_gini - 1e-12 ||
            (std::abs(g - best_gini) <= 1e-12 && score < chosen_score)) {
          best_gini = g;
          chosen = fog_idx;
          chosen_score = score;
        }
      }
    }

    OffloadDecision d = local_decision(task.id);
    if (chosen && chosen_score <= std::min(phi_local, phi_cloud)) {
      const std::size_t fog_idx = *chosen;
      const double alloc = optimal_allocation(task, world.params,
                                              world.fogs[fog_idx].capacity_hz);
      d.s = 1;
      d.fog_id = world.fogs[fog_idx].id;
      d.alloc_hz = alloc;
      const auto& a = assessments[fog_idx];
      const double start = world.now_s + a.t_trans_s + a.wait_s;
      extras.commit(fog_idx, {alloc, start, start + a.t_exec_s, task.id});
      fog_tasks.push_back(ti);
      fog_dest.push_back(fog_idx);
      fog_alloc.push_back(alloc);
    } else if (phi_cloud < phi_local) {
      d.s = 1;
      d.cloud = 1;
    } else {
      const double start = world.now_s + local_wait;
      local_free[ue_idx] =
          start + task.required_cycles() / ue.local_frequency_hz;
    }
    out[ti] = d;
  }

  if (!fog_tasks.empty()) {
    std::vector<std::vector<double>> seed_pop = {fog_alloc};
    const auto refined = ga_refine_allocations(ctx, fog_tasks, fog_dest, cfg,
                                               rng, seed_pop);
    for (std::size_t g = 0; g < fog_tasks.size(); ++g)
      out[fog_tasks[g]].alloc_hz = refined[g];
  }
  return out;
}

}  // namespace fogsim
