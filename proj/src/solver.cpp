#include "fogsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fogsim/parallel.hpp"

namespace fogsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void SolverConfig::validate() const {
  if (population < 1) throw std::invalid_argument("population must be >= 1");
  if (clusters < 1) throw std::invalid_argument("clusters must be >= 1");
  if (population < clusters)
    throw std::invalid_argument("population must be >= clusters");
  if (generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (!(selection_prob >= 0.0 && selection_prob <= 1.0))
    throw std::invalid_argument("selection_prob must be in [0,1]");
  if (!(step_scale > 0.0)) throw std::invalid_argument("step_scale must be > 0");
  if (fnef_coeff < 0.0) throw std::invalid_argument("fnef_coeff must be >= 0");
  if (latency_thresh_s < 0.0)
    throw std::invalid_argument("latency_thresh_s must be >= 0");
}

int WorldSnapshot::ue_index(int ue_id) const {
  for (std::size_t i = 0; i < ues.size(); ++i)
    if (ues[i].id == ue_id) return static_cast<int>(i);
  return -1;
}

int WorldSnapshot::fog_index(int fog_id) const {
  for (std::size_t i = 0; i < fogs.size(); ++i)
    if (fogs[i].id == fog_id) return static_cast<int>(i);
  return -1;
}

BatchContext::BatchContext(std::span<const Task> tasks,
                           const WorldSnapshot& world)
    : tasks_(tasks), world_(&world) {
  fog_info_.resize(world.fogs.size());
  for (std::size_t j = 0; j < world.fogs.size(); ++j) {
    const FogNode& fog = world.fogs[j];
    for (const auto& state : world.ue_states) {
      const auto s = sojourn_time(state, fog);
      if (!s.covered()) continue;
      ++fog_info_[j].covered_count;
      fog_info_[j].theta_raw_s += s.finite() ? s.seconds : kInf;
    }
  }

  info_.resize(tasks.size());
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    TaskInfo& info = info_[ti];
    const int ue_idx = world.ue_index(tasks[ti].ue_id);
    if (ue_idx < 0) throw std::invalid_argument("task references unknown UE");
    info.ue = static_cast<std::size_t>(ue_idx);
    const UserEquipment& ue = world.ues[info.ue];
    const MobilityState& state = world.ue_states[info.ue];

    info.rate_bps = uplink(ue, world.params).rate_bps;
    info.t_trans_s = tasks[ti].data_size_bits / info.rate_bps;

    double best_dist2 = kInf;
    for (std::size_t j = 0; j < world.fogs.size(); ++j) {
      const FogNode& fog = world.fogs[j];
      if (!fog.covers(state.x_m, state.y_m)) continue;
      info.covering.push_back(j);
      const double dx = state.x_m - fog.x_m, dy = state.y_m - fog.y_m;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_dist2) {
        best_dist2 = d2;
        info.relay = j;
      }
    }

    info.local_total =
        local_cost(tasks[ti], ue, ue.queue.wait_for(world.now_s), world.params)
            .total;
    info.cloud_total =
        info.relay
            ? cloud_cost(tasks[ti], ue, world.fogs[*info.relay], world.params)
                  .total
            : kInf;
  }
}

SojournResult BatchContext::sojourn(std::size_t ti, std::size_t fog_idx) const {
  return sojourn_time(world_->ue_states[info_[ti].ue], world_->fogs[fog_idx]);
}

FogAssessment BatchContext::assess_fog(std::size_t ti, std::size_t fog_idx,
                                       double alloc_hz,
                                       const PoolExtras* extras) const {
  const Task& task = tasks_[ti];
  const FogNode& fog = world_->fogs[fog_idx];
  const UserEquipment& ue = world_->ues[info_[ti].ue];

  FogAssessment a;
  a.t_trans_s = info_[ti].t_trans_s;
  a.t_exec_s = task.required_cycles() / alloc_hz;
  const double arrival = world_->now_s + a.t_trans_s;
  const double start = earliest_admission(
      fog.pool.committed(), extras ? extras->for_fog(fog_idx)
                                   : std::span<const PoolInterval>{},
      fog.capacity_hz, alloc_hz, a.t_exec_s, arrival);
  a.wait_s = start - arrival;
  a.latency_s = a.t_exec_s + a.t_trans_s + a.wait_s;
  a.phi = fog_cost(task, ue, fog, alloc_hz, a.wait_s, world_->params).total;
  a.mig_prob = migration_probability(sojourn(ti, fog_idx), a.latency_s);
  return a;
}

double BatchContext::workload_forecast(std::size_t fog_idx,
                                       double horizon_s) const {
  return predicted_workload(fog_info_[fog_idx].theta_raw_s,
                            fog_info_[fog_idx].covered_count, horizon_s);
}

double BatchContext::fnef_term(std::size_t fog_idx, double latency_s,
                               const SolverConfig& cfg) const {
  return fnef(workload_forecast(fog_idx, latency_s), cfg.fnef_coeff,
              cfg.latency_thresh_s, latency_s);
}

double BatchContext::fitness(std::size_t ti, std::size_t fog_idx,
                             double alloc_hz, const SolverConfig& cfg,
                             const PoolExtras* extras) const {
  const auto a = assess_fog(ti, fog_idx, alloc_hz, extras);
  const double penalty = a.mig_prob * world_->params.migration_coeff *
                         tasks_[ti].data_size_bits;
  return -(a.phi + fnef_term(fog_idx, a.latency_s, cfg) + penalty);
}

double optimal_allocation(const Task& task, const SystemParams& params,
                          double capacity_hz) {
  const double lam = task.latency_weight;
  double c;
  if (lam >= 1.0) {
    c = capacity_hz;  // time-only cost is decreasing in the allocation
  } else {
    c = std::cbrt(lam / (2.0 * (1.0 - lam) * params.kappa));
  }
  return std::clamp(c, params.alloc_min_hz, capacity_hz);
}

double fnef(double theta_s, double f_eval, double l_thresh_s,
            double expected_latency_s) {
  const double magnitude = theta_s * f_eval;
  return expected_latency_s < l_thresh_s ? -magnitude : magnitude;
}

double fnef_for_node(const FogNode& fog,
                     std::span<const MobilityState> covered_ues, double f_eval,
                     double l_thresh_s, double expected_latency_s) {
  double theta = 0.0;
  for (const auto& state : covered_ues) {
    const auto s = sojourn_time(state, fog);
    if (!s.covered()) continue;
    theta += s.finite() ? s.seconds : kInf;
  }
  return fnef(theta, f_eval, l_thresh_s, expected_latency_s);
}

EligibilityEntry eliminate_fog_nodes(const BatchContext& ctx, std::size_t ti) {
  const WorldSnapshot& world = ctx.world();
  EligibilityEntry entry;

  const double phi_local = ctx.local_total(ti);
  const double phi_cloud = ctx.cloud_total_or_inf(ti);
  const double bound = std::min(phi_local, phi_cloud);

  for (std::size_t fog_idx : ctx.covering_fogs(ti)) {
    const double c_opt = optimal_allocation(
        ctx.tasks()[ti], world.params, world.fogs[fog_idx].capacity_hz);
    if (ctx.assess_fog(ti, fog_idx, c_opt).phi <= bound)
      entry.eligible.push_back(fog_idx);
  }

  if (entry.eligible.empty()) {
    OffloadDecision d;
    d.task_id = ctx.tasks()[ti].id;
    if (phi_local > phi_cloud) {
      d.s = 1;
      d.cloud = 1;
    }
    entry.immediate = d;
  }
  return entry;
}

EligibilityReport eliminate_fog_nodes(const BatchContext& ctx) {
  EligibilityReport report;
  report.entries.reserve(ctx.size());
  for (std::size_t ti = 0; ti < ctx.size(); ++ti)
    report.entries.push_back(eliminate_fog_nodes(ctx, ti));
  return report;
}

double evaluate_individual(const BatchContext& ctx,
                           std::span<const std::size_t> step2,
                           const Individual& ind, const SolverConfig& cfg,
                           PoolExtras& scratch) {
  scratch.clear();
  double sum = 0.0;
  for (std::size_t j = 0; j < step2.size(); ++j) {
    const std::size_t ti = step2[j];
    const auto fog_idx = static_cast<std::size_t>(ind.destinations[j]);
    const double alloc = ind.positions[j];
    const auto a = ctx.assess_fog(ti, fog_idx, alloc, &scratch);
    const double penalty = a.mig_prob * ctx.world().params.migration_coeff *
                           ctx.tasks()[ti].data_size_bits;
    sum += -(a.phi + ctx.fnef_term(fog_idx, a.latency_s, cfg) + penalty);
    const double start = ctx.world().now_s + a.t_trans_s + a.wait_s;
    scratch.commit(fog_idx, {alloc, start, start + a.t_exec_s,
                             ctx.tasks()[ti].id});
  }
  return sum;
}

bool metropolis_accept(double cost_current, double cost_proposed, Rng& rng) {
  if (cost_proposed <= cost_current) return true;
  // Rewards can cross zero when the FNEF bonus dominates; floor the costs so
  // the ratio keeps its better-is-likelier shape.
  constexpr double kFloor = 1e-12;
  const double ratio =
      std::max(cost_current, kFloor) / std::max(cost_proposed, kFloor);
  return rng.uniform() < ratio;
}

void metropolis_refine(Individual& ind, const BatchContext& ctx,
                       std::span<const std::size_t> step2,
                       std::span<const std::vector<std::size_t>> eligible,
                       const SolverConfig& cfg, PoolExtras& scratch, Rng& rng) {
  double current = evaluate_individual(ctx, step2, ind, cfg, scratch);
  for (std::size_t j = 0; j < step2.size(); ++j) {
    const auto& options = eligible[j];
    if (options.size() < 2) continue;
    const int proposed =
        static_cast<int>(options[rng.uniform_int(static_cast<int>(options.size()))]);
    if (proposed == ind.destinations[j]) continue;
    const int saved_dest = ind.destinations[j];
    const double saved_pos = ind.positions[j];
    ind.destinations[j] = proposed;
    // carry the allocation over, within the new node's capacity
    ind.positions[j] = std::min(
        saved_pos,
        ctx.world().fogs[static_cast<std::size_t>(proposed)].capacity_hz);
    const double candidate = evaluate_individual(ctx, step2, ind, cfg, scratch);
    if (metropolis_accept(-current, -candidate, rng)) {
      current = candidate;
    } else {
      ind.destinations[j] = saved_dest;
      ind.positions[j] = saved_pos;
    }
  }
  ind.fitness = current;
}

namespace {

std::vector<double> features_of(const Individual& ind,
                                std::span<const FogNode> fogs, double field_w,
                                double field_h) {
  std::vector<double> f;
  f.reserve(ind.destinations.size() * 3);
  for (std::size_t j = 0; j < ind.destinations.size(); ++j) {
    const FogNode& fog = fogs[static_cast<std::size_t>(ind.destinations[j])];
    f.push_back(fog.x_m / field_w);
    f.push_back(fog.y_m / field_h);
    f.push_back(ind.positions[j] / fog.capacity_hz);
  }
  return f;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

}  // namespace

std::vector<std::vector<std::size_t>> cluster_population(
    std::span<const Individual> population, int k,
    std::span<const FogNode> fogs, double field_w_m, double field_h_m,
    Rng& rng) {
  const std::size_t n = population.size();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  if (kk == 0 || n == 0) return {};

  std::vector<std::vector<double>> feats(n);
  for (std::size_t i = 0; i < n; ++i)
    feats[i] = features_of(population[i], fogs, field_w_m, field_h_m);

  // Initial centroids: k distinct members chosen at random.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i < kk; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(n - i)));
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<double>> centroids(kk);
  for (std::size_t c = 0; c < kk; ++c) centroids[c] = feats[order[c]];

  std::vector<std::size_t> assignment(n, 0);
  std::vector<std::vector<std::size_t>> clusters;
  for (int iter = 0; iter < 50; ++iter) {
    clusters.assign(kk, {});
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = kInf;
      for (std::size_t c = 0; c < kk; ++c) {
        const double d = sq_dist(feats[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assignment[i] = best;
      clusters[best].push_back(i);
    }

    // Empty clusters steal the member farthest from its current centroid.
    for (std::size_t c = 0; c < kk; ++c) {
      if (!clusters[c].empty()) continue;
      std::size_t far_i = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (clusters[assignment[i]].size() <= 1) continue;
        const double d = sq_dist(feats[i], centroids[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      if (far_i == n) continue;  // nothing to steal
      auto& from = clusters[assignment[far_i]];
      from.erase(std::find(from.begin(), from.end(), far_i));
      assignment[far_i] = c;
      clusters[c].push_back(far_i);
      centroids[c] = feats[far_i];
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < kk; ++c) {
      if (clusters[c].empty()) continue;
      std::vector<double> mean(centroids[c].size(), 0.0);
      for (std::size_t i : clusters[c])
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += feats[i][d];
      for (double& v : mean) v /= static_cast<double>(clusters[c].size());
      shift = std::max(shift, std::sqrt(sq_dist(mean, centroids[c])));
      centroids[c] = mean;
    }
    if (shift < 1e-6) break;
  }

  std::erase_if(clusters, [](const auto& c) { return c.empty(); });
  return clusters;
}

void update_positions(Individual& ind, std::span<const FogNode> fogs,
                      double step_scale, double alloc_min_hz, Rng& rng) {
  for (std::size_t j = 0; j < ind.positions.size(); ++j) {
    const double sigma = ind.strategy[j];
    if (sigma == 0.0) continue;
    const double cap =
        fogs[static_cast<std::size_t>(ind.destinations[j])].capacity_hz;
    const double moved =
        ind.positions[j] + step_scale * cap * rng.normal(0.0, sigma);
    ind.positions[j] = std::clamp(moved, alloc_min_hz, cap);
  }
}

void pull_toward_best(Individual& ind, const Individual& best,
                      std::span<const FogNode> fogs, double alloc_min_hz,
                      double r) {
  ind.strategy = best.strategy;
  for (std::size_t j = 0; j < ind.positions.size(); ++j) {
    const double cap =
        fogs[static_cast<std::size_t>(ind.destinations[j])].capacity_hz;
    const double moved =
        ind.positions[j] + r * (best.positions[j] - ind.positions[j]);
    ind.positions[j] = std::clamp(moved, alloc_min_hz, cap);
  }
}

namespace {

std::size_t best_of(std::span<const Individual> population,
                    std::span<const std::size_t> cluster) {
  std::size_t best = cluster.front();
  for (std::size_t i : cluster)
    if (population[i].fitness > population[best].fitness) best = i;
  return best;
}

}  // namespace

void modify_strategies(std::vector<Individual>& population,
                       std::span<const std::size_t> cluster,
                       double selection_prob, std::span<const FogNode> fogs,
                       double alloc_min_hz, Rng& rng) {
  if (cluster.empty()) return;
  const std::size_t best = best_of(population, cluster);
  for (std::size_t i : cluster) {
    if (i == best) continue;
    if (!rng.bernoulli(selection_prob)) continue;
    const double r = rng.uniform(0.5, 1.0);
    pull_toward_best(population[i], population[best], fogs, alloc_min_hz, r);
  }
}

std::vector<OffloadDecision> egt_optimize(
    const BatchContext& ctx, std::span<const std::size_t> step2,
    std::span<const std::vector<std::size_t>> eligible,
    const SolverConfig& cfg, std::uint64_t seed, const EgtObserver* observer) {
  const WorldSnapshot& world = ctx.world();
  const std::size_t n_fogs = world.fogs.size();
  const std::size_t pop_n = static_cast<std::size_t>(cfg.population);
  const double alloc_min = world.params.alloc_min_hz;

  // Phase tags keep per-individual RNG streams independent across stages.
  enum : std::uint64_t { kInit = 1, kMetropolis = 2, kGeneration = 3 };

  std::vector<Individual> population(pop_n);
  for_each_index(pop_n, cfg.parallel, [&](std::size_t i) {
    Rng rng(mix_seed({seed, kInit, i}));
    Individual& ind = population[i];
    ind.destinations.resize(step2.size());
    ind.positions.resize(step2.size());
    ind.strategy.resize(step2.size());
    for (std::size_t j = 0; j < step2.size(); ++j) {
      const auto& options = eligible[j];
      ind.destinations[j] = static_cast<int>(
          options[rng.uniform_int(static_cast<int>(options.size()))]);
      const double cap =
          world.fogs[static_cast<std::size_t>(ind.destinations[j])].capacity_hz;
      // Allocations drawn from (alloc_min, cap].
      ind.positions[j] = cap - (cap - alloc_min) * rng.uniform();
      ind.strategy[j] = rng.uniform();
    }
    PoolExtras scratch(n_fogs);
    ind.fitness = evaluate_individual(ctx, step2, ind, cfg, scratch);
  });

  for_each_index(pop_n, cfg.parallel, [&](std::size_t i) {
    Rng rng(mix_seed({seed, kMetropolis, i}));
    PoolExtras scratch(n_fogs);
    metropolis_refine(population[i], ctx, step2, eligible, cfg, scratch, rng);
  });

  Rng cluster_rng(mix_seed({seed, 0x6b6d65616e73ULL}));  // "kmeans"
  const auto clusters =
      cluster_population(population, cfg.clusters, world.fogs, world.field_w_m,
                         world.field_h_m, cluster_rng);

  std::vector<std::size_t> cluster_of(pop_n, 0);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (std::size_t i : clusters[c]) cluster_of[i] = c;

  for (int gen = 0; gen < cfg.generations; ++gen) {
    std::vector<std::size_t> best_of_cluster(clusters.size());
    std::vector<char> is_best(pop_n, 0);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      best_of_cluster[c] = best_of(population, clusters[c]);
      is_best[best_of_cluster[c]] = 1;
    }

    // Cluster bests are frozen for the generation, so members can move in
    // parallel: each touches only itself and reads its (unchanging) best.
    for_each_index(pop_n, cfg.parallel, [&](std::size_t i) {
      if (is_best[i]) return;
      Rng rng(mix_seed({seed, kGeneration, static_cast<std::uint64_t>(gen), i}));
      update_positions(population[i], world.fogs, cfg.step_scale, alloc_min,
                       rng);
      if (rng.bernoulli(cfg.selection_prob)) {
        const double r = rng.uniform(0.5, 1.0);
        pull_toward_best(population[i],
                         population[best_of_cluster[cluster_of[i]]], world.fogs,
                         alloc_min, r);
      }
      PoolExtras scratch(n_fogs);
      population[i].fitness =
          evaluate_individual(ctx, step2, population[i], cfg, scratch);
    });

    if (observer && observer->on_generation) {
      std::vector<double> bests(clusters.size());
      for (std::size_t c = 0; c < clusters.size(); ++c)
        bests[c] = population[best_of(population, clusters[c])].fitness;
      observer->on_generation(gen, bests);
    }
  }

  std::size_t winner = 0;
  for (std::size_t i = 1; i < pop_n; ++i)
    if (population[i].fitness > population[winner].fitness) winner = i;

  std::vector<OffloadDecision> decisions(step2.size());
  for (std::size_t j = 0; j < step2.size(); ++j) {
    OffloadDecision& d = decisions[j];
    d.task_id = ctx.tasks()[step2[j]].id;
    d.s = 1;
    d.fog_id = world.fogs[static_cast<std::size_t>(
                              population[winner].destinations[j])].id;
    d.alloc_hz = population[winner].positions[j];
  }
  return decisions;
}

std::vector<OffloadDecision> mofco_assign(std::span<const Task> tasks,
                                          const WorldSnapshot& world,
                                          const SolverConfig& cfg) {
  cfg.validate();
  BatchContext ctx(tasks, world);
  const auto report = eliminate_fog_nodes(ctx);

  std::vector<OffloadDecision> decisions(tasks.size());
  std::vector<std::size_t> step2;
  std::vector<std::vector<std::size_t>> eligible;
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    if (report.entries[ti].immediate) {
      decisions[ti] = *report.entries[ti].immediate;
    } else {
      step2.push_back(ti);
      eligible.push_back(report.entries[ti].eligible);
    }
  }

  if (!step2.empty()) {
    const std::uint64_t seed = mix_seed(
        {cfg.rng_seed,
         static_cast<std::uint64_t>(std::llround(world.now_s * 1000.0))});
    const auto assigned = egt_optimize(ctx, step2, eligible, cfg, seed);
    for (std::size_t j = 0; j < step2.size(); ++j)
      decisions[step2[j]] = assigned[j];
  }
  return decisions;
}

}  // namespace fogsim
