#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "fogsim/solver.hpp"
#include "test_support.hpp"

using namespace fogsim;
using namespace fogsim::testing;

namespace {

double eq32_core(const Task& task, const SystemParams& params, double c) {
  const double f = task.required_cycles();
  return task.latency_weight * f / c +
         (1.0 - task.latency_weight) * params.kappa * c * c * f;
}

Task lam_task(double lam, double data = 1.5e8, double epb = 50.0) {
  Task t;
  t.id = 0;
  t.ue_id = 0;
  t.data_size_bits = data;
  t.cycles_per_bit = epb;
  t.latency_weight = lam;
  return t;
}

}  // namespace

TEST_CASE("closed-form allocation reference value") {
  SystemParams params;
  params.kappa = 1e-27;
  CHECK(optimal_allocation(lam_task(0.5), params, 5e9) ==
        doctest::Approx(793700525.9840988).epsilon(1e-12));
  CHECK(optimal_allocation(lam_task(1.0), params, 5e9) == 5e9);
  // the unclamped optimum exceeds a small capacity
  CHECK(optimal_allocation(lam_task(0.99), params, 1e9) == 1e9);
  CHECK(optimal_allocation(lam_task(0.0), params, 5e9) == params.alloc_min_hz);
}

TEST_CASE("closed-form allocation beats a dense grid") {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    SystemParams params;
    params.kappa = rng.uniform(1e-28, 1e-26);
    const Task task = lam_task(rng.uniform(0.01, 0.99));
    const double cap = rng.uniform(1e9, 8e9);
    const double c_opt = optimal_allocation(task, params, cap);
    const double at_opt = eq32_core(task, params, c_opt);
    for (int g = 0; g < 1000; ++g) {
      const double c =
          params.alloc_min_hz + (cap - params.alloc_min_hz) * (g + 1) / 1000.0;
      CHECK(at_opt <= eq32_core(task, params, c) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("fnef sign and magnitude") {
  CHECK(fnef(35.0, 0.3, 4.0, 2.0) == doctest::Approx(-10.5));
  // boundary latency takes the crowded-node branch
  CHECK(fnef(35.0, 0.3, 4.0, 4.0) == doctest::Approx(10.5));
  CHECK(fnef(35.0, 0.0, 4.0, 2.0) == 0.0);
  CHECK(fnef(35.0, 0.0, 4.0, 9.0) == 0.0);

  // node-level variant sums the covered sojourns
  const FogNode fog(0, 0.0, 0.0, 50.0, 1.0);
  std::vector<MobilityState> states = {{0, 0, 0, 10, 0}, {0, 25, 0, 5, 0}};
  CHECK(fnef_for_node(fog, states, 0.3, 4.0, 2.0) ==
        doctest::Approx(-0.3 * 10.0));
}

TEST_CASE("fitness composition of the audited parts") {
  // phi 20, FNEF -10.5, migration probability 0.6321 at delta 1e-7, D 1.5e8
  const double fitness = -(20.0 + (-10.5) + 0.6321 * 1e-7 * 1.5e8);
  CHECK(fitness == doctest::Approx(-18.9815).epsilon(1e-12));
}

TEST_CASE("context fitness matches its components") {
  const WorldSnapshot world = small_world(3, 4, 3);
  Rng rng(5);
  std::vector<Task> tasks = {test_task(0, 1, rng)};
  const BatchContext ctx(tasks, world);
  SolverConfig cfg;

  REQUIRE(!ctx.covering_fogs(0).empty());
  const std::size_t fog = ctx.covering_fogs(0)[0];
  const double alloc = 2e9;
  const auto a = ctx.assess_fog(0, fog, alloc);
  const double expected =
      -(a.phi + ctx.fnef_term(fog, a.latency_s, cfg) +
        a.mig_prob * world.params.migration_coeff * tasks[0].data_size_bits);
  CHECK(ctx.fitness(0, fog, alloc, cfg) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero migration coefficient removes sojourn sensitivity") {
  WorldSnapshot world = small_world(4, 2, 2);
  world.params.migration_coeff = 0.0;
  Rng rng(6);
  std::vector<Task> tasks = {test_task(0, 0, rng)};
  SolverConfig cfg;
  cfg.fnef_coeff = 0.0;  // workload forecast also depends on speeds

  std::vector<double> values;
  for (double speed : {1.0, 5.0, 12.0, 25.0}) {
    WorldSnapshot w = world;
    w.ue_states[0].speed_mps = speed;
    const BatchContext ctx(tasks, w);
    REQUIRE(!ctx.covering_fogs(0).empty());
    values.push_back(ctx.fitness(0, ctx.covering_fogs(0)[0], 2e9, cfg));
  }
  for (double v : values)
    CHECK(v == doctest::Approx(values.front()).epsilon(1e-12));
}

TEST_CASE("penalty-free fitness is the negated cost") {
  WorldSnapshot world = small_world(5, 2, 2);
  world.params.migration_coeff = 0.0;
  world.ue_states[0].speed_mps = 0.0;  // never exits: P = 0 either way
  Rng rng(7);
  std::vector<Task> tasks = {test_task(0, 0, rng)};
  const BatchContext ctx(tasks, world);
  SolverConfig cfg;
  cfg.fnef_coeff = 0.0;

  REQUIRE(!ctx.covering_fogs(0).empty());
  const std::size_t fog = ctx.covering_fogs(0)[0];
  const auto a = ctx.assess_fog(0, fog, 3e9);
  CHECK(ctx.fitness(0, fog, 3e9, cfg) ==
        doctest::Approx(-a.phi).epsilon(1e-12));
}

namespace {

/// World with one fog node whose pool is pinned busy, so its best case is
/// dominated; r_fc decides whether the fallback is local or cloud.
WorldSnapshot dominated_fog_world(double wired_rate_bps) {
  WorldSnapshot world;
  world.now_s = 0.0;
  world.field_w_m = world.field_h_m = 1000.0;
  world.fogs.emplace_back(0, 500.0, 500.0, 400.0, 5e9);
  world.fogs[0].pool.admit_or_queue(5e9, 1000.0, 0.0);  // busy for 1000 s
  UserEquipment ue;
  ue.id = 0;
  ue.local_frequency_hz = 2.5e9;
  ue.tx_power_w = 0.1;
  ue.bandwidth_hz = 1.5e7;
  world.ues.push_back(ue);
  world.ue_states.push_back({0.0, 500.0, 480.0, 10.0, 0.0});
  world.params.wired_rate_bps = wired_rate_bps;
  return world;
}

}  // namespace

TEST_CASE("elimination falls back to the cheaper immediate option") {
  Task task = lam_task(0.5, 1.5e8, 50.0);
  task.ue_id = 0;

  // expensive cloud link: local wins
  {
    const WorldSnapshot world = dominated_fog_world(1e5);
    const BatchContext ctx(std::span(&task, 1), world);
    const auto entry = eliminate_fog_nodes(ctx, 0);
    CHECK(entry.eligible.empty());
    REQUIRE(entry.immediate.has_value());
    CHECK(entry.immediate->s == 0);
    CHECK(ctx.local_total(0) < ctx.cloud_total_or_inf(0));
  }

  // healthy cloud link: cloud wins
  {
    const WorldSnapshot world = dominated_fog_world(1.5e7);
    const BatchContext ctx(std::span(&task, 1), world);
    const auto entry = eliminate_fog_nodes(ctx, 0);
    CHECK(entry.eligible.empty());
    REQUIRE(entry.immediate.has_value());
    CHECK(entry.immediate->s == 1);
    CHECK(entry.immediate->cloud == 1);
    CHECK(ctx.local_total(0) > ctx.cloud_total_or_inf(0));
  }
}

TEST_CASE("attractive fog survives elimination") {
  WorldSnapshot world = small_world(8, 1, 2);
  Task task = lam_task(0.97);
  task.ue_id = 0;
  const BatchContext ctx(std::span(&task, 1), world);
  const auto entry = eliminate_fog_nodes(ctx, 0);
  CHECK(!entry.eligible.empty());
  CHECK(!entry.immediate.has_value());
}

TEST_CASE("energy-only tasks prefer the cloud over any fog") {
  WorldSnapshot world = small_world(9, 1, 3);
  Task task = lam_task(0.0);
  task.ue_id = 0;
  const BatchContext ctx(std::span(&task, 1), world);

  // exhaustive comparison over the three options
  const double phi_local = ctx.local_total(0);
  const double phi_cloud = ctx.cloud_total_or_inf(0);
  double best_fog = std::numeric_limits<double>::infinity();
  for (std::size_t j : ctx.covering_fogs(0)) {
    const double c_opt =
        optimal_allocation(task, world.params, world.fogs[j].capacity_hz);
    best_fog = std::min(best_fog, ctx.assess_fog(0, j, c_opt).phi);
  }
  CHECK(phi_cloud < best_fog);
  CHECK(phi_cloud < phi_local);

  const auto entry = eliminate_fog_nodes(ctx, 0);
  CHECK(entry.eligible.empty());
  REQUIRE(entry.immediate.has_value());
  CHECK(entry.immediate->cloud == 1);
}

TEST_CASE("eliminated nodes never beat the immediate bound") {
  // fresh pools: the wait of an idle node is allocation-independent, so a
  // grid over allocations cannot undercut the c_opt best case
  Rng rng(73);
  int eliminated_seen = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const WorldSnapshot world = small_world(1000 + trial % 37, 1, 3);
    Task task = test_task(0, 0, rng);
    const BatchContext ctx(std::span(&task, 1), world);
    const double bound =
        std::min(ctx.local_total(0), ctx.cloud_total_or_inf(0));
    const auto entry = eliminate_fog_nodes(ctx, 0);
    for (std::size_t j : ctx.covering_fogs(0)) {
      const bool kept = std::find(entry.eligible.begin(), entry.eligible.end(),
                                  j) != entry.eligible.end();
      if (kept) continue;
      ++eliminated_seen;
      double grid_best = std::numeric_limits<double>::infinity();
      for (int g = 0; g < 200; ++g) {
        const double cap = world.fogs[j].capacity_hz;
        const double c = world.params.alloc_min_hz +
                         (cap - world.params.alloc_min_hz) * (g + 1) / 200.0;
        grid_best = std::min(grid_best, ctx.assess_fog(0, j, c).phi);
      }
      CHECK(grid_best > bound);
    }
  }
  CHECK(eliminated_seen > 100);  // the fuzz must actually exercise elimination
}

TEST_CASE("metropolis acceptance probabilities") {
  Rng rng(81);
  // improving proposals always pass
  for (int i = 0; i < 10000; ++i) CHECK(metropolis_accept(10.0, 5.0, rng));

  // cost 5 -> 10 is accepted about half the time
  int accepted = 0;
  for (int i = 0; i < 100000; ++i)
    if (metropolis_accept(5.0, 10.0, rng)) ++accepted;
  CHECK(accepted / 1e5 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("metropolis leaves single-option tasks untouched") {
  const WorldSnapshot world = small_world(11, 2, 1);
  Rng rng(8);
  std::vector<Task> tasks = {test_task(0, 0, rng), test_task(1, 1, rng)};
  const BatchContext ctx(tasks, world);
  SolverConfig cfg;

  std::vector<std::vector<std::size_t>> eligible = {{0}, {0}};
  std::vector<std::size_t> step2 = {0, 1};
  Individual ind{{0, 0}, {2e9, 3e9}, {0.5, 0.5}, 0.0};
  Individual before = ind;
  PoolExtras scratch(world.fogs.size());
  Rng mh(9);
  metropolis_refine(ind, ctx, step2, eligible, cfg, scratch, mh);
  CHECK(ind.destinations == before.destinations);
  CHECK(ind.positions == before.positions);
  CHECK(ind.strategy == before.strategy);
}

TEST_CASE("clustering splits identical pairs and handles degenerate k") {
  std::vector<FogNode> fogs = {FogNode(0, 100, 100, 300, 5e9),
                               FogNode(1, 900, 900, 300, 5e9)};
  const auto make = [&](int dest, double pos) {
    Individual ind;
    ind.destinations = {dest};
    ind.positions = {pos};
    ind.strategy = {0.5};
    return ind;
  };
  std::vector<Individual> pop = {make(0, 2e9), make(0, 2e9), make(1, 4e9),
                                 make(1, 4e9)};

  Rng rng(10);
  auto clusters = cluster_population(pop, 2, fogs, 1000, 1000, rng);
  REQUIRE(clusters.size() == 2);
  std::set<std::set<std::size_t>> got;
  for (auto& c : clusters)
    got.insert(std::set<std::size_t>(c.begin(), c.end()));
  CHECK(got == std::set<std::set<std::size_t>>{{0, 1}, {2, 3}});

  Rng rng1(11);
  auto one = cluster_population(pop, 1, fogs, 1000, 1000, rng1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 4);

  std::vector<Individual> distinct = {make(0, 1e9), make(0, 2e9), make(1, 3e9),
                                      make(1, 4e9)};
  Rng rng2(12);
  auto singles = cluster_population(distinct, 4, fogs, 1000, 1000, rng2);
  REQUIRE(singles.size() == 4);
  for (auto& c : singles) CHECK(c.size() == 1);
}

TEST_CASE("position updates respect sigma and capacity") {
  std::vector<FogNode> fogs = {FogNode(0, 0, 0, 100, 5e9)};

  Individual frozen{{0}, {2.5e9}, {0.0}, 0.0};
  Rng rng(13);
  update_positions(frozen, fogs, 0.1, 1e6, rng);
  CHECK(frozen.positions[0] == 2.5e9);

  // clamping holds over many large steps
  Individual walker{{0}, {2.5e9}, {1.0}, 0.0};
  Rng rng2(14);
  for (int i = 0; i < 10000; ++i) {
    update_positions(walker, fogs, 0.5, 1e6, rng2);
    CHECK(walker.positions[0] <= 5e9);
    CHECK(walker.positions[0] >= 1e6);
  }
}

TEST_CASE("position update step variance matches R*capacity*sigma") {
  std::vector<FogNode> fogs = {FogNode(0, 0, 0, 100, 5e9)};
  const double step_scale = 0.01, sigma = 0.5;
  const double expect_sd = step_scale * 5e9 * sigma;

  Rng rng(15);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    Individual ind{{0}, {2.5e9}, {sigma}, 0.0};
    update_positions(ind, fogs, step_scale, 1e6, rng);
    const double delta = ind.positions[0] - 2.5e9;
    sum += delta;
    sum_sq += delta * delta;
  }
  const double var = sum_sq / n - (sum / n) * (sum / n);
  CHECK(var == doctest::Approx(expect_sd * expect_sd).epsilon(0.05));
}

TEST_CASE("competition pulls members toward the cluster best") {
  std::vector<FogNode> fogs = {FogNode(0, 0, 0, 100, 5e9)};
  Individual member{{0}, {2e9}, {0.1}, -5.0};
  Individual best{{0}, {4e9}, {0.9}, -1.0};

  Individual mid = member;
  pull_toward_best(mid, best, fogs, 1e6, 0.5);
  CHECK(mid.positions[0] == doctest::Approx(3e9));
  CHECK(mid.strategy == best.strategy);

  Individual full = member;
  pull_toward_best(full, best, fogs, 1e6, 1.0);
  CHECK(full.positions[0] == doctest::Approx(4e9));
}

TEST_CASE("competition never touches the best and honors the selection gate") {
  std::vector<FogNode> fogs = {FogNode(0, 0, 0, 100, 5e9)};
  std::vector<Individual> pop = {
      Individual{{0}, {2e9}, {0.1}, -5.0},
      Individual{{0}, {4e9}, {0.9}, -1.0},  // best
      Individual{{0}, {1e9}, {0.3}, -9.0},
  };
  std::vector<std::size_t> cluster = {0, 1, 2};

  // zero probability: nothing changes
  auto copy = pop;
  Rng rng(16);
  modify_strategies(copy, cluster, 0.0, fogs, 1e6, rng);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    CHECK(copy[i].positions == pop[i].positions);
    CHECK(copy[i].strategy == pop[i].strategy);
  }

  // certain selection: everyone but the best moves toward it
  Rng rng2(17);
  modify_strategies(copy, cluster, 1.0, fogs, 1e6, rng2);
  CHECK(copy[1].positions == pop[1].positions);
  CHECK(copy[1].strategy == pop[1].strategy);
  CHECK(copy[0].positions[0] > pop[0].positions[0]);
  CHECK(copy[2].positions[0] > pop[2].positions[0]);
  CHECK(copy[0].strategy == pop[1].strategy);
}

TEST_CASE("step-1-only batches bypass the evolutionary stage") {
  const WorldSnapshot world = dominated_fog_world(1.5e7);
  Rng rng(18);
  std::vector<Task> tasks;
  for (int i = 0; i < 4; ++i) tasks.push_back(test_task(i, 0, rng));

  SolverConfig cfg;
  const auto decisions = mofco_assign(tasks, world, cfg);
  const BatchContext ctx(tasks, world);
  const auto report = eliminate_fog_nodes(ctx);
  REQUIRE(decisions.size() == tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    REQUIRE(report.entries[i].immediate.has_value());
    const auto& expect = *report.entries[i].immediate;
    CHECK(decisions[i].s == expect.s);
    CHECK(decisions[i].cloud == expect.cloud);
    CHECK(!decisions[i].fog_id.has_value());
  }
}

TEST_CASE("single eligible node with zero generations still lands on it") {
  WorldSnapshot world = small_world(21, 1, 1);
  Task task = lam_task(0.97);
  task.ue_id = 0;

  SolverConfig cfg;
  cfg.generations = 0;
  const auto decisions = mofco_assign(std::span(&task, 1), world, cfg);
  REQUIRE(decisions.size() == 1);

  const BatchContext ctx(std::span(&task, 1), world);
  const auto entry = eliminate_fog_nodes(ctx, 0);
  REQUIRE(entry.eligible.size() == 1);
  CHECK(decisions[0].s == 1);
  REQUIRE(decisions[0].fog_id.has_value());
  CHECK(*decisions[0].fog_id == world.fogs[entry.eligible[0]].id);
  CHECK(decisions[0].alloc_hz > world.params.alloc_min_hz);
  CHECK(decisions[0].alloc_hz <= world.fogs[entry.eligible[0]].capacity_hz);
}

TEST_CASE("per-cluster best fitness never decreases across generations") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const WorldSnapshot world = small_world(seed, 3, 3);
    Rng rng(mix_seed({seed, 99}));
    std::vector<Task> tasks;
    for (int i = 0; i < 3; ++i) {
      tasks.push_back(test_task(i, i, rng));
      tasks.back().latency_weight = rng.uniform(0.9, 1.0);
    }
    const BatchContext ctx(tasks, world);
    const auto report = eliminate_fog_nodes(ctx);

    std::vector<std::size_t> step2;
    std::vector<std::vector<std::size_t>> eligible;
    for (std::size_t ti = 0; ti < tasks.size(); ++ti)
      if (!report.entries[ti].immediate) {
        step2.push_back(ti);
        eligible.push_back(report.entries[ti].eligible);
      }
    if (step2.empty()) continue;

    SolverConfig cfg;
    cfg.population = 12;
    cfg.generations = 10;
    cfg.clusters = 3;

    std::vector<std::vector<double>> history;
    EgtObserver observer;
    observer.on_generation = [&](int, std::span<const double> bests) {
      history.emplace_back(bests.begin(), bests.end());
    };
    egt_optimize(ctx, step2, eligible, cfg, seed, &observer);

    REQUIRE(static_cast<int>(history.size()) == cfg.generations);
    for (std::size_t g = 1; g < history.size(); ++g)
      for (std::size_t c = 0; c < history[g].size(); ++c)
        CHECK(history[g][c] >= history[g - 1][c] - 1e-12);
  }
}

TEST_CASE("identical seeds give identical decisions") {
  const WorldSnapshot world = small_world(31, 6, 4);
  Rng rng(19);
  std::vector<Task> tasks;
  for (int i = 0; i < 6; ++i) tasks.push_back(test_task(i, i, rng));

  SolverConfig cfg;
  cfg.rng_seed = 77;
  const auto a = mofco_assign(tasks, world, cfg);
  const auto b = mofco_assign(tasks, world, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].s == b[i].s);
    CHECK(a[i].fog_id == b[i].fog_id);
    CHECK(a[i].cloud == b[i].cloud);
    CHECK(a[i].alloc_hz == b[i].alloc_hz);
  }
}

TEST_CASE("serial and parallel kernels produce the same decisions") {
  const WorldSnapshot world = small_world(32, 8, 4);
  Rng rng(20);
  std::vector<Task> tasks;
  for (int i = 0; i < 8; ++i) tasks.push_back(test_task(i, i, rng));

  SolverConfig cfg;
  cfg.rng_seed = 123;
  cfg.parallel = false;
  const auto serial = mofco_assign(tasks, world, cfg);
  cfg.parallel = true;
  const auto parallel = mofco_assign(tasks, world, cfg);

  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].s == parallel[i].s);
    CHECK(serial[i].fog_id == parallel[i].fog_id);
    CHECK(serial[i].cloud == parallel[i].cloud);
    CHECK(serial[i].alloc_hz == parallel[i].alloc_hz);
  }
}

TEST_CASE("every emitted decision satisfies the constraints") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const WorldSnapshot world = small_world(seed, 5, 3);
    Rng rng(mix_seed({seed, 4}));
    std::vector<Task> tasks;
    for (int i = 0; i < 5; ++i) tasks.push_back(test_task(i, i, rng));

    SolverConfig cfg;
    cfg.rng_seed = seed;
    for (const auto& d : mofco_assign(tasks, world, cfg)) {
      const auto verdict = validate_decision(d, world.fogs);
      CHECK(!verdict.has_value());
    }
  }
}

TEST_CASE("near-optimal on small instances") {
  // smaller sibling of the acceptance criterion: 5 seeded instances
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const WorldSnapshot world = small_world(seed, 4, 3, {1e9, 2e9});
    Rng rng(mix_seed({seed, 5}));
    const int n_tasks = 2 + static_cast<int>(seed % 3);
    std::vector<Task> tasks;
    for (int i = 0; i < n_tasks; ++i) tasks.push_back(test_task(i, i, rng));

    SolverConfig cfg;
    cfg.rng_seed = seed;
    const auto decisions = mofco_assign(tasks, world, cfg);

    std::vector<int> options;
    std::vector<double> allocs;
    decode_decisions(decisions, world, options, allocs);
    const double mofco = joint_cost(tasks, world, options, allocs);
    const double best = brute_force_best(tasks, world);
    CHECK(mofco <= best * 1.10 + 1e-9);
  }
}
