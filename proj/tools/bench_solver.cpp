// Benchmark: serial vs OpenMP population kernels on one solver batch.
// The two paths must agree decision-for-decision; the loop prints timings.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fogsim/solver.hpp"

using namespace fogsim;

namespace {

WorldSnapshot make_world(int n_ues, int n_fog, Rng& rng) {
  WorldSnapshot world;
  world.now_s = 0.0;
  world.field_w_m = 2000.0;
  world.field_h_m = 2000.0;
  for (int j = 0; j < n_fog; ++j) {
    const double x = rng.uniform(200.0, 1800.0);
    const double y = rng.uniform(200.0, 1800.0);
    world.fogs.emplace_back(j, x, y, 700.0, rng.uniform(4e9, 6e9));
  }
  for (int i = 0; i < n_ues; ++i) {
    UserEquipment ue;
    ue.id = i;
    ue.local_frequency_hz = rng.uniform(2e9, 3e9);
    ue.tx_power_w = rng.uniform(0.08, 0.1);
    ue.bandwidth_hz = rng.uniform(1e7, 2e7);
    world.ues.push_back(ue);
    world.ue_states.push_back({0.0, rng.uniform(0.0, 2000.0),
                               rng.uniform(0.0, 2000.0), rng.uniform(5.0, 15.0),
                               rng.uniform(0.0, 6.28)});
  }
  return world;
}

std::vector<Task> make_batch(const WorldSnapshot& world, int n_tasks,
                             Rng& rng) {
  std::vector<Task> tasks;
  for (int k = 0; k < n_tasks; ++k) {
    Task t;
    t.id = k;
    t.ue_id = world.ues[static_cast<std::size_t>(
                            rng.uniform_int(static_cast<int>(world.ues.size())))]
                  .id;
    t.release_time_s = 0.0;
    t.data_size_bits = rng.uniform(125e6, 175e6);
    t.cycles_per_bit = rng.uniform(30.0, 120.0);
    t.latency_weight = rng.uniform(0.85, 1.0);  // keep fog competitive
    tasks.push_back(t);
  }
  return tasks;
}

double time_assign(std::span<const Task> tasks, const WorldSnapshot& world,
                   const SolverConfig& cfg, int reps,
                   std::vector<OffloadDecision>& out) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  for (int r = 0; r < reps; ++r) out = mofco_assign(tasks, world, cfg);
  return std::chrono::duration<double>(clock::now() - t0).count() /
         static_cast<double>(reps);
}

}  // namespace

int main() {
  Rng rng(20240901);
  const WorldSnapshot world = make_world(60, 16, rng);
  const auto tasks = make_batch(world, 24, rng);

  SolverConfig cfg;
  cfg.population = 160;
  cfg.generations = 40;
  cfg.rng_seed = 7;

  const int reps = 5;
  std::vector<OffloadDecision> serial_out, parallel_out;

  cfg.parallel = false;
  const double serial_s = time_assign(tasks, world, cfg, reps, serial_out);

  cfg.parallel = true;
  const double parallel_s = time_assign(tasks, world, cfg, reps, parallel_out);

  bool identical = serial_out.size() == parallel_out.size();
  for (std::size_t i = 0; identical && i < serial_out.size(); ++i) {
    const auto& a = serial_out[i];
    const auto& b = parallel_out[i];
    identical = a.s == b.s && a.fog_id == b.fog_id && a.cloud == b.cloud &&
                a.alloc_hz == b.alloc_hz;
  }

  int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
  {
#pragma omp single
    threads = omp_get_num_threads();
  }
#endif

  std::printf("batch: %zu tasks, %zu fog nodes, population %d, %d generations\n",
              tasks.size(), world.fogs.size(), cfg.population,
              cfg.generations);
  std::printf("serial:   %8.2f ms per assignment\n", serial_s * 1e3);
  std::printf("openmp:   %8.2f ms per assignment (%d threads)\n",
              parallel_s * 1e3, threads);
  std::printf("speedup:  %8.2fx\n", serial_s / parallel_s);
  std::printf("decisions identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
