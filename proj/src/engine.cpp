#include "fogsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

#include "fogsim/baselines.hpp"
#include "fogsim/log.hpp"
#include "fogsim/traceio.hpp"

namespace fogsim {

namespace {

constexpr std::uint64_t kGenTag = 0x67656eULL;   // task generation stream
constexpr std::uint64_t kRaTag = 0x7261ULL;      // per-tick RA streams
constexpr std::uint64_t kGcgaTag = 0x67636761ULL;

int rank_of(EventKind kind) { return static_cast<int>(kind); }

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time_s != b.time_s) return a.time_s > b.time_s;
    if (a.kind != b.kind) return rank_of(a.kind) > rank_of(b.kind);
    return a.seq > b.seq;
  }
};

}  // namespace

std::vector<Task> generate_tasks(std::span<const UserEquipment> ues,
                                 const TaskGeneratorSpec& spec, Rng& rng) {
  return generate_tasks(ues, spec, {}, rng);
}

std::vector<Task> generate_tasks(std::span<const UserEquipment> ues,
                                 const TaskGeneratorSpec& spec,
                                 std::span<const PresenceWindow> windows,
                                 Rng& rng) {
  std::vector<Task> tasks;
  for (std::size_t u = 0; u < ues.size(); ++u) {
    const double from = windows.empty() ? 0.0 : windows[u].from_s;
    const double to =
        windows.empty() ? spec.horizon_s : std::min(windows[u].to_s,
                                                    spec.horizon_s);

    const auto emit = [&](double raw_t) {
      // Decisions happen on the 1 s mobility grid; releases snap down to it.
      const double t = std::floor(raw_t);
      if (t < std::ceil(from) || t >= to) return;
      Task task;
      task.ue_id = ues[u].id;
      task.release_time_s = t;
      task.data_size_bits =
          rng.uniform(spec.data_size_bits.first, spec.data_size_bits.second);
      task.cycles_per_bit =
          rng.uniform(spec.cycles_per_bit.first, spec.cycles_per_bit.second);
      task.latency_weight =
          rng.uniform(spec.latency_weight.first, spec.latency_weight.second);
      tasks.push_back(task);
    };

    const double period =
        rng.uniform(spec.periodic_period_s.first, spec.periodic_period_s.second);
    const double phase = rng.uniform(0.0, period);
    const double rate =
        rng.uniform(spec.aperiodic_rate_hz.first, spec.aperiodic_rate_hz.second);

    for (double t = phase; t < spec.horizon_s; t += period) emit(t);
    if (rate > 0.0) {
      for (double t = rng.exponential(rate); t < spec.horizon_s;
           t += rng.exponential(rate))
        emit(t);
    }
  }

  std::stable_sort(tasks.begin(), tasks.end(),
                   [](const Task& a, const Task& b) {
                     if (a.release_time_s != b.release_time_s)
                       return a.release_time_s < b.release_time_s;
                     return a.ue_id < b.ue_id;
                   });
  for (std::size_t i = 0; i < tasks.size(); ++i)
    tasks[i].id = static_cast<int>(i);
  return tasks;
}

std::string_view to_string(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::Local: return "local";
    case DecisionKind::Fog: return "fog";
    case DecisionKind::Cloud: return "cloud";
  }
  return "?";
}

std::string_view to_string(AlgoKind kind) {
  switch (kind) {
    case AlgoKind::Mofco: return "mofco";
    case AlgoKind::Gcga: return "gcga";
    case AlgoKind::RandomAssign: return "ra";
    case AlgoKind::OnlyCloud: return "onlycloud";
    case AlgoKind::OnlyLocal: return "onlylocal";
  }
  return "?";
}

std::string_view algo_label(AlgoKind kind) {
  return kind == AlgoKind::Gcga ? "gcga-approx" : to_string(kind);
}

std::optional<AlgoKind> parse_algo(std::string_view name) {
  for (AlgoKind kind : {AlgoKind::Mofco, AlgoKind::Gcga, AlgoKind::RandomAssign,
                        AlgoKind::OnlyCloud, AlgoKind::OnlyLocal})
    if (name == to_string(kind)) return kind;
  return std::nullopt;
}

void MetricsLedger::finalize() {
  total_cost = 0.0;
  max_task_cost = 0.0;
  for (const auto& row : rows) {
    total_cost += row.cost;
    max_task_cost = std::max(max_task_cost, row.cost);
  }
  mean_task_cost = rows.empty() ? 0.0 : total_cost / rows.size();
  normalized_cost =
      max_task_cost > 0.0 ? mean_task_cost / max_task_cost : 0.0;
}

std::vector<double> normalized_cost(
    std::span<const MetricsLedger* const> group) {
  double global_max = 0.0;
  for (const auto* ledger : group)
    global_max = std::max(global_max, ledger->max_task_cost);
  std::vector<double> out;
  out.reserve(group.size());
  for (const auto* ledger : group)
    out.push_back(global_max > 0.0 ? ledger->mean_task_cost / global_max : 0.0);
  return out;
}

AssignFn make_assigner(AlgoKind kind, const Scenario& scenario,
                       std::uint64_t seed) {
  switch (kind) {
    case AlgoKind::OnlyCloud:
      return [](std::span<const Task> tasks, const WorldSnapshot& world) {
        return only_cloud(tasks, world);
      };
    case AlgoKind::OnlyLocal:
      return [](std::span<const Task> tasks, const WorldSnapshot& world) {
        return only_local(tasks, world);
      };
    case AlgoKind::RandomAssign:
      return [seed](std::span<const Task> tasks, const WorldSnapshot& world) {
        Rng rng(mix_seed({seed, kRaTag,
                          static_cast<std::uint64_t>(
                              std::llround(world.now_s * 1000.0))}));
        return random_assign(tasks, world, rng);
      };
    case AlgoKind::Gcga: {
      GcgaConfig cfg = scenario.config.gcga;
      return [seed, cfg](std::span<const Task> tasks,
                         const WorldSnapshot& world) {
        Rng rng(mix_seed({seed, kGcgaTag,
                          static_cast<std::uint64_t>(
                              std::llround(world.now_s * 1000.0))}));
        return gcga_assign(tasks, world, cfg, rng);
      };
    }
    case AlgoKind::Mofco: {
      SolverConfig cfg = scenario.config.solver;
      cfg.rng_seed = seed;
      return [cfg](std::span<const Task> tasks, const WorldSnapshot& world) {
        return mofco_assign(tasks, world, cfg);
      };
    }
  }
  throw std::invalid_argument("unknown algorithm");
}

MetricsLedger run(const Scenario& scenario, AlgoKind algo,
                  std::uint64_t seed) {
  return run(scenario, make_assigner(algo, scenario, seed), seed);
}

namespace {

/// Per-task scheduling state between decision time and completion.
struct InFlight {
  Task task;
  OffloadDecision decision;
  DecisionKind kind = DecisionKind::Local;
  int fog_idx = -1;
  double decision_t_s = 0.0;
  double wait_s = 0.0;
  double t_exec_s = 0.0;
};

}  // namespace

MetricsLedger run(const Scenario& scenario, const AssignFn& assign,
                  std::uint64_t seed) {
  scenario.validate();
  const SystemParams& params = scenario.params;
  const Trace& trace = scenario.trace;

  std::vector<PresenceWindow> windows;
  windows.reserve(trace.n_ues());
  for (std::size_t u = 0; u < trace.n_ues(); ++u)
    windows.push_back(trace.presence(u));

  Rng gen_rng(mix_seed({seed, kGenTag}));
  const std::vector<Task> tasks =
      generate_tasks(scenario.ues, scenario.generator, windows, gen_rng);

  // Live world state, owned by this loop only.
  std::vector<UserEquipment> ues = scenario.ues;
  std::vector<FogNode> fogs = scenario.fogs;
  std::vector<MobilityState> states(ues.size());
  for (std::size_t u = 0; u < ues.size(); ++u)
    states[u] = trace.state_at(u, 0.0);

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  std::uint64_t seq = 0;
  const auto push = [&](double t, EventKind kind, int task_id = -1) {
    queue.push({t, kind, seq++, task_id});
  };

  for (double t = 0.0; t <= scenario.horizon_s; t += 1.0)
    push(t, EventKind::MobilityTick);
  for (const Task& task : tasks)
    push(task.release_time_s, EventKind::TaskRelease, task.id);

  MetricsLedger ledger;
  std::map<int, InFlight> in_flight;
  std::vector<Task> batch;
  double clock = 0.0;

  const auto audit_pools = [&](double now) {
    for (const auto& fog : fogs)
      if (fog.pool.committed_at(now) > fog.capacity_hz * (1.0 + 1e-9))
        ++ledger.pool_audit_violations;
  };

  const auto ue_index_of = [&](int ue_id) -> std::size_t {
    for (std::size_t u = 0; u < ues.size(); ++u)
      if (ues[u].id == ue_id) return u;
    throw std::logic_error("task references unknown UE");
  };

  const auto schedule_decision = [&](const Task& task, OffloadDecision d,
                                     double now) {
    const std::size_t u = ue_index_of(task.ue_id);
    if (auto violated = validate_decision(d, fogs)) {
      ++ledger.decision_audit_violations;
      log_warn("decision for task " + std::to_string(task.id) +
               " violates " + to_string(*violated) + "; running locally");
      d = OffloadDecision{.task_id = task.id};
    }

    InFlight fl;
    fl.task = task;
    fl.decision = d;
    fl.decision_t_s = now;

    if (d.s == 0) {
      fl.kind = DecisionKind::Local;
      fl.wait_s = ues[u].queue.wait_for(now);
      fl.t_exec_s = task.required_cycles() / ues[u].local_frequency_hz;
      const double start = now + fl.wait_s;
      ues[u].queue.free_at_s = start + fl.t_exec_s;
      push(start, EventKind::ExecStart, task.id);
      push(start + fl.t_exec_s, EventKind::ExecDone, task.id);
    } else {
      const double rate = uplink(ues[u], params).rate_bps;
      const double t_trans = task.data_size_bits / rate;
      if (d.fog_id) {
        fl.kind = DecisionKind::Fog;
        int fog_idx = -1;
        for (std::size_t j = 0; j < fogs.size(); ++j)
          if (fogs[j].id == *d.fog_id) fog_idx = static_cast<int>(j);
        fl.fog_idx = fog_idx;
        fl.t_exec_s = task.required_cycles() / d.alloc_hz;
      } else {
        fl.kind = DecisionKind::Cloud;
      }
      push(now + t_trans, EventKind::TransmissionDone, task.id);
    }
    in_flight.emplace(task.id, std::move(fl));
    ++ledger.released;
  };

  const auto flush_batch = [&](double now) {
    if (batch.empty()) return;
    std::sort(batch.begin(), batch.end(),
              [](const Task& a, const Task& b) { return a.id < b.id; });

    WorldSnapshot world;
    world.now_s = now;
    world.ues = ues;
    world.ue_states = states;
    for (auto& fog : fogs) fog.pool.drop_completed(now);
    world.fogs = fogs;
    world.params = params;
    world.field_w_m = scenario.field_w_m;
    world.field_h_m = scenario.field_h_m;

    const auto decisions = assign(batch, world);
    if (decisions.size() != batch.size())
      throw std::logic_error("assigner returned wrong decision count");
    for (std::size_t i = 0; i < batch.size(); ++i)
      schedule_decision(batch[i], decisions[i], now);
    batch.clear();
  };

  const auto complete = [&](InFlight& fl, double now) {
    const std::size_t u = ue_index_of(fl.task.ue_id);
    CostBreakdown cost;
    TaskRecord row;
    row.task_id = fl.task.id;
    row.ue_id = fl.task.ue_id;
    row.release_t_s = fl.task.release_time_s;
    row.kind = fl.kind;

    switch (fl.kind) {
      case DecisionKind::Local:
        cost = local_cost(fl.task, ues[u], fl.wait_s, params);
        break;
      case DecisionKind::Fog: {
        const FogNode& fog = fogs[static_cast<std::size_t>(fl.fog_idx)];
        // Ground truth from the trace, not from the solver's prediction.
        const double exit_t =
            trace.actual_exit_time(u, fog, fl.decision_t_s);
        const int migrated =
            migration_indicator(exit_t - fl.decision_t_s, fl.decision_t_s, now);
        cost = with_migration(
            fog_cost(fl.task, ues[u], fog, fl.decision.alloc_hz, fl.wait_s,
                     params),
            fl.task, migrated, params);
        row.fog_id = fog.id;
        row.alloc_hz = fl.decision.alloc_hz;
        row.migrated = migrated;
        if (migrated) push(now, EventKind::MigrationOccurred, fl.task.id);
        break;
      }
      case DecisionKind::Cloud: {
        const FogNode relay;  // cost depends on the UE link only
        cost = cloud_cost(fl.task, ues[u], relay, params);
        break;
      }
    }

    row.latency_s = now - fl.task.release_time_s;
    row.energy_j = cost.energy_j;
    row.cost = cost.total;
    ledger.rows.push_back(row);
    ++ledger.completed;
  };

  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    if (ev.time_s < clock - 1e-9)
      throw std::logic_error("event queue violated causality");
    clock = std::max(clock, ev.time_s);
    ++ledger.events_processed;

    switch (ev.kind) {
      case EventKind::MobilityTick: {
        for (std::size_t u = 0; u < ues.size(); ++u) {
          bool exact = false;
          states[u] = trace.state_at(u, ev.time_s, &exact);
          const auto window = windows[u];
          if (!exact && ev.time_s > window.from_s &&
              ev.time_s < window.to_s) {
            ++ledger.trace_gap_ticks;
            log_debug("trace gap for UE " + std::to_string(ues[u].id) +
                      " at t=" + fmt_double(ev.time_s));
          }
        }
        break;
      }
      case EventKind::TaskRelease: {
        const Task& task = tasks[static_cast<std::size_t>(ev.task_id)];
        batch.push_back(task);
        const bool more_releases_now =
            !queue.empty() && queue.top().kind == EventKind::TaskRelease &&
            queue.top().time_s == ev.time_s;
        if (!more_releases_now) flush_batch(ev.time_s);
        break;
      }
      case EventKind::TransmissionDone: {
        InFlight& fl = in_flight.at(ev.task_id);
        if (fl.kind == DecisionKind::Fog) {
          FogPool& pool = fogs[static_cast<std::size_t>(fl.fog_idx)].pool;
          fl.wait_s = pool.admit_or_queue(fl.decision.alloc_hz, fl.t_exec_s,
                                          ev.time_s, fl.task.id);
          push(ev.time_s + fl.wait_s, EventKind::ExecStart, fl.task.id);
          push(ev.time_s + fl.wait_s + fl.t_exec_s, EventKind::ExecDone,
               fl.task.id);
        } else {
          // Wired leg to the cloud; done when the transfer lands.
          push(ev.time_s + fl.task.data_size_bits / params.wired_rate_bps,
               EventKind::ExecDone, fl.task.id);
        }
        break;
      }
      case EventKind::ExecStart:
        break;  // bookkeeping marker
      case EventKind::ExecDone: {
        auto node = in_flight.extract(ev.task_id);
        complete(node.mapped(), ev.time_s);
        break;
      }
      case EventKind::MigrationOccurred:
        ++ledger.migration_count;
        break;
    }
    audit_pools(clock);
  }

  if (!in_flight.empty())
    throw std::logic_error("tasks still in flight after queue drained");
  std::sort(ledger.rows.begin(), ledger.rows.end(),
            [](const TaskRecord& a, const TaskRecord& b) {
              return a.task_id < b.task_id;
            });
  ledger.finalize();
  return ledger;
}

}  // namespace fogsim
