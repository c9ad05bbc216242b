#include "fogsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fogsim {

namespace {

// Tolerance for capacity sums; allocations are O(1e9) so absolute epsilons
// do not work.
double capacity_slack(double capacity_hz) { return capacity_hz * 1e-9; }

double occupied_over(std::span<const PoolInterval> base,
                     std::span<const PoolInterval> extra, double at_s) {
  double sum = 0.0;
  for (const auto& iv : base)
    if (iv.start_s <= at_s && at_s < iv.end_s) sum += iv.alloc_hz;
  for (const auto& iv : extra)
    if (iv.start_s <= at_s && at_s < iv.end_s) sum += iv.alloc_hz;
  return sum;
}

bool window_fits(std::span<const PoolInterval> base,
                 std::span<const PoolInterval> extra, double capacity_hz,
                 double alloc_hz, double from_s, double to_s) {
  const double limit = capacity_hz - alloc_hz + capacity_slack(capacity_hz);
  if (occupied_over(base, extra, from_s) > limit) return false;
  // Capacity can only be re-exceeded where a committed interval starts.
  for (const auto* set : {&base, &extra})
    for (const auto& iv : *set)
      if (iv.start_s > from_s && iv.start_s < to_s)
        if (occupied_over(base, extra, iv.start_s) > limit) return false;
  return true;
}

}  // namespace

double earliest_admission(std::span<const PoolInterval> base,
                          std::span<const PoolInterval> extra,
                          double capacity_hz, double alloc_hz, double exec_s,
                          double now_s) {
  // FIFO: never start before a request that queued earlier.
  double t = now_s;
  for (const auto* set : {&base, &extra})
    for (const auto& iv : *set)
      if (iv.start_s > now_s) t = std::max(t, iv.start_s);

  std::vector<double> candidates;
  candidates.push_back(t);
  for (const auto* set : {&base, &extra})
    for (const auto& iv : *set)
      if (iv.end_s > t) candidates.push_back(iv.end_s);
  std::sort(candidates.begin(), candidates.end());

  for (double c : candidates)
    if (window_fits(base, extra, capacity_hz, alloc_hz, c, c + exec_s))
      return c;
  // Unreachable for alloc <= capacity: after every committed interval ends
  // the pool is empty.
  return candidates.back();
}

double FogPool::earliest_admission(double alloc_hz, double exec_s,
                                   double now_s,
                                   std::span<const PoolInterval> extra) const {
  return fogsim::earliest_admission(committed_, extra, capacity_hz_, alloc_hz,
                                    exec_s, now_s);
}

double FogPool::admit_or_queue(double alloc_hz, double exec_s, double now_s,
                               int task_id) {
  if (alloc_hz > capacity_hz_ + capacity_slack(capacity_hz_))
    throw ConstraintViolation(Constraint::C5);
  const double start = earliest_admission(alloc_hz, exec_s, now_s);
  committed_.push_back({alloc_hz, start, start + exec_s, task_id});
  return start - now_s;
}

double FogPool::committed_at(double t_s) const {
  return occupied_over(committed_, {}, t_s);
}

void FogPool::drop_completed(double now_s) {
  std::erase_if(committed_,
                [now_s](const PoolInterval& iv) { return iv.end_s <= now_s; });
}

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::C1: return "C1";
    case Constraint::C2: return "C2";
    case Constraint::C3: return "C3";
    case Constraint::C4: return "C4";
    case Constraint::C5: return "C5";
  }
  return "?";
}

ConstraintViolation::ConstraintViolation(Constraint c)
    : std::runtime_error("decision violates constraint " + to_string(c)),
      which(c) {}

std::optional<Constraint> validate_decision(const OffloadDecision& d,
                                            std::span<const FogNode> fogs) {
  if (d.s != 0 && d.s != 1) return Constraint::C1;
  const FogNode* fog = nullptr;
  if (d.fog_id) {
    for (const auto& f : fogs)
      if (f.id == *d.fog_id) { fog = &f; break; }
    if (!fog) return Constraint::C2;
  }
  if (d.cloud != 0 && d.cloud != 1) return Constraint::C3;
  if (d.fog_id && d.cloud == 1) return Constraint::C4;
  if (d.s == 1 && !d.fog_id && d.cloud == 0) return Constraint::C4;
  if (fog && !(d.alloc_hz > 0.0 &&
               d.alloc_hz <= fog->capacity_hz + fog->capacity_hz * 1e-9))
    return Constraint::C5;
  return std::nullopt;
}

UplinkQuality uplink(const UserEquipment& ue, const SystemParams& params) {
  const double p_mw = ue.tx_power_w * 1e3;
  const double sinr =
      p_mw / (dbm_to_mw(params.noise_dbm) + dbm_to_mw(params.interference_dbm));
  return {ue.bandwidth_hz * std::log2(1.0 + sinr), sinr};
}

CostBreakdown local_cost(const Task& task, const UserEquipment& ue,
                         double wait_s, const SystemParams& params) {
  const double f = task.required_cycles();
  const double t_exec = f / ue.local_frequency_hz;
  const double energy =
      params.kappa * ue.local_frequency_hz * ue.local_frequency_hz * f;
  const double lam = task.latency_weight;
  CostBreakdown out;
  out.latency_s = t_exec + wait_s;
  out.energy_j = energy;
  out.total = lam * out.latency_s + (1.0 - lam) * out.energy_j;
  return out;
}

CostBreakdown fog_cost(const Task& task, const UserEquipment& ue,
                       const FogNode& fog, double alloc_hz, double wait_s,
                       const SystemParams& params) {
  if (!(alloc_hz > 0.0) || alloc_hz > fog.capacity_hz + fog.capacity_hz * 1e-9)
    throw ConstraintViolation(Constraint::C5);
  const double f = task.required_cycles();
  const double rate = uplink(ue, params).rate_bps;
  const double t_trans = task.data_size_bits / rate;
  const double e_trans = ue.tx_power_w * t_trans;
  const double t_exec = f / alloc_hz;
  const double e_exec = params.kappa * alloc_hz * alloc_hz * f;
  const double lam = task.latency_weight;
  CostBreakdown out;
  out.latency_s = t_exec + t_trans + wait_s;
  out.energy_j = e_trans + e_exec;
  out.total = lam * out.latency_s + (1.0 - lam) * out.energy_j;
  return out;
}

CostBreakdown cloud_cost(const Task& task, const UserEquipment& ue,
                         const FogNode& relay_fog, const SystemParams& params) {
  (void)relay_fog;  // the uplink rate is UE-determined; any covering relay does
  const double rate = uplink(ue, params).rate_bps;
  const double t_trans = task.data_size_bits / rate;
  const double lam = task.latency_weight;
  CostBreakdown out;
  out.latency_s = t_trans + task.data_size_bits / params.wired_rate_bps;
  out.energy_j = ue.tx_power_w * t_trans;
  out.total = lam * out.latency_s + (1.0 - lam) * out.energy_j;
  return out;
}

int migration_indicator(double sojourn_s, double start_s, double end_s) {
  return sojourn_s < (end_s - start_s) ? 1 : 0;
}

CostBreakdown with_migration(CostBreakdown cost, const Task& task,
                             int migrated, const SystemParams& params) {
  cost.migration_penalty =
      params.migration_coeff * task.data_size_bits * migrated;
  cost.total += cost.migration_penalty;
  return cost;
}

CostBreakdown total_cost(const OffloadDecision& decision,
                         const CostContext& ctx) {
  if (auto violated = validate_decision(decision, ctx.fogs))
    throw ConstraintViolation(*violated);
  if (decision.s == 0)
    return local_cost(ctx.task, ctx.ue, ctx.wait_s, ctx.params);
  if (decision.fog_id) {
    const FogNode* fog = nullptr;
    for (const auto& f : ctx.fogs)
      if (f.id == *decision.fog_id) { fog = &f; break; }
    return with_migration(
        fog_cost(ctx.task, ctx.ue, *fog, decision.alloc_hz, ctx.wait_s,
                 ctx.params),
        ctx.task, ctx.migrated, ctx.params);
  }
  if (!ctx.relay) throw NoRelayAvailable();
  return cloud_cost(ctx.task, ctx.ue, *ctx.relay, ctx.params);
}

}  // namespace fogsim
