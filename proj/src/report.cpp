#include "fogsim/report.hpp"

#include "fogsim/traceio.hpp"

namespace fogsim {

SummaryRow summarize(const MetricsLedger& ledger, std::string algo, int n_ues,
                     int n_fog, double wall_time_s, std::uint64_t seed) {
  SummaryRow row;
  row.algo = std::move(algo);
  row.n_ues = n_ues;
  row.n_fog = n_fog;
  row.total_cost = ledger.total_cost;
  row.normalized_cost = ledger.normalized_cost;
  row.migration_count = ledger.migration_count;
  row.wall_time_s = wall_time_s;
  row.seed = seed;
  return row;
}

std::string results_csv(const MetricsLedger& ledger) {
  std::string out =
      "task_id,ue_id,release_t,decision,fog_id,alloc_hz,latency_s,energy_j,"
      "migrated,cost\n";
  for (const auto& row : ledger.rows) {
    out += std::to_string(row.task_id);
    out += ',';
    out += std::to_string(row.ue_id);
    out += ',';
    out += fmt_double(row.release_t_s);
    out += ',';
    out += to_string(row.kind);
    out += ',';
    if (row.kind == DecisionKind::Fog) {
      out += std::to_string(row.fog_id);
      out += ',';
      out += fmt_double(row.alloc_hz);
    } else {
      out += ',';
    }
    out += ',';
    out += fmt_double(row.latency_s);
    out += ',';
    out += fmt_double(row.energy_j);
    out += ',';
    out += std::to_string(row.migrated);
    out += ',';
    out += fmt_double(row.cost);
    out += '\n';
  }
  return out;
}

namespace {

void append_summary_fields(std::string& out, const SummaryRow& row) {
  out += row.algo;
  out += ',';
  out += std::to_string(row.n_ues);
  out += ',';
  out += std::to_string(row.n_fog);
  out += ',';
  out += fmt_double(row.total_cost);
  out += ',';
  out += fmt_double(row.normalized_cost);
  out += ',';
  out += std::to_string(row.migration_count);
  out += ',';
  out += fmt_double(row.wall_time_s);
  out += ',';
  out += std::to_string(row.seed);
  out += '\n';
}

constexpr const char* kSummaryFields =
    "algo,n_ues,n_fog,total_cost,normalized_cost,migration_count,wall_time_s,"
    "seed";

}  // namespace

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = std::string(kSummaryFields) + "\n";
  for (const auto& row : rows) append_summary_fields(out, row);
  return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "param,value," + std::string(kSummaryFields) + "\n";
  for (const auto& row : rows) {
    out += row.param;
    out += ',';
    out += fmt_double(row.value);
    out += ',';
    append_summary_fields(out, row.summary);
  }
  return out;
}

}  // namespace fogsim
