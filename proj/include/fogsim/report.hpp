#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "fogsim/engine.hpp"

namespace fogsim {

struct SummaryRow {
  std::string algo;
  int n_ues = 0;
  int n_fog = 0;
  double total_cost = 0.0;
  double normalized_cost = 0.0;
  int migration_count = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
};

SummaryRow summarize(const MetricsLedger& ledger, std::string algo, int n_ues,
                     int n_fog, double wall_time_s, std::uint64_t seed);

/// Per-task rows: task_id,ue_id,release_t,decision,fog_id,alloc_hz,
/// latency_s,energy_j,migrated,cost. fog_id/alloc_hz are empty for non-fog
/// decisions. Deterministic formatting, LF endings.
std::string results_csv(const MetricsLedger& ledger);

std::string summary_csv(std::span<const SummaryRow> rows);

struct SweepRow {
  std::string param;
  double value = 0.0;
  SummaryRow summary;
};

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace fogsim
