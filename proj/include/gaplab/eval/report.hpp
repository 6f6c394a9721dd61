#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gaplab/common/stats.hpp"
#include "gaplab/driving/scenario.hpp"
#include "gaplab/learn/driving_trainer.hpp"

namespace gaplab {

/// One evaluated episode: a scenario rolled under one run seed. Percentages
/// are over the 81 controlled steps.
struct EvalRow {
  std::string id;
  int seed = 0;
  bool overlap_any = false;
  bool offroad_any = false;
  double step_overlap_pct = 0.0;
  double step_offroad_pct = 0.0;
  double max_log_divergence = 0.0;
  double mean_log_divergence = 0.0;
  double episode_return = 0.0;

  bool operator==(const EvalRow&) const = default;
};

/// Aggregates of one seed's rows over the whole corpus; these are the
/// across-seed samples behind the summary statistics and significance tests.
/// Rates are percentages of scenarios with at least one event.
struct SeedAggregate {
  int seed = 0;
  double overlap_rate_pct = 0.0;
  double offroad_rate_pct = 0.0;
  double step_overlap_pct = 0.0;
  double step_offroad_pct = 0.0;
  double max_log_divergence = 0.0;  // mean of the per-scenario maxima
  double mean_log_divergence = 0.0;
  double episode_return = 0.0;

  bool operator==(const SeedAggregate&) const = default;
};

struct MetricSummary {
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 * stderr across seeds; 0 for a single seed

  bool operator==(const MetricSummary&) const = default;
};

constexpr int kEvalMetricCount = 7;
extern const std::array<const char*, kEvalMetricCount> kEvalMetricNames;

double seed_metric(const SeedAggregate& agg, int metric_index);

struct EvalReport {
  std::vector<EvalRow> rows;  // sorted by (id, seed)
  std::vector<SeedAggregate> per_seed;
  std::array<MetricSummary, kEvalMetricCount> summary;  // kEvalMetricNames order

  const MetricSummary& metric(const std::string& name) const;
};

/// Sort the rows, aggregate per seed and summarize across seeds.
EvalReport make_report(std::vector<EvalRow> rows);

/// Greedy rollouts of one trained checkpoint per (training-seed, checkpoint)
/// pair over the corpus. Stochastic observation constraints draw from
/// streams split off eval_seed per run seed, so reports are byte-stable.
/// Throws when a checkpoint's network disagrees with the observation shape
/// or the discretizer.
EvalReport evaluate_driving(const std::vector<Scenario>& corpus,
                            const std::vector<std::pair<int, Checkpoint>>& runs,
                            const ObservationConfig& obs, const ActionDiscretizer& disc,
                            std::uint64_t eval_seed);

/// Log playback instead of a policy: every agent, ego included, replays its
/// track. Log divergence is identically zero and the safety metrics are
/// those of the recording itself. Reported under a single pseudo-seed 0.
EvalReport evaluate_expert_replay(const std::vector<Scenario>& corpus,
                                  const ObservationConfig& obs, std::uint64_t eval_seed);

/// report.csv (one line per row) and summary.csv (metric, mean, ci95) in
/// dir. LF line endings, byte-deterministic.
void write_eval_report(const EvalReport& report, const std::string& dir);

/// Rebuild a report from dir/report.csv, recomputing the aggregates, and
/// verify they match dir/summary.csv to 1e-9. Throws on any disagreement.
EvalReport read_eval_report(const std::string& dir);

struct MetricComparison {
  std::string metric;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double delta = 0.0;  // mean_b - mean_a
  stats::WelchResult welch;
  bool significant = false;
};

struct ComparisonTable {
  std::string label_a;
  std::string label_b;
  double alpha = 0.05;
  std::vector<MetricComparison> metrics;  // kEvalMetricNames order

  const MetricComparison& metric(const std::string& name) const;
};

/// Per-metric deltas with a two-sided Welch t-test across the per-seed
/// aggregates. Requires the same scenario ids and seed counts (>= 2 seeds).
ComparisonTable compare_reports(const EvalReport& a, const EvalReport& b,
                                const std::string& label_a, const std::string& label_b,
                                double alpha = 0.05);

/// Markdown table; every number is taken verbatim from the comparison.
std::string comparison_markdown(const ComparisonTable& table);

}  // namespace gaplab
