#include "gaplab/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "gaplab/common/csv.hpp"
#include "gaplab/common/error.hpp"
#include "gaplab/driving/sim.hpp"

namespace gaplab {

const std::array<const char*, kEvalMetricCount> kEvalMetricNames = {
    "overlap_rate_pct",   "offroad_rate_pct",    "step_overlap_pct", "step_offroad_pct",
    "max_log_divergence", "mean_log_divergence", "episode_return"};

double seed_metric(const SeedAggregate& agg, int metric_index) {
  switch (metric_index) {
    case 0: return agg.overlap_rate_pct;
    case 1: return agg.offroad_rate_pct;
    case 2: return agg.step_overlap_pct;
    case 3: return agg.step_offroad_pct;
    case 4: return agg.max_log_divergence;
    case 5: return agg.mean_log_divergence;
    case 6: return agg.episode_return;
    default: throw Error("eval report: metric index out of range");
  }
}

namespace {

int metric_index_of(const std::string& name) {
  for (int i = 0; i < kEvalMetricCount; ++i)
    if (name == kEvalMetricNames[static_cast<std::size_t>(i)]) return i;
  throw Error("eval report: unknown metric '" + name + "'");
}

SeedAggregate aggregate_seed(int seed, const std::vector<const EvalRow*>& rows) {
  SeedAggregate agg;
  agg.seed = seed;
  const double n = static_cast<double>(rows.size());
  for (const EvalRow* r : rows) {
    agg.overlap_rate_pct += r->overlap_any ? 100.0 : 0.0;
    agg.offroad_rate_pct += r->offroad_any ? 100.0 : 0.0;
    agg.step_overlap_pct += r->step_overlap_pct;
    agg.step_offroad_pct += r->step_offroad_pct;
    agg.max_log_divergence += r->max_log_divergence;
    agg.mean_log_divergence += r->mean_log_divergence;
    agg.episode_return += r->episode_return;
  }
  agg.overlap_rate_pct /= n;
  agg.offroad_rate_pct /= n;
  agg.step_overlap_pct /= n;
  agg.step_offroad_pct /= n;
  agg.max_log_divergence /= n;
  agg.mean_log_divergence /= n;
  agg.episode_return /= n;
  return agg;
}

EvalRow row_from_stats(const std::string& id, int seed, const DrivingEpisodeStats& s) {
  EvalRow row;
  row.id = id;
  row.seed = seed;
  row.overlap_any = s.overlap_any;
  row.offroad_any = s.offroad_any;
  row.step_overlap_pct = 100.0 * s.overlap_steps / kHorizonSteps;
  row.step_offroad_pct = 100.0 * s.offroad_steps / kHorizonSteps;
  row.max_log_divergence = s.max_log_divergence;
  row.mean_log_divergence = s.mean_log_divergence;
  row.episode_return = s.episode_return;
  return row;
}

}  // namespace

const MetricSummary& EvalReport::metric(const std::string& name) const {
  return summary[static_cast<std::size_t>(metric_index_of(name))];
}

EvalReport make_report(std::vector<EvalRow> rows) {
  require(!rows.empty(), "eval report: no rows");
  std::sort(rows.begin(), rows.end(), [](const EvalRow& a, const EvalRow& b) {
    return a.id != b.id ? a.id < b.id : a.seed < b.seed;
  });
  EvalReport report;
  std::map<int, std::vector<const EvalRow*>> by_seed;
  for (const EvalRow& r : rows) by_seed[r.seed].push_back(&r);
  for (const auto& [seed, seed_rows] : by_seed)
    report.per_seed.push_back(aggregate_seed(seed, seed_rows));
  for (int m = 0; m < kEvalMetricCount; ++m) {
    std::vector<double> samples;
    samples.reserve(report.per_seed.size());
    for (const SeedAggregate& agg : report.per_seed) samples.push_back(seed_metric(agg, m));
    report.summary[static_cast<std::size_t>(m)] = {stats::mean(samples),
                                                   stats::ci95_halfwidth(samples)};
  }
  report.rows = std::move(rows);
  return report;
}

EvalReport evaluate_driving(const std::vector<Scenario>& corpus,
                            const std::vector<std::pair<int, Checkpoint>>& runs,
                            const ObservationConfig& obs, const ActionDiscretizer& disc,
                            std::uint64_t eval_seed) {
  require(!corpus.empty(), "evaluate: empty corpus");
  require(!runs.empty(), "evaluate: no checkpoints to evaluate");
  obs.validate();
  for (const auto& [seed, ckpt] : runs) {
    require(ckpt.net.encoder == EncoderKind::kScene,
            "evaluate: checkpoint for seed " + std::to_string(seed) +
                " does not hold a driving policy");
    require(ckpt.net.max_objects == obs.max_objects &&
                ckpt.net.max_road_points == obs.max_road_points,
            "evaluate: checkpoint for seed " + std::to_string(seed) +
                " was trained under different observation settings");
    require(ckpt.net.actions == disc.actions(),
            "evaluate: checkpoint for seed " + std::to_string(seed) +
                " disagrees with the action discretizer");
  }
  const Rng master(eval_seed);
  std::vector<EvalRow> rows;
  rows.reserve(corpus.size() * runs.size());
  for (const auto& [seed, ckpt] : runs) {
    const std::vector<DrivingEpisodeStats> stats = driving_greedy_rollouts(
        corpus, ckpt.net, ckpt.params, obs, disc,
        master.child("run-seed", static_cast<std::uint64_t>(seed)));
    for (std::size_t i = 0; i < corpus.size(); ++i)
      rows.push_back(row_from_stats(corpus[i].id, seed, stats[i]));
  }
  return make_report(std::move(rows));
}

EvalReport evaluate_expert_replay(const std::vector<Scenario>& corpus,
                                  const ObservationConfig& obs, std::uint64_t eval_seed) {
  require(!corpus.empty(), "evaluate: empty corpus");
  obs.validate();
  const Rng master(eval_seed);
  std::vector<EvalRow> rows;
  rows.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Rng rng = master.child("lane", i);
    SimState st = reset(corpus[i], obs, false, rng).first;
    DrivingEpisodeStats s;
    while (!st.done()) {
      const StepResult res = step_logged(st, obs, rng);
      s.episode_return += res.reward;
      s.overlap_any = s.overlap_any || res.metrics.overlap;
      s.offroad_any = s.offroad_any || res.metrics.offroad;
      s.overlap_steps += res.metrics.overlap ? 1 : 0;
      s.offroad_steps += res.metrics.offroad ? 1 : 0;
      s.max_log_divergence = std::max(s.max_log_divergence, res.metrics.log_divergence);
      s.mean_log_divergence += res.metrics.log_divergence;
    }
    s.mean_log_divergence /= kHorizonSteps;
    rows.push_back(row_from_stats(corpus[i].id, 0, s));
  }
  return make_report(std::move(rows));
}

void write_eval_report(const EvalReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  csv::Table rows;
  rows.header = {"id",
                 "seed",
                 "overlap_any",
                 "offroad_any",
                 "step_overlap_pct",
                 "step_offroad_pct",
                 "max_log_divergence",
                 "mean_log_divergence",
                 "episode_return"};
  for (const EvalRow& r : report.rows)
    rows.rows.push_back({r.id, std::to_string(r.seed), r.overlap_any ? "1" : "0",
                         r.offroad_any ? "1" : "0", csv::format_double(r.step_overlap_pct),
                         csv::format_double(r.step_offroad_pct),
                         csv::format_double(r.max_log_divergence),
                         csv::format_double(r.mean_log_divergence),
                         csv::format_double(r.episode_return)});
  csv::write_file((std::filesystem::path(dir) / "report.csv").string(), rows);

  csv::Table summary;
  summary.header = {"metric", "mean", "ci95"};
  for (int m = 0; m < kEvalMetricCount; ++m)
    summary.rows.push_back({kEvalMetricNames[static_cast<std::size_t>(m)],
                            csv::format_double(report.summary[static_cast<std::size_t>(m)].mean),
                            csv::format_double(report.summary[static_cast<std::size_t>(m)].ci95)});
  csv::write_file((std::filesystem::path(dir) / "summary.csv").string(), summary);
}

EvalReport read_eval_report(const std::string& dir) {
  const std::string report_path = (std::filesystem::path(dir) / "report.csv").string();
  const csv::Table rows_csv = csv::read_file(report_path);
  const std::vector<std::string> expected = {"id",
                                             "seed",
                                             "overlap_any",
                                             "offroad_any",
                                             "step_overlap_pct",
                                             "step_offroad_pct",
                                             "max_log_divergence",
                                             "mean_log_divergence",
                                             "episode_return"};
  require(rows_csv.header == expected, report_path + ": unexpected columns");
  std::vector<EvalRow> rows;
  rows.reserve(rows_csv.rows.size());
  for (std::size_t i = 0; i < rows_csv.rows.size(); ++i) {
    EvalRow r;
    r.id = rows_csv.rows[i][0];
    r.seed = static_cast<int>(rows_csv.num(i, "seed"));
    r.overlap_any = rows_csv.num(i, "overlap_any") != 0.0;
    r.offroad_any = rows_csv.num(i, "offroad_any") != 0.0;
    r.step_overlap_pct = rows_csv.num(i, "step_overlap_pct");
    r.step_offroad_pct = rows_csv.num(i, "step_offroad_pct");
    r.max_log_divergence = rows_csv.num(i, "max_log_divergence");
    r.mean_log_divergence = rows_csv.num(i, "mean_log_divergence");
    r.episode_return = rows_csv.num(i, "episode_return");
    rows.push_back(std::move(r));
  }
  EvalReport report = make_report(std::move(rows));

  const std::string summary_path = (std::filesystem::path(dir) / "summary.csv").string();
  const csv::Table summary = csv::read_file(summary_path);
  require(summary.rows.size() == kEvalMetricCount, summary_path + ": unexpected row count");
  for (std::size_t m = 0; m < kEvalMetricCount; ++m) {
    require(summary.rows[m][0] == kEvalMetricNames[m],
            summary_path + ": unexpected metric order");
    const MetricSummary& computed = report.summary[m];
    require(std::fabs(summary.num(m, "mean") - computed.mean) <= 1e-9 &&
                std::fabs(summary.num(m, "ci95") - computed.ci95) <= 1e-9,
            summary_path + ": " + summary.rows[m][0] +
                " disagrees with the per-scenario rows");
  }
  return report;
}

const MetricComparison& ComparisonTable::metric(const std::string& name) const {
  return metrics[static_cast<std::size_t>(metric_index_of(name))];
}

ComparisonTable compare_reports(const EvalReport& a, const EvalReport& b,
                                const std::string& label_a, const std::string& label_b,
                                double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "compare: alpha must lie in (0, 1)");
  require(a.per_seed.size() == b.per_seed.size(), "compare: seed counts differ");
  const auto ids = [](const EvalReport& r) {
    std::vector<std::string> out;
    out.reserve(r.rows.size());
    for (const EvalRow& row : r.rows) out.push_back(row.id);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  require(ids(a) == ids(b), "compare: reports cover different corpora");

  ComparisonTable table;
  table.label_a = label_a;
  table.label_b = label_b;
  table.alpha = alpha;
  for (int m = 0; m < kEvalMetricCount; ++m) {
    std::vector<double> sa, sb;
    for (const SeedAggregate& agg : a.per_seed) sa.push_back(seed_metric(agg, m));
    for (const SeedAggregate& agg : b.per_seed) sb.push_back(seed_metric(agg, m));
    MetricComparison cmp;
    cmp.metric = kEvalMetricNames[static_cast<std::size_t>(m)];
    cmp.mean_a = stats::mean(sa);
    cmp.mean_b = stats::mean(sb);
    cmp.delta = cmp.mean_b - cmp.mean_a;
    cmp.welch = stats::welch_t_test(sa, sb);
    cmp.significant = cmp.welch.p < alpha;
    table.metrics.push_back(std::move(cmp));
  }
  return table;
}

std::string comparison_markdown(const ComparisonTable& table) {
  std::ostringstream out;
  out << "| metric | " << table.label_a << " | " << table.label_b
      << " | delta | p | significant |\n";
  out << "|---|---:|---:|---:|---:|:---:|\n";
  for (const MetricComparison& m : table.metrics)
    out << "| " << m.metric << " | " << csv::format_double(m.mean_a) << " | "
        << csv::format_double(m.mean_b) << " | " << csv::format_double(m.delta) << " | "
        << csv::format_double(m.welch.p) << " | " << (m.significant ? "yes" : "no")
        << " |\n";
  return out.str();
}

}  // namespace gaplab
