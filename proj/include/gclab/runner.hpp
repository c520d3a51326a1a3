#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gclab/config.hpp"
#include "gclab/encoder.hpp"
#include "gclab/graph.hpp"

namespace gclab {

inline constexpr int kMetricsSchemaVersion = 1;
inline constexpr int kCheckpointVersion = 1;

// One CSV row. probe_acc is present only on probe epochs.
struct MetricsRecord {
  int epoch = 0;
  double nce_loss = 0.0;
  double mi_hat = 0.0;
  double delta_aug_hat = 0.0;
  double pcd = 0.0;
  double ncd = 0.0;
  double delta_y_plus = 0.0;
  double delta_y_minus = 0.0;
  double mean_ce = 0.0;
  double bound_nce = 0.0;  // InfoNCE at τ = 1 fed into the bound
  double bound_margin = 0.0;
  double bound_slack = 0.0;
  double slack_pos = 0.0;
  double slack_neg = 0.0;
  double slack_pos_main = 0.0;
  double slack_neg_main = 0.0;
  double align_gap = 0.0;
  double pos_sim = 0.0;
  double neg_sim = 0.0;
  std::size_t edges_removed_v1 = 0;
  std::size_t features_masked_v1 = 0;
  std::size_t edges_removed_v2 = 0;
  std::size_t features_masked_v2 = 0;
  std::optional<double> probe_acc;
};

const std::vector<std::string>& metrics_columns();
std::string metrics_header_line(const std::string& dataset, Method method, std::uint64_t seed);
std::string format_record(const MetricsRecord& r);
std::string render_metrics_csv(const std::string& dataset, Method method, std::uint64_t seed,
                               const std::vector<MetricsRecord>& records);

struct TrainResult {
  EncoderParams params;  // last finite parameters
  std::vector<MetricsRecord> records;
  std::optional<double> final_accuracy;
  bool aborted = false;
  std::string error;
  double wall_seconds = 0.0;
};

Graph build_dataset(const RunConfig& cfg);

// Deterministic in (cfg, seed). Random streams are forked from Rng(seed):
// 1 init, 2 view 1, 3 view 2, 4 retain/delete draws, 5 split, 6 importance views.
TrainResult train(const RunConfig& cfg, std::uint64_t seed, const Graph& g);

// Writes metrics_<method>_<seed>.csv, checkpoint_<method>_<seed>.bin/.json and
// timing_<method>_<seed>.json under dir.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& cfg, std::uint64_t seed,
                       const TrainResult& result);

// Runs every (cfg, seed) job on up to `jobs` worker threads; outputs do not
// depend on the thread count.
struct Job {
  RunConfig cfg;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};
std::vector<TrainResult> run_jobs(const std::vector<Job>& jobs, int workers);

// Checkpoint: "GCLCKPT\0", u32 version, u32 layer count, then per layer u64
// rows, u64 cols and rows·cols little-endian f64 values.
void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params);
EncoderParams load_checkpoint(const std::filesystem::path& path);

struct SweepRow {
  double key = 0.0;  // drop rate or layer count
  std::string method;
  double pcd_mean = 0.0, pcd_std = 0.0;
  double ncd_mean = 0.0, ncd_std = 0.0;
  double acc_mean = 0.0, acc_std = 0.0;
  std::vector<double> accuracies;
};

// Same rate for both views' edges and features.
std::vector<SweepRow> sweep_droprate(const RunConfig& cfg, const std::vector<double>& rates, int workers,
                                     const std::optional<std::filesystem::path>& out_dir = std::nullopt);
// grace and grace_s per depth.
std::vector<SweepRow> sweep_depth(const RunConfig& cfg, const std::vector<std::size_t>& layer_counts, int workers,
                                  const std::optional<std::filesystem::path>& out_dir = std::nullopt);
std::string render_sweep_csv(const std::string& key_name, const std::vector<SweepRow>& rows);

// Population mean and standard deviation.
double mean_of(const std::vector<double>& v);
double pstdev_of(const std::vector<double>& v);

// Scans dir recursively for metrics CSVs and writes summary.json; returns its text.
std::string report(const std::filesystem::path& dir, double bound_constant = 1.0);

// Runs the property suites; returns the number of failures.
int selftest(std::ostream& out);

}  // namespace gclab
