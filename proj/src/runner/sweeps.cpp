#include <cmath>
#include <numeric>

#include "gclab/runner.hpp"
#include "gclab/text.hpp"

namespace gclab {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pstdev_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

namespace {

// Aggregates the final record of each job in [first, first + count).
SweepRow summarize(double key, const std::string& method, const std::vector<TrainResult>& results, std::size_t first,
                   std::size_t count) {
  SweepRow row;
  row.key = key;
  row.method = method;
  std::vector<double> pcd, ncd;
  for (std::size_t i = first; i < first + count; ++i) {
    const TrainResult& r = results[i];
    if (r.records.empty()) continue;
    pcd.push_back(r.records.back().pcd);
    ncd.push_back(r.records.back().ncd);
    if (r.final_accuracy) row.accuracies.push_back(*r.final_accuracy);
  }
  row.pcd_mean = mean_of(pcd);
  row.pcd_std = pstdev_of(pcd);
  row.ncd_mean = mean_of(ncd);
  row.ncd_std = pstdev_of(ncd);
  row.acc_mean = mean_of(row.accuracies);
  row.acc_std = pstdev_of(row.accuracies);
  return row;
}

std::filesystem::path sub_dir(const std::optional<std::filesystem::path>& root, const std::string& name) {
  return root ? *root / name : std::filesystem::path();
}

}  // namespace

std::vector<SweepRow> sweep_droprate(const RunConfig& cfg, const std::vector<double>& rates, int workers,
                                     const std::optional<std::filesystem::path>& out_dir) {
  std::vector<Job> jobs;
  for (double rate : rates) {
    RunConfig c = cfg;
    c.p_edge1 = c.p_edge2 = c.p_feat1 = c.p_feat2 = rate;
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({c, seed, sub_dir(out_dir, "rate_" + format_double(rate))});
  }
  const std::vector<TrainResult> results = run_jobs(jobs, workers);
  std::vector<SweepRow> rows;
  for (std::size_t r = 0; r < rates.size(); ++r)
    rows.push_back(summarize(rates[r], to_string(cfg.method), results, r * cfg.seeds.size(), cfg.seeds.size()));
  return rows;
}

std::vector<SweepRow> sweep_depth(const RunConfig& cfg, const std::vector<std::size_t>& layer_counts, int workers,
                                  const std::optional<std::filesystem::path>& out_dir) {
  const Method methods[] = {Method::grace, Method::grace_s};
  std::vector<Job> jobs;
  for (std::size_t layers : layer_counts) {
    for (Method m : methods) {
      RunConfig c = cfg;
      c.layers = layers;
      c.method = m;
      for (std::uint64_t seed : cfg.seeds)
        jobs.push_back({c, seed, sub_dir(out_dir, "layers_" + std::to_string(layers))});
    }
  }
  const std::vector<TrainResult> results = run_jobs(jobs, workers);
  std::vector<SweepRow> rows;
  std::size_t offset = 0;
  for (std::size_t layers : layer_counts) {
    for (Method m : methods) {
      rows.push_back(summarize(static_cast<double>(layers), to_string(m), results, offset, cfg.seeds.size()));
      offset += cfg.seeds.size();
    }
  }
  return rows;
}

std::string render_sweep_csv(const std::string& key_name, const std::vector<SweepRow>& rows) {
  std::string out = key_name + ",method,n,pcd_mean,pcd_std,ncd_mean,ncd_std,acc_mean,acc_std\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.key) + ',' + r.method + ',' + std::to_string(r.accuracies.size());
    for (double v : {r.pcd_mean, r.pcd_std, r.ncd_mean, r.ncd_std, r.acc_mean, r.acc_std}) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

}  // namespace gclab
