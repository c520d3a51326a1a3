#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>
#include <atomic>

#include "json.hpp"

#include "gclab/adam.hpp"
#include "gclab/augment.hpp"
#include "gclab/metrics.hpp"
#include "gclab/probe.hpp"
#include "gclab/runner.hpp"
#include "gclab/text.hpp"

namespace gclab {

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "epoch",          "nce_loss",         "mi_hat",           "delta_aug_hat",      "pcd",
      "ncd",            "delta_y_plus",     "delta_y_minus",    "mean_ce",            "bound_nce",
      "bound_margin",   "bound_slack",      "slack_pos",        "slack_neg",          "slack_pos_main",
      "slack_neg_main", "align_gap",        "pos_sim",          "neg_sim",            "edges_removed_v1",
      "features_masked_v1", "edges_removed_v2", "features_masked_v2", "probe_acc"};
  return cols;
}

std::string metrics_header_line(const std::string& dataset, Method method, std::uint64_t seed) {
  return "# gclab metrics v" + std::to_string(kMetricsSchemaVersion) + " dataset=" + dataset +
         " method=" + to_string(method) + " seed=" + std::to_string(seed);
}

std::string format_record(const MetricsRecord& r) {
  std::string s = std::to_string(r.epoch);
  for (double v : {r.nce_loss, r.mi_hat, r.delta_aug_hat, r.pcd, r.ncd, r.delta_y_plus, r.delta_y_minus, r.mean_ce,
                   r.bound_nce, r.bound_margin, r.bound_slack, r.slack_pos, r.slack_neg, r.slack_pos_main,
                   r.slack_neg_main, r.align_gap, r.pos_sim, r.neg_sim}) {
    s += ',' + format_double(v);
  }
  for (std::size_t v : {r.edges_removed_v1, r.features_masked_v1, r.edges_removed_v2, r.features_masked_v2})
    s += ',' + std::to_string(v);
  s += ',';
  if (r.probe_acc) s += format_double(*r.probe_acc);
  return s;
}

std::string render_metrics_csv(const std::string& dataset, Method method, std::uint64_t seed,
                               const std::vector<MetricsRecord>& records) {
  std::string out = metrics_header_line(dataset, method, seed) + '\n';
  const auto& cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const MetricsRecord& r : records) out += format_record(r) + '\n';
  return out;
}

Graph build_dataset(const RunConfig& cfg) {
  if (cfg.dataset == "sbm") {
    SbmParams p;
    p.block_sizes = cfg.sbm_blocks;
    p.p_in = cfg.sbm_p_in;
    p.p_out = cfg.sbm_p_out;
    p.feat_dim = cfg.sbm_feat_dim;
    p.feat_shift = cfg.sbm_feat_shift;
    p.seed = cfg.sbm_seed;
    return sbm_generate(p);
  }
  return load_dataset(cfg.dataset);
}

namespace {

struct EpochViews {
  ViewPlan plan1, plan2;
  EditCount edits1, edits2;
  TwoViewInput input;
};

EpochViews draw_views(const Graph& base, double p_edge1, double p_edge2, const RunConfig& cfg,
                      const ImportanceScores* importance, Rng& v1, Rng& v2, Rng& sd) {
  EpochViews ev;
  ev.plan1 = random_masks(base, p_edge1, cfg.p_feat1, v1);
  ev.plan2 = random_masks(base, p_edge2, cfg.p_feat2, v2);
  if (uses_spectral(cfg.method)) {
    ev.plan1.source = ViewSource::spectral_random;
    ev.plan2.source = ViewSource::spectral_random;
  }
  if (importance) {
    // Edge scores follow the current base edge list, which changes once the
    // spectral strategy has rebuilt the adjacency.
    const std::vector<double> es = uses_spectral(cfg.method) ? edge_scores(importance->alpha_v, base.edges())
                                                             : importance->alpha_e;
    const RetainDelete rd1 = build_retain_delete(es, importance->alpha_p, cfg.xi, sd);
    const RetainDelete rd2 = build_retain_delete(es, importance->alpha_p, cfg.xi, sd);
    ev.plan1 = combine_masks(ev.plan1, rd1);
    ev.plan2 = combine_masks(ev.plan2, rd2);
  }
  ev.edits1 = edit_count(base, ev.plan1);
  ev.edits2 = edit_count(base, ev.plan2);
  ev.input.a_norm1 = sym_normalize(apply_plan(base, ev.plan1).adjacency, true);
  ev.input.a_norm2 = sym_normalize(apply_plan(base, ev.plan2).adjacency, true);
  ev.input.feat_keep1 = ev.plan1.feat_keep;
  ev.input.feat_keep2 = ev.plan2.feat_keep;
  return ev;
}

MetricsRecord make_record(int epoch, const Graph& g, const Matrix& a_clean, const EncoderParams& params,
                          const TwoViewResult& tv, const EpochViews& ev, const NceConfig& nce) {
  const Matrix h0 = gcn_forward(a_clean, g.features(), params).embeddings;
  const Matrix& h1 = tv.h1;
  const Matrix& h2 = tv.h2;
  const int k = g.num_classes();
  MetricsRecord r;
  r.epoch = epoch;
  r.nce_loss = tv.nce.loss;
  r.mi_hat = mi_lower_bound(tv.nce.loss, tv.nce.negatives);
  r.delta_aug_hat = delta_aug_hat(h0, h1, h2);
  const ClassCenters centers = class_centers(h0, h1, h2, g.labels(), k);
  if (k >= 2) {
    const CenterDistances cd = center_distances(h0, centers, g.labels());
    r.pcd = cd.pcd;
    r.ncd = cd.ncd;
  }
  const ClassDivergences div = class_divergences(h0, g.labels(), k);
  r.delta_y_plus = div.delta_y_plus;
  r.delta_y_minus = div.delta_y_minus;
  r.mean_ce = mean_ce(h0, centers, g.labels());

  NceConfig unit = nce;
  unit.tau = 1.0;
  r.bound_nce = info_nce(h1, h2, unit).loss;
  const BoundReport b = bound_report(h0, h1, h2, g.labels(), k, r.bound_nce, tv.nce.negatives);
  r.bound_margin = b.margin;
  r.bound_slack = b.slack_term;

  const CenterBoundSlack t = center_bound_check(r.pcd, r.ncd, r.delta_y_plus, r.delta_y_minus, r.delta_aug_hat);
  r.slack_pos = t.slack_pos;
  r.slack_neg = t.slack_neg;
  r.slack_pos_main = t.slack_pos_main;
  r.slack_neg_main = t.slack_neg_main;

  const AlignmentIdentity ai = alignment_identity(h1, h2);
  r.align_gap = std::abs(ai.lhs - ai.rhs);
  const PairSimilarity ps = pair_similarities(h1, h2);
  r.pos_sim = ps.mean_pos;
  r.neg_sim = ps.mean_neg;
  r.edges_removed_v1 = ev.edits1.edges_removed;
  r.features_masked_v1 = ev.edits1.features_masked;
  r.edges_removed_v2 = ev.edits2.edges_removed;
  r.features_masked_v2 = ev.edits2.features_masked;
  return r;
}

double probe_accuracy(const RunConfig& cfg, const Graph& g, const Matrix& a_clean, const EncoderParams& params,
                      const Split& split) {
  const Matrix h0 = gcn_forward(a_clean, g.features(), params).embeddings;
  const ProbeModel m =
      fit_probe(h0, g.labels(), split.train_ids, g.num_classes(), {cfg.probe_l2, cfg.probe_iters, cfg.probe_tol});
  return accuracy(m, h0, g.labels(), split.test_ids);
}

}  // namespace

TrainResult train(const RunConfig& cfg, std::uint64_t seed, const Graph& g) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  const Rng root(seed);
  Rng init_rng = root.fork(1);
  Rng v1 = root.fork(2);
  Rng v2 = root.fork(3);
  Rng sd = root.fork(4);
  const std::uint64_t split_seed = root.fork(5).next_u64();
  Rng imp_rng = root.fork(6);

  if (uses_spectral(cfg.method) && g.num_nodes() > cfg.max_spectral_nodes) {
    throw ConfigError("spectral methods are limited to " + std::to_string(cfg.max_spectral_nodes) +
                      " nodes (graph has " + std::to_string(g.num_nodes()) + ")");
  }

  TrainResult result;
  result.params = init_encoder(g.num_features(), cfg.hidden_dim, cfg.out_dim, cfg.layers, init_rng);
  AdamState adam = make_adam_state(result.params.weights, {cfg.lr, cfg.weight_decay});
  const Split split = make_split(g, cfg.train_frac, split_seed);
  const Matrix a_clean = sym_normalize(g.adjacency(), true);
  const NceConfig nce{cfg.tau, cfg.negative_mode, true};

  Graph base = g;
  std::optional<SpectralState> spectral;
  double p_edge1 = cfg.p_edge1, p_edge2 = cfg.p_edge2;
  if (uses_spectral(cfg.method)) spectral = init_spectral(g, cfg.alpha, cfg.epsilon, cfg.spectral_period);
  std::optional<ImportanceScores> importance;

  try {
    for (int epoch = 0; epoch <= cfg.epochs; ++epoch) {
      const bool last = epoch == cfg.epochs;
      if (uses_info(cfg.method) && !importance && epoch == cfg.warmup_epoch && !last) {
        importance = compute_importance(base, result.params, nce, {p_edge1, cfg.p_feat1, p_edge2, cfg.p_feat2},
                                        imp_rng);
      }
      const EpochViews ev =
          draw_views(base, p_edge1, p_edge2, cfg, importance ? &*importance : nullptr, v1, v2, sd);
      const TwoViewResult tv = two_view_nce(ev.input, g.features(), result.params, nce);
      if (!std::isfinite(tv.nce.loss)) throw NonFiniteError("non-finite InfoNCE loss at epoch " + std::to_string(epoch), 0);

      const bool probe_now = last || (cfg.probe_every > 0 && epoch % cfg.probe_every == 0);
      if (last || epoch % cfg.log_every == 0) {
        MetricsRecord rec = make_record(epoch, g, a_clean, result.params, tv, ev, nce);
        if (probe_now) rec.probe_acc = probe_accuracy(cfg, g, a_clean, result.params, split);
        if (last) result.final_accuracy = rec.probe_acc;
        result.records.push_back(std::move(rec));
      }
      if (last) break;

      if (spectral && epoch % spectral->period == 0) {
        update_lambdas(*spectral, estimate_thetas(tv.h1, tv.h2, spectral->basis));
        const bool raw_scale = cfg.spectral_scale == "degree";
        Matrix a_spec = rebuild_adjacency(*spectral);
        if (raw_scale) a_spec = denormalize_adjacency(a_spec, g.adjacency());
        const double baseline =
            raw_scale ? mean_abs_weight(g.adjacency(), spectral->support) : spectral->mean_abs_weight_before;
        p_edge1 = compensate_weight_change(a_spec, baseline, cfg.p_edge1, spectral->support);
        p_edge2 = compensate_weight_change(a_spec, baseline, cfg.p_edge2, spectral->support);
        base = g.with_adjacency(std::move(a_spec));
      }

      EncoderParams next = result.params;
      adam_step(adam, next.weights, tv.weight_grads);
      for (const Matrix& w : next.weights)
        if (!all_finite(w)) throw NonFiniteError("non-finite parameters after epoch " + std::to_string(epoch), 0);
      result.params = std::move(next);
    }
  } catch (const NonFiniteError& e) {
    result.aborted = true;
    result.error = e.what();
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_run_outputs(const std::filesystem::path& dir, const RunConfig& cfg, std::uint64_t seed,
                       const TrainResult& result) {
  std::filesystem::create_directories(dir);
  const std::string stem = std::string(to_string(cfg.method)) + "_" + std::to_string(seed);
  {
    std::ofstream out(dir / ("metrics_" + stem + ".csv"), std::ios::binary);
    out << render_metrics_csv(cfg.dataset_label(), cfg.method, seed, result.records);
  }
  save_checkpoint(dir / ("checkpoint_" + stem + ".bin"), result.params);

  nlohmann::ordered_json side;
  side["schema_version"] = kCheckpointVersion;
  side["dataset"] = cfg.dataset_label();
  side["method"] = to_string(cfg.method);
  side["seed"] = seed;
  side["status"] = result.aborted ? "aborted" : "complete";
  if (result.aborted) side["error"] = result.error;
  nlohmann::ordered_json conf;
  for (const auto& [k, v] : config_to_map(cfg)) conf[k] = v;
  side["config"] = conf;
  {
    std::ofstream out(dir / ("checkpoint_" + stem + ".json"), std::ios::binary);
    out << side.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / ("timing_" + stem + ".json"), std::ios::binary);
    out << nlohmann::json{{"wall_seconds", result.wall_seconds}}.dump() << '\n';
  }
}

std::vector<TrainResult> run_jobs(const std::vector<Job>& jobs, int workers) {
  std::vector<TrainResult> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Graph g = build_dataset(jobs[i].cfg);
        results[i] = train(jobs[i].cfg, jobs[i].seed, g);
        if (!jobs[i].out_dir.empty()) write_run_outputs(jobs[i].out_dir, jobs[i].cfg, jobs[i].seed, results[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < jobs.size(); ++i)
    if (!errors[i].empty()) throw std::runtime_error("job " + std::to_string(i) + " failed: " + errors[i]);
  return results;
}

}  // namespace gclab
