// Acceptance checks. One PASS/FAIL/SKIP line per criterion.
//
// Exit status: nonzero only when a correctness criterion (1-6, 10, 11) fails.
// The trend criteria (7, 8, 9) compare accuracies and class distances across
// configurations; their lines are printed as measured but do not change the
// exit status.
//
// Environment:
//   GCLAB_ACCEPTANCE_OUT  run directory (default ./acceptance_runs)
//   GCLAB_CORA_DIR        converted Cora dataset for criterion 9
//   GCLAB_WORKERS         training threads (default: hardware concurrency)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "gclab/augment.hpp"
#include "gclab/contrastive.hpp"
#include "gclab/eigh.hpp"
#include "gclab/runner.hpp"

using namespace gclab;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 10.0;
constexpr double kEighResidual = 1e-8;
constexpr double kEighIdentity = 1e-6;
constexpr double kEighSeconds = 30.0;
constexpr double kShiftFactor = 3.0;
constexpr double kShiftFloor = 1e-13;  // errors below this are roundoff
constexpr double kShiftSeconds = 10.0;
constexpr double kAlignTol = 1e-10;
constexpr double kSlackTol = -1e-9;
constexpr double kBoundConstant = 1.0;
constexpr double kNcdGain = 0.05;
constexpr double kDropSeconds = 15 * 60.0;
constexpr double kSpectralDrop = 0.003;  // 0.3 accuracy points
constexpr double kTrendSeconds = 30 * 60.0;
constexpr double kCoraAcc = 0.78;
constexpr double kCoraSeconds = 20 * 60.0;

struct Outcome {
  int id = 0;
  std::string name;
  std::string status;  // PASS, FAIL or SKIP
  std::string detail;
  bool gating = true;
};

std::vector<Outcome> outcomes;

void record(int id, const std::string& name, bool pass, const std::string& detail, bool gating = true) {
  outcomes.push_back({id, name, pass ? "PASS" : "FAIL", detail, gating});
  const Outcome& o = outcomes.back();
  std::printf("criterion %d: %s %s (%s)\n", o.id, o.status.c_str(), o.name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

void skip(int id, const std::string& name, const std::string& why) {
  outcomes.push_back({id, name, "SKIP", why, false});
  std::printf("criterion %d: SKIP %s (%s)\n", id, name.c_str(), why.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string body(const std::string& csv) { return csv.substr(csv.find('\n')); }

Matrix random_symmetric(std::size_t n, Rng& rng) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.gaussian();
  return a;
}

// 1 -------------------------------------------------------------------------
void gradient_fidelity() {
  const Stopwatch sw;
  SbmParams sp;
  sp.block_sizes = {6, 6};
  sp.p_in = 0.5;
  sp.p_out = 0.2;
  sp.feat_dim = 6;
  sp.seed = 12;
  const Graph g = sbm_generate(sp);
  Rng rng(2024);
  const EncoderParams params = init_encoder(6, 8, 8, 2, rng);
  const ViewPlan p1 = random_masks(g, 0.2, 0.3, rng), p2 = random_masks(g, 0.4, 0.4, rng);
  const TwoViewInput views{sym_normalize(apply_plan(g, p1).adjacency, true),
                           sym_normalize(apply_plan(g, p2).adjacency, true), p1.feat_keep, p2.feat_keep};
  const NceConfig cfg{};
  const LossFn fn = [&](const EncoderParams& p, const Matrix& x) {
    TwoViewResult r = two_view_nce(views, x, p, cfg);
    return LossEval{r.nce.loss, std::move(r.weight_grads), std::move(r.input_grad), std::move(r.activation_pattern)};
  };
  const GradCheckResult res = gradient_check(g, params, fn);
  const double t = sw.seconds();
  std::ostringstream d;
  d << "max rel error " << fmt("%.3e", res.max_rel_error) << " over " << res.checked << " coordinates, "
    << res.kinks_skipped << " kink-skipped, " << fmt("%.2f", t) << " s";
  record(1, "gradient fidelity", res.checked > 0 && res.max_rel_error <= kGradTol && t < kGradSeconds, d.str());
}

// 2 -------------------------------------------------------------------------
void eigen_contract() {
  const Stopwatch sw;
  Rng rng(77);
  double worst_res = 0.0, worst_orth = 0.0, worst_trace = 0.0, worst_frob = 0.0;
  for (std::size_t k = 0; k < 50; ++k) {
    const std::size_t n = 1 + (k * 63) / 49;
    const Matrix a = random_symmetric(n, rng);
    const EigenDecomp ed = eigh(a);
    Matrix ul = ed.eigenvectors;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ul(i, j) *= ed.eigenvalues[j];
    const double scale = std::max(1.0, frobenius_norm(a));
    worst_res = std::max(worst_res, frobenius_norm(a - matmul_nt(ul, ed.eigenvectors)) / scale);
    worst_orth = std::max(worst_orth, max_abs(matmul_tn(ed.eigenvectors, ed.eigenvectors) - Matrix::identity(n)));
    double sum = 0.0, sum_sq = 0.0;
    for (double l : ed.eigenvalues) sum += l, sum_sq += l * l;
    const double f2 = frobenius_norm(a) * frobenius_norm(a);
    worst_trace = std::max(worst_trace, std::abs(sum - trace(a)) / scale);
    worst_frob = std::max(worst_frob, std::abs(sum_sq - f2) / std::max(1.0, f2));
  }
  const double t = sw.seconds();
  std::ostringstream d;
  d << "50 matrices n=1..64, residual " << fmt("%.2e", worst_res) << ", orthogonality " << fmt("%.2e", worst_orth)
    << ", trace " << fmt("%.2e", worst_trace) << ", frobenius " << fmt("%.2e", worst_frob) << ", "
    << fmt("%.2f", t) << " s";
  const bool pass = worst_res <= kEighResidual && worst_orth <= kEighResidual && worst_trace <= kEighIdentity &&
                    worst_frob <= kEighIdentity && t < kEighSeconds;
  record(2, "eigen contract", pass, d.str());
}

// 3 -------------------------------------------------------------------------
void eigen_shift_order() {
  const Stopwatch sw;
  SbmParams sp;
  sp.block_sizes = {4, 4};
  sp.p_in = 0.9;
  sp.p_out = 0.3;
  sp.feat_dim = 2;
  sp.seed = 31;
  const Graph g = sbm_generate(sp);
  const Matrix& a = g.adjacency();
  const EigenDecomp ed = generalized_eigenbasis(a);
  // Symmetric unit perturbations on one pair per view.
  Matrix e1(8, 8), e2(8, 8);
  e1(0, 5) = e1(5, 0) = 1.0;
  e2(2, 6) = e2(6, 2) = 1.0;

  std::vector<std::size_t> order(8);
  for (std::size_t i = 0; i < 8; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(ed.eigenvalues[x]) > std::abs(ed.eigenvalues[y]);
  });
  order.resize(3);

  const double hs[] = {1e-2, 5e-3, 2.5e-3};
  std::vector<std::vector<double>> err(3);
  for (int s = 0; s < 3; ++s) {
    const double h = hs[s];
    const std::vector<double> pred = predict_eigen_shift(ed.eigenvectors, ed.eigenvalues, e1 * h, e2 * h);
    const std::vector<double> l1 = eigh(sym_normalize(a + e1 * h, false)).eigenvalues;
    const std::vector<double> l2 = eigh(sym_normalize(a + e2 * h, false)).eigenvalues;
    for (std::size_t i : order) err[s].push_back(std::abs(pred[i] - (l1[i] - l2[i])));
  }
  bool pass = true;
  std::ostringstream d;
  for (std::size_t r = 0; r < 3; ++r) {
    d << "λ=" << fmt("%.4f", ed.eigenvalues[order[r]]) << " errors";
    for (int s = 0; s < 3; ++s) d << ' ' << fmt("%.2e", err[s][r]);
    for (int s = 0; s + 1 < 3; ++s) {
      if (err[s][r] <= kShiftFloor && err[s + 1][r] <= kShiftFloor) continue;
      if (err[s][r] / std::max(err[s + 1][r], 1e-300) < kShiftFactor) pass = false;
    }
    d << "; ";
  }
  const double t = sw.seconds();
  d << fmt("%.2f", t) << " s";
  record(3, "eigen-shift order", pass && t < kShiftSeconds, d.str());
}

// Shared SBM settings for the training criteria.
RunConfig config_a() {
  RunConfig c;
  c.sbm_blocks = {50, 50, 50, 50};
  c.sbm_p_in = 0.15;
  c.sbm_p_out = 0.03;
  c.sbm_feat_shift = 1.0;
  c.sbm_seed = 0;
  return c;
}

RunConfig config_b() {
  RunConfig c = config_a();
  c.sbm_p_in = 0.1;
  c.sbm_p_out = 0.01;
  c.sbm_seed = 1;
  return c;
}

struct RunKey {
  std::string config;
  Method method;
  std::uint64_t seed;
  bool operator<(const RunKey& o) const {
    return std::tie(config, method, seed) < std::tie(o.config, o.method, o.seed);
  }
};

}  // namespace

int main() {
  const char* out_env = std::getenv("GCLAB_ACCEPTANCE_OUT");
  const fs::path out = out_env ? fs::path(out_env) : fs::current_path() / "acceptance_runs";
  fs::remove_all(out);
  fs::create_directories(out);
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* w = std::getenv("GCLAB_WORKERS")) workers = std::max(1, std::atoi(w));
  std::printf("acceptance runs under %s with %d worker(s)\n", out.string().c_str(), workers);

  gradient_fidelity();
  eigen_contract();
  eigen_shift_order();

  // Training matrix: every method on both configs. grace, grace_s and grace_is
  // get ten seeds for the method trend; grace_i gets the three seeds of the
  // property matrix.
  const std::map<std::string, RunConfig> configs{{"config_a", config_a()}, {"config_b", config_b()}};
  std::vector<Job> jobs;
  std::vector<RunKey> keys;
  for (const auto& [name, base] : configs)
    for (Method m : {Method::grace, Method::grace_i, Method::grace_s, Method::grace_is})
      for (std::uint64_t s = 0; s < (m == Method::grace_i ? 3u : 10u); ++s) {
        RunConfig c = base;
        c.method = m;
        jobs.push_back({c, s, out / "matrix" / name});
        keys.push_back({name, m, s});
      }
  const Stopwatch matrix_clock;
  const std::vector<TrainResult> results = run_jobs(jobs, workers);
  const double matrix_seconds = matrix_clock.seconds();
  std::map<RunKey, const TrainResult*> by_key;
  for (std::size_t i = 0; i < jobs.size(); ++i) by_key[keys[i]] = &results[i];
  report(out / "matrix", kBoundConstant);

  // 4, 5, 6 over every run and every logged row.
  {
    double worst_gap = 0.0, worst_slack = 1e300, worst_bound = 1e300;
    std::size_t rows = 0, aborted = 0;
    for (const TrainResult& r : results) {
      aborted += r.aborted ? 1 : 0;
      for (const MetricsRecord& rec : r.records) {
        ++rows;
        worst_gap = std::max(worst_gap, rec.align_gap);
        worst_slack = std::min({worst_slack, rec.slack_pos, rec.slack_neg});
        worst_bound = std::min(worst_bound, rec.bound_margin + kBoundConstant * rec.bound_slack);
      }
    }
    const std::string where = std::to_string(results.size()) + " runs, " + std::to_string(rows) + " rows, " +
                              std::to_string(aborted) + " aborted";
    record(4, "alignment identity", aborted == 0 && worst_gap <= kAlignTol,
           "max gap " + fmt("%.2e", worst_gap) + ", " + where);
    record(5, "center-distance bounds", aborted == 0 && worst_slack >= kSlackTol,
           "min slack " + fmt("%.4e", worst_slack) + ", " + where);
    record(6, "supervised-risk bound", aborted == 0 && worst_bound >= 0.0,
           "min margin + M^-1/2 " + fmt("%.4e", worst_bound) + ", margins in " +
               (out / "matrix" / "summary.json").string());
  }

  // 7 -----------------------------------------------------------------------
  {
    const Stopwatch sw;
    RunConfig c = config_a();
    c.seeds = {0, 1, 2};
    const std::vector<double> rates{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const std::vector<SweepRow> rows = sweep_droprate(c, rates, workers, out / "droprate");
    {
      std::ofstream f(out / "droprate" / "sweep.csv", std::ios::binary);
      f << render_sweep_csv("rate", rows);
    }
    const double t = sw.seconds();
    auto row_at = [&](double r) {
      return *std::find_if(rows.begin(), rows.end(), [&](const SweepRow& s) { return std::abs(s.key - r) < 1e-12; });
    };
    const SweepRow low = row_at(0.05), mid = row_at(0.4);
    const double gain = mid.ncd_mean / low.ncd_mean - 1.0;
    double best_acc = -1.0, best_rate = 0.0;
    for (const SweepRow& s : rows)
      if (s.key >= 0.2 - 1e-12 && s.acc_mean > best_acc) best_acc = s.acc_mean, best_rate = s.key;
    std::ostringstream d;
    d << "ncd " << fmt("%.4f", low.ncd_mean) << " -> " << fmt("%.4f", mid.ncd_mean) << " (" << fmt("%+.1f", 100 * gain)
      << "%), acc@0.05 " << fmt("%.4f", low.acc_mean) << ", best acc at rate>=0.2 " << fmt("%.4f", best_acc) << " @"
      << fmt("%.2f", best_rate) << ", " << fmt("%.0f", t) << " s";
    record(7, "drop-rate trend", gain >= kNcdGain && best_acc > low.acc_mean && t < kDropSeconds, d.str(), false);
  }

  // 8 -----------------------------------------------------------------------
  {
    auto mean_acc = [&](const std::string& cfg, Method m) {
      std::vector<double> v;
      for (std::uint64_t s = 0; s < 10; ++s) v.push_back(by_key.at({cfg, m, s})->final_accuracy.value_or(0.0));
      return mean_of(v);
    };
    bool s_ok = true, is_ok = false;
    std::ostringstream d;
    for (const auto& [name, base] : configs) {
      (void)base;
      const double g = mean_acc(name, Method::grace), gs = mean_acc(name, Method::grace_s),
                   gis = mean_acc(name, Method::grace_is);
      s_ok = s_ok && gs >= g - kSpectralDrop;
      is_ok = is_ok || gis >= g;
      d << name << " grace " << fmt("%.4f", g) << " grace_s " << fmt("%.4f", gs) << " grace_is " << fmt("%.4f", gis)
        << "; ";
    }
    d << "training matrix " << fmt("%.0f", matrix_seconds) << " s";
    record(8, "method trend", s_ok && is_ok && matrix_seconds < kTrendSeconds, d.str(), false);
  }

  // 9 -----------------------------------------------------------------------
  if (const char* cora = std::getenv("GCLAB_CORA_DIR")) {
    const Stopwatch sw;
    RunConfig c;
    apply_preset(c, "cora");
    c.dataset = cora;
    c.train_frac = 0.1;
    std::vector<Job> cj;
    for (std::uint64_t s = 0; s < 5; ++s) cj.push_back({c, s, out / "cora"});
    std::vector<double> accs;
    for (const TrainResult& r : run_jobs(cj, workers)) accs.push_back(r.final_accuracy.value_or(0.0));
    const double t = sw.seconds();
    const double m = mean_of(accs);
    record(9, "cora accuracy", m >= kCoraAcc && t < kCoraSeconds,
           "mean " + fmt("%.4f", m) + " std " + fmt("%.4f", pstdev_of(accs)) + ", " + fmt("%.0f", t) + " s", false);
  } else {
    skip(9, "cora accuracy", "GCLAB_CORA_DIR not set");
  }

  // 10 ----------------------------------------------------------------------
  {
    std::vector<Job> again;
    for (Method m : {Method::grace, Method::grace_i, Method::grace_s, Method::grace_is}) {
      RunConfig c = config_b();
      c.method = m;
      again.push_back({c, 1, out / "rerun"});
    }
    run_jobs(again, workers);
    std::size_t same = 0;
    for (const Job& j : again) {
      const std::string file = std::string("metrics_") + to_string(j.cfg.method) + "_1.csv";
      same += slurp(out / "rerun" / file) == slurp(out / "matrix" / "config_b" / file) ? 1 : 0;
    }
    record(10, "determinism", same == again.size(),
           std::to_string(same) + "/" + std::to_string(again.size()) + " re-run CSVs byte-identical");
  }

  // 11 ----------------------------------------------------------------------
  {
    std::vector<Job> zero;
    for (const auto& [name, base] : configs)
      for (std::uint64_t s = 0; s < 3; ++s) {
        RunConfig c = base;
        c.method = Method::grace_i;
        c.xi = 0.0;
        zero.push_back({c, s, out / "xi0" / name});
      }
    run_jobs(zero, workers);
    std::size_t same = 0;
    for (const Job& j : zero) {
      const fs::path dir = j.out_dir.filename();
      const std::string s = std::to_string(j.seed);
      same += body(slurp(j.out_dir / ("metrics_grace_i_" + s + ".csv"))) ==
                      body(slurp(out / "matrix" / dir / ("metrics_grace_" + s + ".csv")))
                  ? 1
                  : 0;
    }
    record(11, "xi=0 degradation", same == zero.size(),
           std::to_string(same) + "/" + std::to_string(zero.size()) +
               " grace_i CSVs equal grace below the header line");
  }

  int gating_failures = 0, failures = 0;
  for (const Outcome& o : outcomes) {
    failures += o.status == "FAIL" ? 1 : 0;
    gating_failures += o.status == "FAIL" && o.gating ? 1 : 0;
  }
  std::printf("summary: %d failed (%d correctness), trend criteria do not affect the exit status\n", failures,
              gating_failures);
  return gating_failures == 0 ? 0 : 1;
}
