#include <cmath>
#include <functional>
#include <ostream>

#include "gclab/augment.hpp"
#include "gclab/eigh.hpp"
#include "gclab/metrics.hpp"
#include "gclab/probe.hpp"
#include "gclab/runner.hpp"

namespace gclab {

namespace {

Matrix random_symmetric(std::size_t n, Rng& rng) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.gaussian();
  return a;
}

Matrix random_unit_rows(std::size_t n, std::size_t d, Rng& rng) {
  Matrix h(n, d);
  for (double& v : h.data()) v = rng.gaussian();
  return row_unit_normalize(h).value;
}

bool check_eigh() {
  Rng rng(11);
  for (std::size_t n : {1, 5, 16, 33}) {
    const Matrix a = random_symmetric(n, rng);
    const EigenDecomp ed = eigh(a);
    const double resid = frobenius_norm(reconstruct(ed.eigenvectors, ed.eigenvalues) - a);
    if (resid > 1e-8 * std::max(1.0, frobenius_norm(a))) return false;
    if (max_abs(matmul_tn(ed.eigenvectors, ed.eigenvectors) - Matrix::identity(n)) > 1e-8) return false;
    if (!std::is_sorted(ed.eigenvalues.begin(), ed.eigenvalues.end())) return false;
  }
  return true;
}

bool check_rng() {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i)
    if (a.next_u64() != b.next_u64()) return false;
  Rng c(3);
  double s = 0.0;
  for (int i = 0; i < 100000; ++i) s += c.bernoulli(0.3) ? 1.0 : 0.0;
  return std::abs(s / 1e5 - 0.3) < 0.01;
}

bool check_gradients() {
  SbmParams sp;
  sp.block_sizes = {6, 6};
  sp.p_in = 0.5;
  sp.p_out = 0.1;
  sp.feat_dim = 5;
  sp.seed = 4;
  const Graph g = sbm_generate(sp);
  Rng rng(5);
  const EncoderParams params = init_encoder(g.num_features(), 6, 4, 2, rng);
  const ViewPlan p1 = random_masks(g, 0.2, 0.2, rng), p2 = random_masks(g, 0.3, 0.2, rng);
  const TwoViewInput views{sym_normalize(apply_plan(g, p1).adjacency, true),
                           sym_normalize(apply_plan(g, p2).adjacency, true), p1.feat_keep, p2.feat_keep};
  const LossFn fn = [&](const EncoderParams& p, const Matrix& x) {
    TwoViewResult r = two_view_nce(views, x, p, NceConfig{});
    return LossEval{r.nce.loss, std::move(r.weight_grads), std::move(r.input_grad), std::move(r.activation_pattern)};
  };
  const GradCheckResult res = gradient_check(g, params, fn);
  return res.checked > 0 && res.max_rel_error <= 1e-4;
}

bool check_alignment_identity() {
  Rng rng(8);
  const Matrix h1 = random_unit_rows(20, 6, rng), h2 = random_unit_rows(20, 6, rng);
  const AlignmentIdentity a = alignment_identity(h1, h2);
  return std::abs(a.lhs - a.rhs) <= 1e-12;
}

bool check_theta_trace() {
  SbmParams sp;
  sp.block_sizes = {8, 8};
  sp.p_in = 0.5;
  sp.p_out = 0.1;
  sp.seed = 2;
  const Graph g = sbm_generate(sp);
  const SpectralState st = init_spectral(g, 0.01, 0.01, 10);
  Rng rng(9);
  const Matrix h1 = random_unit_rows(16, 4, rng), h2 = random_unit_rows(16, 4, rng);
  const std::vector<double> theta = estimate_thetas(h1, h2, st.basis);
  double s = 0.0;
  for (double t : theta) s += t;
  return std::abs(s - trace(matmul_tn(h1, h2))) <= 1e-9;
}

bool check_normalized_spectrum() {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 8 + 10 * static_cast<std::size_t>(trial);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.bernoulli(0.2)) a(i, j) = a(j, i) = 1.0;
    const EigenDecomp ed = eigh(sym_normalize(a, true));
    if (std::max(std::abs(ed.eigenvalues.front()), std::abs(ed.eigenvalues.back())) > 1.0 + 1e-9) return false;
  }
  return true;
}

bool check_retain_delete_ratio() {
  Rng rng(13);
  std::vector<double> scores(100);
  for (double& s : scores) s = rng.uniform();
  double retained = 0.0, deleted = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const RetainDeleteSets s = retain_delete_sets(scores, 0.1, rng);
    for (bool b : s.retain) retained += b;
    for (bool b : s.gate) deleted += !b;
  }
  return std::abs(deleted / retained - 2.0) < 0.1;
}

bool check_probe_separable() {
  Matrix h(40, 2);
  std::vector<int> y(40);
  std::vector<std::size_t> ids(40);
  for (std::size_t i = 0; i < 40; ++i) {
    y[i] = i < 20 ? 0 : 1;
    h(i, 0) = y[i] ? 1.0 : -1.0;
    h(i, 1) = 0.01 * static_cast<double>(i % 5);
    ids[i] = i;
  }
  const ProbeModel m = fit_probe(h, y, ids, 2, {0.01, 500, 1e-8});
  return accuracy(m, h, y, ids) == 1.0;
}

}  // namespace

int selftest(std::ostream& out) {
  const std::pair<const char*, std::function<bool()>> suites[] = {
      {"rng determinism and bernoulli mean", check_rng},
      {"eigh contract", check_eigh},
      {"info_nce end-to-end gradients", check_gradients},
      {"alignment identity", check_alignment_identity},
      {"theta trace identity", check_theta_trace},
      {"normalized adjacency spectral radius", check_normalized_spectrum},
      {"retain/delete 1:2 ratio", check_retain_delete_ratio},
      {"probe on separable data", check_probe_separable},
  };
  int failures = 0;
  for (const auto& [name, fn] : suites) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      out << "  error: " << e.what() << '\n';
    }
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    failures += ok ? 0 : 1;
  }
  return failures;
}

}  // namespace gclab
