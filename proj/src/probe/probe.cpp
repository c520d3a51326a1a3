#include "gclab/probe.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gclab {

namespace {

struct Params {
  Matrix w;
  std::vector<double> b;
};

// Log-softmax of one row of logits, written in place.
void log_softmax(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - mx);
  const double lse = mx + std::log(s);
  for (double& v : z) v -= lse;
}

void logits_row(const Matrix& w, const std::vector<double>& b, std::span<const double> h, std::vector<double>& z) {
  z.resize(w.rows());
  for (std::size_t k = 0; k < w.rows(); ++k) z[k] = b[k] + dot(w.row(k), h);
}

double objective_and_grad(const Params& p, const Matrix& h, const std::vector<int>& labels,
                          const std::vector<std::size_t>& ids, double l2, Params* grad) {
  const double inv_n = 1.0 / static_cast<double>(ids.size());
  double loss = 0.0;
  std::vector<double> z;
  if (grad) {
    grad->w = Matrix(p.w.rows(), p.w.cols());
    grad->b.assign(p.b.size(), 0.0);
  }
  for (std::size_t id : ids) {
    logits_row(p.w, p.b, h.row(id), z);
    log_softmax(z);
    const auto y = static_cast<std::size_t>(labels[id]);
    loss -= z[y];
    if (!grad) continue;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double r = std::exp(z[k]) - (k == y ? 1.0 : 0.0);
      grad->b[k] += r * inv_n;
      auto gw = grad->w.row(k);
      auto hr = h.row(id);
      for (std::size_t c = 0; c < hr.size(); ++c) gw[c] += r * hr[c] * inv_n;
    }
  }
  double wsq = 0.0;
  for (double v : p.w.data()) wsq += v * v;
  if (grad) {
    auto gw = grad->w.data();
    auto pw = p.w.data();
    for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += l2 * pw[i] * inv_n;
  }
  return (loss + 0.5 * l2 * wsq) * inv_n;
}

double grad_sq_norm(const Params& g) {
  double s = 0.0;
  for (double v : g.w.data()) s += v * v;
  for (double v : g.b) s += v * v;
  return s;
}

// Diagonal preconditioner from curvature bounds: the softmax Hessian is at
// most I/2 per sample, so the weight block is bounded by mean|h|²/2 + l2/n.
Params precondition(const Params& g, double w_scale, double b_scale) {
  Params d = g;
  for (double& v : d.w.data()) v /= w_scale;
  for (double& v : d.b) v /= b_scale;
  return d;
}

double inner(const Params& a, const Params& b) {
  double s = 0.0;
  auto aw = a.w.data();
  auto bw = b.w.data();
  for (std::size_t i = 0; i < aw.size(); ++i) s += aw[i] * bw[i];
  for (std::size_t k = 0; k < a.b.size(); ++k) s += a.b[k] * b.b[k];
  return s;
}

Params step_along(const Params& p, const Params& g, double t) {
  Params q = p;
  auto qw = q.w.data();
  auto gw = g.w.data();
  for (std::size_t i = 0; i < qw.size(); ++i) qw[i] -= t * gw[i];
  for (std::size_t k = 0; k < q.b.size(); ++k) q.b[k] -= t * g.b[k];
  return q;
}

}  // namespace

double probe_objective(const Matrix& w, const std::vector<double>& b, const Matrix& h, const std::vector<int>& labels,
                       const std::vector<std::size_t>& ids, double l2) {
  if (ids.empty()) throw ProbeError("probe_objective: empty id set");
  return objective_and_grad(Params{w, b}, h, labels, ids, l2, nullptr);
}

ProbeModel fit_probe(const Matrix& h, const std::vector<int>& labels, const std::vector<std::size_t>& train_ids,
                     int num_classes, const ProbeOptions& options) {
  if (labels.size() != h.rows()) throw ShapeError("fit_probe: labels and embeddings disagree on N");
  if (train_ids.empty()) throw ProbeError("fit_probe: empty training split");
  if (!(options.l2 >= 0.0)) throw ProbeError("fit_probe: l2 must be nonnegative");
  std::set<int> seen;
  for (std::size_t id : train_ids) {
    if (id >= h.rows()) throw ProbeError("fit_probe: training id out of range");
    seen.insert(labels[id]);
  }
  if (seen.size() < 2) throw ProbeError("fit_probe: training split covers fewer than 2 classes");

  const auto k = static_cast<std::size_t>(num_classes);
  Params p{Matrix(k, h.cols()), std::vector<double>(k, 0.0)};
  Params g;
  double f = objective_and_grad(p, h, labels, train_ids, options.l2, &g);
  double mean_sq = 0.0;
  for (std::size_t id : train_ids) mean_sq += dot(h.row(id), h.row(id));
  mean_sq /= static_cast<double>(train_ids.size());
  const double w_scale = 0.5 * mean_sq + options.l2 / static_cast<double>(train_ids.size()) + 1e-12;
  const double b_scale = 0.5;

  double t = 1.0;
  int it = 0;
  double gsq = grad_sq_norm(g);
  for (; it < options.iters && std::sqrt(gsq) > options.tol; ++it) {
    t = std::min(t * 2.0, 1e4);
    const Params d = precondition(g, w_scale, b_scale);
    const double slope = inner(g, d);
    Params q;
    double fq = 0.0;
    for (;;) {
      q = step_along(p, d, t);
      fq = objective_and_grad(q, h, labels, train_ids, options.l2, nullptr);
      if (fq <= f - 1e-4 * t * slope || t < 1e-12) break;
      t *= 0.5;
    }
    if (!(fq < f)) break;  // no further progress at machine precision
    p = std::move(q);
    f = objective_and_grad(p, h, labels, train_ids, options.l2, &g);
    gsq = grad_sq_norm(g);
  }

  ProbeModel m;
  m.w = std::move(p.w);
  m.b = std::move(p.b);
  m.l2 = options.l2;
  m.iters = options.iters;
  m.tol = options.tol;
  m.iterations_run = it;
  m.objective = f;
  m.grad_norm = std::sqrt(gsq);
  m.trained = true;
  return m;
}

Matrix predict_proba(const ProbeModel& model, const Matrix& h) {
  if (h.cols() != model.w.cols()) throw ShapeError("predict_proba: embedding width mismatch");
  Matrix out(h.rows(), model.w.rows());
  std::vector<double> z;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    logits_row(model.w, model.b, h.row(i), z);
    log_softmax(z);
    for (std::size_t k = 0; k < z.size(); ++k) out(i, k) = std::exp(z[k]);
  }
  return out;
}

std::vector<int> predict(const ProbeModel& model, const Matrix& h) {
  if (h.cols() != model.w.cols()) throw ShapeError("predict: embedding width mismatch");
  std::vector<int> out(h.rows());
  std::vector<double> z;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    logits_row(model.w, model.b, h.row(i), z);
    out[i] = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
  }
  return out;
}

double accuracy(const ProbeModel& model, const Matrix& h, const std::vector<int>& labels,
                const std::vector<std::size_t>& ids) {
  if (ids.empty()) return 0.0;
  const std::vector<int> pred = predict(model, h);
  std::size_t hit = 0;
  for (std::size_t id : ids) hit += pred.at(id) == labels.at(id) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(ids.size());
}

}  // namespace gclab
