#include "gclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gclab {

namespace {

void require_labels(const Matrix& h, const std::vector<int>& labels, int num_classes) {
  if (labels.size() != h.rows()) throw ShapeError("labels and embeddings disagree on N");
  for (int y : labels)
    if (y < 0 || y >= num_classes) throw std::invalid_argument("label out of range");
}

std::vector<std::vector<std::size_t>> members(const std::vector<int>& labels, int num_classes) {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) out[static_cast<std::size_t>(labels[i])].push_back(i);
  return out;
}

double distance(std::span<const double> a, std::span<const double> b) { return std::sqrt(squared_distance(a, b)); }

}  // namespace

ClassCenters class_centers(const Matrix& h0, const Matrix& h1, const Matrix& h2, const std::vector<int>& labels,
                           int num_classes) {
  require_same_shape(h0, h1, "class_centers");
  require_same_shape(h0, h2, "class_centers");
  require_labels(h0, labels, num_classes);
  const std::size_t d = h0.cols();
  const auto k = static_cast<std::size_t>(num_classes);
  ClassCenters c;
  c.mu = Matrix(k, d);
  c.counts.assign(k, 0);
  for (int y : labels) ++c.counts[static_cast<std::size_t>(y)];
  for (std::size_t y = 0; y < k; ++y)
    if (c.counts[y] == 0) throw std::invalid_argument("class_centers: class " + std::to_string(y) + " is empty");

  for (std::size_t i = 0; i < h0.rows(); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    const double n = static_cast<double>(c.counts[y]);
    auto mu = c.mu.row(y);
    for (std::size_t j = 0; j < d; ++j) mu[j] += h0(i, j) / (3.0 * n) + (h1(i, j) + h2(i, j)) / (3.0 * n);
  }
  c.priors.resize(k);
  c.mu_global.assign(d, 0.0);
  for (std::size_t y = 0; y < k; ++y) {
    c.priors[y] = static_cast<double>(c.counts[y]) / static_cast<double>(h0.rows());
    for (std::size_t j = 0; j < d; ++j) c.mu_global[j] += c.priors[y] * c.mu(y, j);
  }
  return c;
}

CenterDistances center_distances(const Matrix& h0, const ClassCenters& centers, const std::vector<int>& labels) {
  const std::size_t k = centers.mu.rows();
  require_labels(h0, labels, static_cast<int>(k));
  if (k < 2) throw std::invalid_argument("center_distances: ncd needs at least 2 classes");
  const std::size_t n = h0.rows();
  CenterDistances out;
  if (n == 0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    out.pcd += distance(h0.row(i), centers.mu.row(y));
    double other = 0.0;
    for (std::size_t z = 0; z < k; ++z)
      if (z != y) other += distance(h0.row(i), centers.mu.row(z));
    out.ncd += other / static_cast<double>(k - 1);
  }
  out.pcd /= static_cast<double>(n);
  out.ncd /= static_cast<double>(n);
  return out;
}

double delta_aug_hat(const Matrix& h0, const Matrix& h1, const Matrix& h2) {
  require_same_shape(h0, h1, "delta_aug_hat");
  require_same_shape(h0, h2, "delta_aug_hat");
  if (h0.rows() == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < h0.rows(); ++i)
    s += squared_distance(h0.row(i), h1.row(i)) + squared_distance(h0.row(i), h2.row(i));
  return std::sqrt(s / (2.0 * static_cast<double>(h0.rows())));
}

ClassDivergences class_divergences(const Matrix& h0, const std::vector<int>& labels, int num_classes) {
  require_labels(h0, labels, num_classes);
  const auto groups = members(labels, num_classes);
  const double n = static_cast<double>(h0.rows());
  ClassDivergences out;

  // Block sums of pairwise squared distances from class means m and scatters
  // S_a = Σ_{i∈a} ‖h_i − m_a‖²: Σ_{i∈a, j∈b} ‖h_i − h_j‖² = n_b S_a + n_a S_b + n_a n_b ‖m_a − m_b‖².
  const auto k = static_cast<std::size_t>(num_classes);
  const std::size_t d = h0.cols();
  Matrix means(k, d);
  for (std::size_t i = 0; i < h0.rows(); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    auto m = means.row(y);
    for (std::size_t j = 0; j < d; ++j) m[j] += h0(i, j) / static_cast<double>(groups[y].size());
  }
  std::vector<double> scatter(k, 0.0);
  for (std::size_t i = 0; i < h0.rows(); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    scatter[y] += squared_distance(h0.row(i), means.row(y));
  }
  std::vector<double> block(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const double na = static_cast<double>(groups[a].size()), nb = static_cast<double>(groups[b].size());
      block[a * k + b] = a == b ? 2.0 * na * scatter[a]
                                : nb * scatter[a] + na * scatter[b] + na * nb * squared_distance(means.row(a), means.row(b));
    }

  double plus = 0.0, plus_weight = 0.0;
  for (std::size_t y = 0; y < k; ++y) {
    const double ny = static_cast<double>(groups[y].size());
    if (groups[y].size() < 2) {
      if (!groups[y].empty()) out.warnings.push_back("class " + std::to_string(y) + " has a single node; skipped in delta_y_plus");
      continue;
    }
    const double p = ny / n;
    plus += p * block[y * k + y] / (ny * (ny - 1.0));
    plus_weight += p;
  }
  out.delta_y_plus = plus_weight > 0.0 ? std::sqrt(plus / plus_weight) : 0.0;

  if (k >= 2) {
    double minus = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      const double na = static_cast<double>(groups[a].size());
      if (na == 0.0) continue;
      for (std::size_t b = 0; b < k; ++b) {
        if (a == b || groups[b].empty()) continue;
        const double nb = static_cast<double>(groups[b].size());
        minus += (na / n) / static_cast<double>(k - 1) * block[a * k + b] / (na * nb);
      }
    }
    out.delta_y_minus = std::sqrt(minus);
  }
  return out;
}

double mean_ce(const Matrix& h0, const ClassCenters& centers, const std::vector<int>& labels) {
  const std::size_t k = centers.mu.rows();
  require_labels(h0, labels, static_cast<int>(k));
  if (h0.rows() == 0) return 0.0;
  std::vector<double> z(k);
  double total = 0.0;
  for (std::size_t i = 0; i < h0.rows(); ++i) {
    for (std::size_t y = 0; y < k; ++y) z[y] = dot(h0.row(i), centers.mu.row(y));
    const double mx = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - mx);
    total += mx + std::log(s) - z[static_cast<std::size_t>(labels[i])];
  }
  return total / static_cast<double>(h0.rows());
}

BoundReport bound_report(const Matrix& h0, const Matrix& h1, const Matrix& h2, const std::vector<int>& labels,
                         int num_classes, double nce_loss, std::size_t negatives) {
  if (negatives == 0) throw std::invalid_argument("bound_report: M must be at least 1");
  const ClassCenters c = class_centers(h0, h1, h2, labels, num_classes);
  BoundReport r;
  r.lhs_mean_ce = mean_ce(h0, c, labels);
  r.nce_loss = nce_loss;
  r.delta_aug = delta_aug_hat(h0, h1, h2);
  r.m = negatives;
  r.k = num_classes;

  const std::size_t n = h0.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const auto mu = c.mu.row(static_cast<std::size_t>(labels[i]));
    r.var_pos_given_y += squared_distance(h1.row(i), mu) + squared_distance(h2.row(i), mu);
    r.var_orig_given_y += squared_distance(h0.row(i), mu);
  }
  if (n) {
    r.var_pos_given_y /= 2.0 * static_cast<double>(n);
    r.var_orig_given_y /= static_cast<double>(n);
  }
  for (std::size_t y = 0; y < c.mu.rows(); ++y) r.var_mu += c.priors[y] * squared_distance(c.mu.row(y), c.mu_global);

  const double d = r.delta_aug;
  r.rhs = nce_loss - 3.0 * d * d - 2.0 * d - std::log(static_cast<double>(negatives) / num_classes) -
          0.5 * r.var_pos_given_y - std::sqrt(r.var_orig_given_y) - std::exp(1.0) * r.var_mu;
  r.margin = r.lhs_mean_ce - r.rhs;
  r.slack_term = 1.0 / std::sqrt(static_cast<double>(negatives));
  return r;
}

AlignmentIdentity alignment_identity(const Matrix& h1, const Matrix& h2) {
  require_same_shape(h1, h2, "alignment_identity");
  const std::size_t n = h1.rows();
  AlignmentIdentity a;
  if (n == 0) return a;
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a.lhs += squared_distance(h1.row(i), h2.row(i));
    tr += dot(h1.row(i), h2.row(i));
  }
  a.lhs /= static_cast<double>(n);
  a.rhs = 2.0 - 2.0 / static_cast<double>(n) * tr;
  return a;
}

CenterBoundSlack center_bound_check(double pcd, double ncd, double delta_y_plus, double delta_y_minus, double delta_aug) {
  return {delta_y_plus + delta_aug - pcd, delta_y_minus + delta_aug - ncd,
          delta_y_plus + 2.0 / 3.0 * delta_aug - pcd, delta_y_minus + 2.0 / 3.0 * delta_aug - ncd};
}

double mean_row_kl(const Matrix& p, const Matrix& q) {
  require_same_shape(p, q, "mean_row_kl");
  if (p.rows() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double kl = 0.0;
    for (std::size_t k = 0; k < p.cols(); ++k)
      if (p(i, k) > 0.0) kl += p(i, k) * (std::log(p(i, k)) - std::log(q(i, k)));
    total += std::max(0.0, kl);
  }
  return total / static_cast<double>(p.rows());
}

double label_consistency_kl(const EncoderParams& model, const ProbeModel& probe, const Graph& g,
                            const ViewPlan& view) {
  const Matrix clean = gcn_forward(sym_normalize(g.adjacency(), true), g.features(), model).embeddings;
  const ViewData v = apply_plan(g, view);
  const Matrix aug = gcn_forward(sym_normalize(v.adjacency, true), v.features, model).embeddings;
  return mean_row_kl(predict_proba(probe, clean), predict_proba(probe, aug));
}

}  // namespace gclab
