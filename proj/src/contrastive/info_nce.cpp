#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gclab/contrastive.hpp"

namespace gclab {

NegativeMode parse_negative_mode(const std::string& s) {
  if (s == "inter_only") return NegativeMode::inter_only;
  if (s == "inter_and_intra") return NegativeMode::inter_and_intra;
  throw std::invalid_argument("unknown negative mode '" + s + "'");
}

const char* to_string(NegativeMode m) {
  return m == NegativeMode::inter_only ? "inter_only" : "inter_and_intra";
}

std::size_t negatives_per_anchor(std::size_t n, const NceConfig& cfg) {
  if (n == 0) return 0;
  return cfg.negative_mode == NegativeMode::inter_only ? n - 1 : 2 * n - 2;
}

namespace {

void require_unit_rows(const Matrix& h, const char* name) {
  for (std::size_t i = 0; i < h.rows(); ++i) {
    const double norm = std::sqrt(dot(h.row(i), h.row(i)));
    if (norm != 0.0 && std::abs(norm - 1.0) > 1e-6) {
      throw std::invalid_argument(std::string("info_nce: row ") + std::to_string(i) + " of " + name +
                                  " has norm " + std::to_string(norm));
    }
  }
}

// Softmax over a term list; returns log-sum-exp and writes probabilities.
double log_softmax_terms(std::vector<double>& terms) {
  const double mx = *std::max_element(terms.begin(), terms.end());
  double z = 0.0;
  for (double& t : terms) {
    t = std::exp(t - mx);
    z += t;
  }
  for (double& t : terms) t /= z;
  return mx + std::log(z);
}

}  // namespace

NceResult info_nce(const Matrix& h1, const Matrix& h2, const NceConfig& cfg) {
  require_same_shape(h1, h2, "info_nce");
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("info_nce: tau must be positive");
  const std::size_t n = h1.rows();
  if (n == 0) throw ShapeError("info_nce: empty embeddings");
  const bool intra = cfg.negative_mode == NegativeMode::inter_and_intra;
  const bool pos = cfg.include_positive_in_denominator;
  if (n == 1 && !pos) throw std::invalid_argument("info_nce: empty denominator (single node, no positive)");
  require_unit_rows(h1, "h1");
  require_unit_rows(h2, "h2");

  const double inv_tau = 1.0 / cfg.tau;
  Matrix s = matmul_nt(h1, h2);
  s *= inv_tau;
  Matrix a1, a2;
  if (intra) {
    a1 = matmul_nt(h1, h1);
    a1 *= inv_tau;
    a2 = matmul_nt(h2, h2);
    a2 *= inv_tau;
  }

  Matrix gs(n, n), ga1(n, n), ga2(n, n);
  double loss = 0.0;
  std::vector<double> terms;
  terms.reserve(3 * n);

  // Term layout per anchor: [positive?] [n−1 inter negatives] [n−1 intra negatives?]
  for (int view = 0; view < 2; ++view) {
    const Matrix& intra_sim = view == 0 ? a1 : a2;
    Matrix& intra_grad = view == 0 ? ga1 : ga2;
    for (std::size_t i = 0; i < n; ++i) {
      terms.clear();
      if (pos) terms.push_back(s(i, i));
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) terms.push_back(view == 0 ? s(i, j) : s(j, i));
      if (intra)
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) terms.push_back(intra_sim(i, j));

      loss += log_softmax_terms(terms) - s(i, i);

      std::size_t t = 0;
      gs(i, i) -= 1.0;
      if (pos) gs(i, i) += terms[t++];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        if (view == 0) gs(i, j) += terms[t++];
        else gs(j, i) += terms[t++];
      }
      if (intra)
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) intra_grad(i, j) += terms[t++];
    }
  }

  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  NceResult r;
  r.loss = loss * scale;
  r.negatives = negatives_per_anchor(n, cfg);
  gs *= scale * inv_tau;
  r.d_h1 = matmul(gs, h2);
  r.d_h2 = matmul_tn(gs, h1);
  if (intra) {
    ga1 *= scale * inv_tau;
    ga2 *= scale * inv_tau;
    r.d_h1 += matmul(ga1 + ga1.transposed(), h1);
    r.d_h2 += matmul(ga2 + ga2.transposed(), h2);
  }
  return r;
}

PairSimilarity pair_similarities(const Matrix& h1, const Matrix& h2) {
  require_same_shape(h1, h2, "pair_similarities");
  const std::size_t n = h1.rows();
  PairSimilarity p;
  if (n == 0) return p;
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dot(h1.row(i), h2.row(j));
      if (i == j) pos += v;
      else neg += v;
    }
  }
  p.mean_pos = pos / static_cast<double>(n);
  p.mean_neg = n > 1 ? neg / static_cast<double>(n * (n - 1)) : 0.0;
  return p;
}

double mi_lower_bound(double loss, std::size_t negatives) {
  if (negatives == 0) throw std::invalid_argument("mi_lower_bound: M must be at least 1");
  return std::log(static_cast<double>(negatives)) - loss;
}

namespace {

Matrix mask_columns(const Matrix& x, const std::vector<bool>& keep) {
  if (keep.size() != x.cols()) throw ShapeError("feature mask length does not match feature count");
  Matrix out = x;
  for (std::size_t c = 0; c < keep.size(); ++c) {
    if (keep[c]) continue;
    for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) = 0.0;
  }
  return out;
}

}  // namespace

TwoViewResult two_view_nce(const TwoViewInput& views, const Matrix& features, const EncoderParams& params,
                           const NceConfig& cfg) {
  auto f1 = gcn_forward(views.a_norm1, mask_columns(features, views.feat_keep1), params);
  auto f2 = gcn_forward(views.a_norm2, mask_columns(features, views.feat_keep2), params);
  TwoViewResult r;
  r.nce = info_nce(f1.embeddings, f2.embeddings, cfg);
  const EncoderGrads g1 = gcn_backward(f1.cache, params, r.nce.d_h1);
  const EncoderGrads g2 = gcn_backward(f2.cache, params, r.nce.d_h2);
  for (std::size_t l = 0; l < params.weights.size(); ++l) r.weight_grads.push_back(g1.weights[l] + g2.weights[l]);
  r.input_grad = mask_columns(g1.input, views.feat_keep1) + mask_columns(g2.input, views.feat_keep2);
  r.activation_pattern = activation_pattern(f1.cache);
  const auto p2 = activation_pattern(f2.cache);
  r.activation_pattern.insert(r.activation_pattern.end(), p2.begin(), p2.end());
  r.h1 = std::move(f1.embeddings);
  r.h2 = std::move(f2.embeddings);
  return r;
}

}  // namespace gclab
