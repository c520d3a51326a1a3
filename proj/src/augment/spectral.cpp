#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gclab/augment.hpp"

namespace gclab {

SpectralState init_spectral(const Graph& g, double alpha, double epsilon, int period) {
  if (period < 1) throw std::invalid_argument("spectral period must be at least 1");
  const Matrix a_norm = sym_normalize(g.adjacency(), false);
  EigenDecomp ed = eigh(a_norm);
  SpectralState s;
  s.basis = std::move(ed.eigenvectors);
  s.lambda = std::move(ed.eigenvalues);
  s.last_direction.assign(s.lambda.size(), 0);
  s.alpha = alpha;
  s.epsilon = epsilon;
  s.period = period;
  s.support = g.edges();
  s.mean_abs_weight_before = mean_abs_weight(a_norm, s.support);
  return s;
}

std::vector<double> estimate_thetas(const Matrix& h1, const Matrix& h2, const Matrix& basis) {
  require_same_shape(h1, h2, "estimate_thetas");
  if (basis.rows() != h1.rows()) throw ShapeError("estimate_thetas: basis and embeddings disagree on N");
  // u_iᵀ M̂ u_i = (u_iᵀH¹)·(u_iᵀH²) because M̂ is the symmetric part of H¹H²ᵀ.
  const Matrix p1 = matmul_tn(basis, h1);
  const Matrix p2 = matmul_tn(basis, h2);
  std::vector<double> theta(basis.cols());
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = dot(p1.row(i), p2.row(i));
  return theta;
}

void update_lambdas(SpectralState& state, const std::vector<double>& theta_cur) {
  if (theta_cur.size() != state.lambda.size()) throw ShapeError("update_lambdas: θ length mismatch");
  state.last_direction.assign(state.lambda.size(), 0);
  if (state.theta_prev) {
    const std::vector<double>& prev = *state.theta_prev;
    for (std::size_t i = 0; i < state.lambda.size(); ++i) {
      const double d = theta_cur[i] - prev[i];
      int dir = 0;
      if (d >= state.epsilon) dir = -1;
      else if (d <= -state.epsilon) dir = 1;
      state.last_direction[i] = dir;
      state.lambda[i] += dir * state.lambda[i] * state.alpha;
    }
  }
  state.theta_prev = theta_cur;
}

Matrix rebuild_adjacency(const SpectralState& state) {
  Matrix a = reconstruct(state.basis, state.lambda);
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double w = 0.5 * (a(i, j) + a(j, i));
      if (std::abs(w) < 1e-8) w = 0.0;
      a(i, j) = w;
      a(j, i) = w;
    }
  }
  return a;
}

Matrix denormalize_adjacency(const Matrix& a_spec, const Matrix& reference) {
  require_same_shape(a_spec, reference, "denormalize_adjacency");
  const std::size_t n = reference.rows();
  std::vector<double> root(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += std::abs(reference(i, j));
    root[i] = std::sqrt(deg);
  }
  Matrix out = a_spec;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) *= root[i] * root[j];
  return out;
}

double mean_abs_weight(const Matrix& a, const std::vector<Edge>& support) {
  double sum = 0.0;
  std::size_t count = 0;
  if (support.empty()) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = i + 1; j < a.cols(); ++j)
        if (a(i, j) != 0.0) {
          sum += std::abs(a(i, j));
          ++count;
        }
  } else {
    for (const Edge& e : support) sum += std::abs(a(e.i, e.j));
    count = support.size();
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

double compensate_weight_change(const Matrix& a_spec, double baseline_mean, double p_edge,
                                const std::vector<Edge>& support) {
  if (!(baseline_mean > 0.0)) throw std::invalid_argument("compensate_weight_change: baseline mean must be positive");
  const double ratio = mean_abs_weight(a_spec, support) / baseline_mean;
  return std::clamp(p_edge * ratio, 0.0, 0.95);
}

std::vector<double> predict_eigen_shift(const Matrix& basis, const std::vector<double>& lambda,
                                        const Matrix& d_a1, const Matrix& d_a2) {
  require_same_shape(d_a1, d_a2, "predict_eigen_shift");
  const std::size_t n = basis.rows();
  if (d_a1.rows() != n || d_a1.cols() != n) throw ShapeError("predict_eigen_shift: perturbation shape");
  if (lambda.size() != basis.cols()) throw ShapeError("predict_eigen_shift: λ length mismatch");
  const Matrix d = d_a1 - d_a2;
  std::vector<double> out(basis.cols(), 0.0);
  for (std::size_t i = 0; i < basis.cols(); ++i) {
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double um = basis(m, i);
      for (std::size_t k = 0; k < n; ++k) s += um * d(m, k) * (basis(k, i) - lambda[i] * um);
    }
    out[i] = s;
  }
  return out;
}

EigenDecomp generalized_eigenbasis(const Matrix& adjacency) {
  EigenDecomp ed = eigh(sym_normalize(adjacency, false));
  const std::size_t n = adjacency.rows();
  for (std::size_t m = 0; m < n; ++m) {
    double deg = 0.0;
    for (std::size_t k = 0; k < n; ++k) deg += std::abs(adjacency(m, k));
    const double s = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    for (std::size_t i = 0; i < n; ++i) ed.eigenvectors(m, i) *= s;
  }
  return ed;
}

}  // namespace gclab
