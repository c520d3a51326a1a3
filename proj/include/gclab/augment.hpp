#pragma once

#include <optional>
#include <vector>

#include "gclab/contrastive.hpp"
#include "gclab/eigh.hpp"
#include "gclab/encoder.hpp"
#include "gclab/graph.hpp"
#include "gclab/rng.hpp"

namespace gclab {

// Per-view drop probabilities.
struct ViewRates {
  double p_edge1 = 0.2;
  double p_feat1 = 0.3;
  double p_edge2 = 0.4;
  double p_feat2 = 0.4;
};

// Each edge of g.edges() is dropped w.p. p_edge, then each feature dimension
// w.p. p_feat, all draws taken from rng in that order.
ViewPlan random_masks(const Graph& g, double p_edge, double p_feat, Rng& rng);

struct ImportanceScores {
  Matrix alpha_vp;               // dL/dX, N×F
  std::vector<double> alpha_p;   // ReLU(mean over nodes), length F
  std::vector<double> alpha_v;   // ReLU(mean over dimensions), length N
  std::vector<double> alpha_e;   // parallel to g.edges()
};

// α_e for an arbitrary edge list: mean of the endpoint node scores.
std::vector<double> edge_scores(const std::vector<double>& alpha_v, const std::vector<Edge>& edges);

// One InfoNCE evaluation on a fresh random view pair drawn from rng (view 1
// then view 2), differentiated with respect to the original features.
ImportanceScores compute_importance(const Graph& g, const EncoderParams& params, const NceConfig& cfg,
                                    const ViewRates& rates, Rng& rng);

// S: forced retention (true = retain). D: deletion gate (false = delete).
struct RetainDelete {
  std::vector<bool> s_edge, d_edge;
  std::vector<bool> s_feat, d_feat;
};

struct RetainDeleteSets {
  std::vector<bool> retain;
  std::vector<bool> gate;
};

// Items are ranked by score descending, ties by lower index first. The top
// ⌈ξ·count⌉ are retained w.p. 1/2 each; the bottom min(2·top, count − top)
// are deleted w.p. 1/2 each. Requires 0 ≤ ξ ≤ 1/3.
RetainDeleteSets retain_delete_sets(const std::vector<double>& scores, double xi, Rng& rng);

// Edges first, then features, all from the same rng.
RetainDelete build_retain_delete(const std::vector<double>& edge_scores, const std::vector<double>& feat_scores,
                                 double xi, Rng& rng);

// keep = (M ∨ S) ∧ D elementwise.
ViewPlan combine_masks(const ViewPlan& random_plan, const RetainDelete& rd);
ViewData apply_masks(const Graph& g, const ViewPlan& random_plan, const RetainDelete& rd);

struct SpectralState {
  Matrix basis;                 // U, eigenvectors of the base normalised adjacency
  std::vector<double> lambda;   // current eigenvalues
  std::optional<std::vector<double>> theta_prev;
  std::vector<int> last_direction;
  double alpha = 0.01;
  double epsilon = 0.01;
  int period = 10;
  double mean_abs_weight_before = 0.0;  // mean |Â_ij| over base edges
  std::vector<Edge> support;            // base edges, for the compensation mean
};

// Eigendecomposition of D^{-1/2} A D^{-1/2} (no self loops).
SpectralState init_spectral(const Graph& g, double alpha, double epsilon, int period);

// θ_i = u_iᵀ M̂ u_i with M̂ = (H¹H²ᵀ + H²H¹ᵀ)/2.
std::vector<double> estimate_thetas(const Matrix& h1, const Matrix& h2, const Matrix& basis);

// λ_i += direction_i·λ_i·α where direction is −1 if Δθ_i ≥ ε, +1 if Δθ_i ≤ −ε,
// else 0. The first call only records θ.
void update_lambdas(SpectralState& state, const std::vector<double>& theta_cur);

// U diag(λ) Uᵀ, symmetrised, zero diagonal, |w| < 1e-8 truncated.
Matrix rebuild_adjacency(const SpectralState& state);

// D^{1/2} A D^{1/2} with D the |weight| degrees of `reference`; maps a
// rebuilt normalised adjacency back to the weight scale of the raw graph.
Matrix denormalize_adjacency(const Matrix& a_spec, const Matrix& reference);

double mean_abs_weight(const Matrix& a, const std::vector<Edge>& support);

// clamp(p_edge · mean|A_spec| / baseline_mean, 0, 0.95), where the mean runs
// over the support edges (all nonzeros when support is empty).
double compensate_weight_change(const Matrix& a_spec, double baseline_mean, double p_edge,
                                const std::vector<Edge>& support = {});

// First-order change-of-spectrum formula, evaluated term by term:
// Σ_{m,n} u_i[m] ΔÂ[m][n] (u_i[n] − λ_i u_i[m]) with ΔÂ = ΔA1 − ΔA2.
std::vector<double> predict_eigen_shift(const Matrix& basis, const std::vector<double>& lambda,
                                        const Matrix& d_a1, const Matrix& d_a2);

// Eigenpairs of A u = λ D u: λ from D^{-1/2} A D^{-1/2}, columns u = D^{-1/2} φ
// (D-orthonormal). Zero-degree nodes get zero rows.
EigenDecomp generalized_eigenbasis(const Matrix& adjacency);

}  // namespace gclab
