#pragma once

#include <string>
#include <vector>

#include "gclab/encoder.hpp"
#include "gclab/graph.hpp"
#include "gclab/matrix.hpp"
#include "gclab/probe.hpp"

namespace gclab {

// Expectations over classes use the empirical class prior p(y) = n_y / N, so
// node-averaged and class-averaged quantities agree.
struct ClassCenters {
  Matrix mu;                       // K×d
  std::vector<double> mu_global;   // Σ_y p(y) μ_y
  std::vector<std::size_t> counts;
  std::vector<double> priors;
};

// μ_y = ⅓·mean_y(h0) + ⅔·mean over the class-y rows of h1 and h2 together.
ClassCenters class_centers(const Matrix& h0, const Matrix& h1, const Matrix& h2, const std::vector<int>& labels,
                           int num_classes);

struct CenterDistances {
  double pcd = 0.0;
  double ncd = 0.0;
};
// ncd averages uniformly over the K−1 other classes.
CenterDistances center_distances(const Matrix& h0, const ClassCenters& centers, const std::vector<int>& labels);

// √(mean over nodes and both views of ‖h0_i − hv_i‖²).
double delta_aug_hat(const Matrix& h0, const Matrix& h1, const Matrix& h2);

struct ClassDivergences {
  double delta_y_plus = 0.0;
  double delta_y_minus = 0.0;
  std::vector<std::string> warnings;
};
// δ_y+² = Σ_y p(y)·mean over ordered pairs i≠j in y; δ_y−² = Σ_y p(y)/(K−1)
// Σ_{y⁻≠y} mean over (i∈y, j∈y⁻). Singleton classes are left out of δ_y+.
ClassDivergences class_divergences(const Matrix& h0, const std::vector<int>& labels, int num_classes);

// −mean_i log softmax(h0_iᵀ μ)_{y_i}.
double mean_ce(const Matrix& h0, const ClassCenters& centers, const std::vector<int>& labels);

struct BoundReport {
  double lhs_mean_ce = 0.0;
  double nce_loss = 0.0;
  double delta_aug = 0.0;
  double var_pos_given_y = 0.0;
  double var_orig_given_y = 0.0;
  double var_mu = 0.0;
  std::size_t m = 0;
  int k = 0;
  double rhs = 0.0;
  double margin = 0.0;      // lhs − rhs
  double slack_term = 0.0;  // M^{-1/2}
};

BoundReport bound_report(const Matrix& h0, const Matrix& h1, const Matrix& h2, const std::vector<int>& labels,
                         int num_classes, double nce_loss, std::size_t negatives);

struct AlignmentIdentity {
  double lhs = 0.0;  // mean ‖h1_i − h2_i‖²
  double rhs = 0.0;  // 2 − (2/N) tr(H¹ᵀH²)
};
AlignmentIdentity alignment_identity(const Matrix& h1, const Matrix& h2);

struct CenterBoundSlack {
  double slack_pos = 0.0;       // δ_y+ + δ_aug − pcd
  double slack_neg = 0.0;       // δ_y− + δ_aug − ncd
  double slack_pos_main = 0.0;  // δ_y+ + ⅔δ_aug − pcd
  double slack_neg_main = 0.0;  // δ_y− + ⅔δ_aug − ncd
};
CenterBoundSlack center_bound_check(double pcd, double ncd, double delta_y_plus, double delta_y_minus, double delta_aug);

// Mean over nodes of KL(p_clean ‖ p_view), where p is the probe's softmax on
// embeddings of the clean graph and of the view through the same frozen encoder.
double label_consistency_kl(const EncoderParams& model, const ProbeModel& probe, const Graph& g,
                            const ViewPlan& view);

// KL(p ‖ q) row by row, averaged.
double mean_row_kl(const Matrix& p, const Matrix& q);

}  // namespace gclab
