#pragma once

#include <string>

#include "gclab/encoder.hpp"
#include "gclab/matrix.hpp"

namespace gclab {

enum class NegativeMode { inter_only, inter_and_intra };

NegativeMode parse_negative_mode(const std::string& s);
const char* to_string(NegativeMode m);

struct NceConfig {
  double tau = 0.4;
  NegativeMode negative_mode = NegativeMode::inter_and_intra;
  bool include_positive_in_denominator = true;
};

// Negatives per anchor: N−1 (inter_only) or 2N−2 (inter_and_intra).
std::size_t negatives_per_anchor(std::size_t n, const NceConfig& cfg);

struct NceResult {
  double loss = 0.0;
  Matrix d_h1;
  Matrix d_h2;
  std::size_t negatives = 0;  // M
};

// Symmetric InfoNCE averaged over both anchor directions. For anchor i of
// view 1 the positive is h2_i and the negatives are the other rows of h2
// (plus the other rows of h1 under inter_and_intra); view 2 mirrors this.
// Every similarity is divided by tau.
//
// Rows must be unit-norm within 1e-6; exactly-zero rows (flagged by the
// encoder) are tolerated and simply contribute zero similarities.
NceResult info_nce(const Matrix& h1, const Matrix& h2, const NceConfig& cfg);

struct PairSimilarity {
  double mean_pos = 0.0;  // mean of h1_i·h2_i
  double mean_neg = 0.0;  // mean of h1_i·h2_j over i ≠ j
};
PairSimilarity pair_similarities(const Matrix& h1, const Matrix& h2);

// log M − loss. Can go negative when the loss exceeds log M (vacuous bound).
double mi_lower_bound(double loss, std::size_t negatives);

// Two augmented views sharing one feature matrix: view k is (Â_k, X ⊙ mask_k).
struct TwoViewInput {
  Matrix a_norm1;
  Matrix a_norm2;
  std::vector<bool> feat_keep1;
  std::vector<bool> feat_keep2;
};

struct TwoViewResult {
  NceResult nce;
  Matrix h1;
  Matrix h2;
  std::vector<Matrix> weight_grads;  // summed over both views
  Matrix input_grad;                 // dL/dX of the shared, unmasked features
  std::vector<std::uint8_t> activation_pattern;
};

TwoViewResult two_view_nce(const TwoViewInput& views, const Matrix& features, const EncoderParams& params,
                           const NceConfig& cfg);

}  // namespace gclab
