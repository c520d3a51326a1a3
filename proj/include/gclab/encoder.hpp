#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gclab/matrix.hpp"
#include "gclab/rng.hpp"

namespace gclab {

class Graph;

class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, std::size_t layer)
      : std::runtime_error(what), layer_(layer) {}
  std::size_t layer() const { return layer_; }

 private:
  std::size_t layer_;
};

// L-layer GCN: H_l = ReLU(Â H_{l-1} W_l) for l < L, H_L = Â H_{L-1} W_L,
// output = row-unit-normalised H_L. No bias, no projection head.
struct EncoderParams {
  std::vector<Matrix> weights;  // F×h, h×h, ..., h×d

  std::size_t num_layers() const { return weights.size(); }
  std::size_t input_dim() const { return weights.front().rows(); }
  std::size_t output_dim() const { return weights.back().cols(); }
};

// Weights ~ U(-1/√fan_in, 1/√fan_in), drawn layer by layer in row-major order.
EncoderParams init_encoder(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                           std::size_t layers, Rng& rng);

struct ForwardCache {
  Matrix a_norm;
  Matrix input;
  std::vector<Matrix> pre_activations;   // Z_l = Â H_{l-1} W_l
  std::vector<Matrix> post_activations;  // H_l (H_L == Z_L)
  RowNormalized output;                  // normalised H_L with norms and zero flags
};

struct ForwardResult {
  Matrix embeddings;  // N×d, unit rows except flagged zero rows
  ForwardCache cache;
};

ForwardResult gcn_forward(const Matrix& a_norm, const Matrix& x, const EncoderParams& params);

struct EncoderGrads {
  std::vector<Matrix> weights;
  Matrix input;  // dL/dX
};

EncoderGrads gcn_backward(const ForwardCache& cache, const EncoderParams& params, const Matrix& d_out);

// Sign pattern of every hidden pre-activation (1 where Z > 0); a change between
// two nearby inputs means a ReLU kink was crossed.
std::vector<std::uint8_t> activation_pattern(const ForwardCache& cache);

// Loss evaluated at (params, features), with analytic gradients.
struct LossEval {
  double loss = 0.0;
  std::vector<Matrix> weight_grads;
  Matrix input_grad;
  std::vector<std::uint8_t> activation_pattern;
};
using LossFn = std::function<LossEval(const EncoderParams&, const Matrix& features)>;

struct GradCheckOptions {
  double step = 1e-3;
  int stencil = 4;  // 2: (f(+h) − f(−h))/2h; 4: adds the ±2h probes
  std::size_t max_coords_per_tensor = 0;  // 0 checks every coordinate
  std::uint64_t seed = 0;                 // coordinate sampling when capped
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t kinks_skipped = 0;
};

// Compares analytic gradients with central finite differences on every weight
// and input-feature coordinate (or a seeded sample of them). Relative error is
// |analytic − numeric| / max(1e-8, |numeric|). Coordinates whose probes see
// different ReLU activation patterns are skipped and counted.
GradCheckResult gradient_check(const Graph& g, const EncoderParams& params, const LossFn& loss_fn,
                               const GradCheckOptions& options = {});

}  // namespace gclab
