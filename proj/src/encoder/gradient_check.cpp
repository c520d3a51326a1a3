#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gclab/encoder.hpp"
#include "gclab/graph.hpp"

namespace gclab {

namespace {

std::vector<std::size_t> sample_coords(std::size_t count, std::size_t cap, Rng& rng) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  if (cap == 0 || cap >= count) return idx;
  rng.shuffle(idx);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

GradCheckResult gradient_check(const Graph& g, const EncoderParams& params, const LossFn& loss_fn,
                               const GradCheckOptions& options) {
  const Matrix& x = g.features();
  const LossEval base = loss_fn(params, x);
  Rng rng(options.seed);
  GradCheckResult result;
  const double h = options.step;

  // probe(t) evaluates the loss with the coordinate shifted by t.
  auto check = [&](double analytic, const std::function<LossEval(double)>& probe) {
    const LossEval plus = probe(h), minus = probe(-h);
    double numeric = (plus.loss - minus.loss) / (2.0 * h);
    bool kink = plus.activation_pattern != minus.activation_pattern;
    if (options.stencil == 4) {
      const LossEval plus2 = probe(2 * h), minus2 = probe(-2 * h);
      kink = kink || plus2.activation_pattern != plus.activation_pattern ||
             minus2.activation_pattern != minus.activation_pattern;
      numeric = (8.0 * (plus.loss - minus.loss) - (plus2.loss - minus2.loss)) / (12.0 * h);
    }
    if (kink) {
      ++result.kinks_skipped;
      return;
    }
    const double rel = std::abs(analytic - numeric) / std::max(1e-8, std::abs(numeric));
    result.max_rel_error = std::max(result.max_rel_error, rel);
    ++result.checked;
  };

  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (std::size_t k : sample_coords(params.weights[l].size(), options.max_coords_per_tensor, rng)) {
      EncoderParams shifted = params;
      const double orig = shifted.weights[l].data()[k];
      check(base.weight_grads[l].data()[k], [&](double t) {
        shifted.weights[l].data()[k] = orig + t;
        return loss_fn(shifted, x);
      });
    }
  }

  for (std::size_t k : sample_coords(x.size(), options.max_coords_per_tensor, rng)) {
    Matrix shifted = x;
    const double orig = shifted.data()[k];
    check(base.input_grad.data()[k], [&](double t) {
      shifted.data()[k] = orig + t;
      return loss_fn(params, shifted);
    });
  }
  return result;
}

}  // namespace gclab
