#include "gclab/encoder.hpp"

#include <cmath>

namespace gclab {

EncoderParams init_encoder(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                           std::size_t layers, Rng& rng) {
  if (layers == 0) throw std::invalid_argument("init_encoder: need at least one layer");
  EncoderParams p;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : hidden_dim;
    const std::size_t out = l + 1 == layers ? output_dim : hidden_dim;
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Matrix w(in, out);
    for (double& v : w.data()) v = (2.0 * rng.uniform() - 1.0) * bound;
    p.weights.push_back(std::move(w));
  }
  return p;
}

ForwardResult gcn_forward(const Matrix& a_norm, const Matrix& x, const EncoderParams& params) {
  if (params.weights.empty()) throw std::invalid_argument("gcn_forward: encoder has no layers");
  if (a_norm.rows() != a_norm.cols() || a_norm.rows() != x.rows()) {
    throw ShapeError("gcn_forward: Â " + a_norm.shape_string() + " vs X " + x.shape_string());
  }
  ForwardCache cache;
  cache.a_norm = a_norm;
  cache.input = x;
  const std::size_t layers = params.weights.size();
  const Matrix* h = &cache.input;
  for (std::size_t l = 0; l < layers; ++l) {
    // Â (H W): the product with W first keeps the N×N multiply at the narrower width.
    Matrix z = matmul(a_norm, matmul(*h, params.weights[l]));
    if (!all_finite(z)) {
      throw NonFiniteError("gcn_forward: non-finite values in layer " + std::to_string(l + 1), l + 1);
    }
    cache.pre_activations.push_back(z);
    cache.post_activations.push_back(l + 1 < layers ? relu(z) : std::move(z));
    h = &cache.post_activations.back();
  }
  cache.output = row_unit_normalize(cache.post_activations.back());
  Matrix out = cache.output.value;
  return {std::move(out), std::move(cache)};
}

EncoderGrads gcn_backward(const ForwardCache& cache, const EncoderParams& params, const Matrix& d_out) {
  const std::size_t layers = params.weights.size();
  if (cache.pre_activations.size() != layers) throw ShapeError("gcn_backward: cache/params layer mismatch");
  require_same_shape(d_out, cache.output.value, "gcn_backward");

  // Through the row normalisation: dz = (g − y (yᵀg)) / ‖z‖.
  const Matrix& y = cache.output.value;
  Matrix dz(d_out.rows(), d_out.cols());
  for (std::size_t i = 0; i < y.rows(); ++i) {
    if (cache.output.zero_rows[i]) continue;
    const double proj = dot(y.row(i), d_out.row(i));
    const double inv = 1.0 / cache.output.norms[i];
    for (std::size_t k = 0; k < y.cols(); ++k) dz(i, k) = (d_out(i, k) - y(i, k) * proj) * inv;
  }

  EncoderGrads g;
  g.weights.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    if (l + 1 < layers) {
      const Matrix& z = cache.pre_activations[l];
      auto zd = z.data();
      auto dd = dz.data();
      for (std::size_t i = 0; i < dd.size(); ++i)
        if (!(zd[i] > 0.0)) dd[i] = 0.0;
    }
    const Matrix& h_prev = l == 0 ? cache.input : cache.post_activations[l - 1];
    const Matrix back = matmul_tn(cache.a_norm, dz);  // Âᵀ dZ
    g.weights[l] = matmul_tn(h_prev, back);
    dz = matmul_nt(back, params.weights[l]);
  }
  g.input = std::move(dz);
  return g;
}

std::vector<std::uint8_t> activation_pattern(const ForwardCache& cache) {
  std::vector<std::uint8_t> pattern;
  for (std::size_t l = 0; l + 1 < cache.pre_activations.size(); ++l)
    for (double v : cache.pre_activations[l].data()) pattern.push_back(v > 0.0 ? 1 : 0);
  return pattern;
}

}  // namespace gclab
