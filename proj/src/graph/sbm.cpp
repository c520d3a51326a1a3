#include <cmath>

#include "gclab/graph.hpp"
#include "gclab/rng.hpp"

namespace gclab {

Graph sbm_generate(const SbmParams& params) {
  if (params.block_sizes.empty()) throw std::invalid_argument("sbm_generate: no blocks");
  auto valid_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!valid_prob(params.p_in) || !valid_prob(params.p_out)) {
    throw std::invalid_argument("sbm_generate: probabilities must lie in [0, 1]");
  }
  for (auto b : params.block_sizes)
    if (b == 0) throw std::invalid_argument("sbm_generate: empty block");

  std::vector<int> labels;
  for (std::size_t b = 0; b < params.block_sizes.size(); ++b)
    labels.insert(labels.end(), params.block_sizes[b], static_cast<int>(b));
  const std::size_t n = labels.size();

  const Rng root(params.seed);
  Rng edge_rng = root.fork(1);
  Rng mean_rng = root.fork(2);
  Rng noise_rng = root.fork(3);

  Matrix adj(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = labels[i] == labels[j] ? params.p_in : params.p_out;
      if (edge_rng.bernoulli(p)) adj(i, j) = adj(j, i) = 1.0;
    }
  }

  const std::size_t f = params.feat_dim;
  Matrix means(params.block_sizes.size(), f);
  for (std::size_t b = 0; b < means.rows(); ++b) {
    double norm = 0.0;
    for (double& v : means.row(b)) {
      v = mean_rng.gaussian();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : means.row(b)) v = norm > 0.0 ? params.feat_shift * v / norm : 0.0;
  }

  Matrix x(n, f);
  for (std::size_t i = 0; i < n; ++i) {
    const auto mean = means.row(static_cast<std::size_t>(labels[i]));
    for (std::size_t p = 0; p < f; ++p) x(i, p) = noise_rng.gaussian() + mean[p];
  }
  return Graph(std::move(adj), std::move(x), std::move(labels));
}

}  // namespace gclab
