#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gclab/augment.hpp"

namespace gclab {

ViewPlan random_masks(const Graph& g, double p_edge, double p_feat, Rng& rng) {
  if (!(p_edge >= 0.0 && p_edge < 1.0) || !(p_feat >= 0.0 && p_feat < 1.0)) {
    throw std::invalid_argument("random_masks: drop probabilities must lie in [0, 1)");
  }
  ViewPlan plan;
  plan.source = ViewSource::random;
  plan.edge_keep.resize(g.edges().size());
  for (std::size_t e = 0; e < plan.edge_keep.size(); ++e) plan.edge_keep[e] = !rng.bernoulli(p_edge);
  plan.feat_keep.resize(g.num_features());
  for (std::size_t f = 0; f < plan.feat_keep.size(); ++f) plan.feat_keep[f] = !rng.bernoulli(p_feat);
  return plan;
}

RetainDeleteSets retain_delete_sets(const std::vector<double>& scores, double xi, Rng& rng) {
  if (!(xi >= 0.0 && xi <= 1.0 / 3.0 + 1e-12)) throw std::invalid_argument("xi must lie in [0, 1/3]");
  const std::size_t count = scores.size();
  RetainDeleteSets out{std::vector<bool>(count, false), std::vector<bool>(count, true)};
  if (count == 0) return out;

  // The small offset keeps ⌈0.1·100⌉ at 10 despite rounding in the product.
  const auto top = std::min(count, static_cast<std::size_t>(std::ceil(xi * static_cast<double>(count) - 1e-9)));
  const std::size_t bottom = std::min(2 * top, count - top);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  for (std::size_t r = 0; r < top; ++r) out.retain[order[r]] = rng.bernoulli(0.5);
  for (std::size_t r = count - bottom; r < count; ++r) out.gate[order[r]] = !rng.bernoulli(0.5);
  return out;
}

RetainDelete build_retain_delete(const std::vector<double>& edge_scores, const std::vector<double>& feat_scores,
                                 double xi, Rng& rng) {
  RetainDeleteSets e = retain_delete_sets(edge_scores, xi, rng);
  RetainDeleteSets f = retain_delete_sets(feat_scores, xi, rng);
  return {std::move(e.retain), std::move(e.gate), std::move(f.retain), std::move(f.gate)};
}

ViewPlan combine_masks(const ViewPlan& random_plan, const RetainDelete& rd) {
  if (rd.s_edge.size() != random_plan.edge_keep.size() || rd.d_edge.size() != random_plan.edge_keep.size() ||
      rd.s_feat.size() != random_plan.feat_keep.size() || rd.d_feat.size() != random_plan.feat_keep.size()) {
    throw ShapeError("combine_masks: retain/delete sizes do not match the plan");
  }
  ViewPlan out = random_plan;
  for (std::size_t e = 0; e < out.edge_keep.size(); ++e)
    out.edge_keep[e] = (random_plan.edge_keep[e] || rd.s_edge[e]) && rd.d_edge[e];
  for (std::size_t f = 0; f < out.feat_keep.size(); ++f)
    out.feat_keep[f] = (random_plan.feat_keep[f] || rd.s_feat[f]) && rd.d_feat[f];
  out.source = random_plan.source == ViewSource::spectral_random ? ViewSource::spectral_info : ViewSource::info;
  return out;
}

ViewData apply_masks(const Graph& g, const ViewPlan& random_plan, const RetainDelete& rd) {
  return apply_plan(g, combine_masks(random_plan, rd));
}

}  // namespace gclab
