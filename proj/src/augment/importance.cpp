#include <algorithm>

#include "gclab/augment.hpp"

namespace gclab {

std::vector<double> edge_scores(const std::vector<double>& alpha_v, const std::vector<Edge>& edges) {
  std::vector<double> out;
  out.reserve(edges.size());
  for (const Edge& e : edges) out.push_back(0.5 * (alpha_v.at(e.i) + alpha_v.at(e.j)));
  return out;
}

ImportanceScores compute_importance(const Graph& g, const EncoderParams& params, const NceConfig& cfg,
                                    const ViewRates& rates, Rng& rng) {
  const ViewPlan p1 = random_masks(g, rates.p_edge1, rates.p_feat1, rng);
  const ViewPlan p2 = random_masks(g, rates.p_edge2, rates.p_feat2, rng);
  TwoViewInput views{sym_normalize(apply_plan(g, p1).adjacency, true),
                     sym_normalize(apply_plan(g, p2).adjacency, true), p1.feat_keep, p2.feat_keep};
  TwoViewResult r = two_view_nce(views, g.features(), params, cfg);

  ImportanceScores s;
  s.alpha_vp = std::move(r.input_grad);
  const std::size_t n = s.alpha_vp.rows(), f = s.alpha_vp.cols();
  s.alpha_p.assign(f, 0.0);
  s.alpha_v.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t p = 0; p < f; ++p) {
      s.alpha_p[p] += s.alpha_vp(v, p);
      s.alpha_v[v] += s.alpha_vp(v, p);
    }
  }
  for (double& a : s.alpha_p) a = n ? std::max(0.0, a / static_cast<double>(n)) : 0.0;
  for (double& a : s.alpha_v) a = f ? std::max(0.0, a / static_cast<double>(f)) : 0.0;
  s.alpha_e = edge_scores(s.alpha_v, g.edges());
  return s;
}

}  // namespace gclab
