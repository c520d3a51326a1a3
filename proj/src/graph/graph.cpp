#include "gclab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gclab/rng.hpp"

namespace gclab {

std::vector<Edge> upper_edges(const Matrix& adjacency) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < adjacency.rows(); ++i)
    for (std::size_t j = i + 1; j < adjacency.cols(); ++j)
      if (adjacency(i, j) != 0.0) edges.push_back({i, j, adjacency(i, j)});
  return edges;
}

Graph::Graph(Matrix adjacency, Matrix features, std::vector<int> labels)
    : adjacency_(std::move(adjacency)), features_(std::move(features)), labels_(std::move(labels)) {
  const std::size_t n = adjacency_.rows();
  if (adjacency_.cols() != n) throw DatasetError("adjacency is not square: " + adjacency_.shape_string());
  if (features_.rows() != n) {
    throw DatasetError("feature rows (" + std::to_string(features_.rows()) +
                       ") do not match node count " + std::to_string(n));
  }
  if (labels_.size() != n) {
    throw DatasetError("label count (" + std::to_string(labels_.size()) +
                       ") does not match node count " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency_(i, i) != 0.0) throw DatasetError("self-loop at node " + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (adjacency_(i, j) != adjacency_(j, i)) {
        throw DatasetError("adjacency not symmetric at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
      }
      if (!std::isfinite(adjacency_(i, j))) throw DatasetError("non-finite edge weight");
    }
  }
  if (!all_finite(features_)) throw DatasetError("non-finite feature value");

  int max_label = -1;
  for (int y : labels_) {
    if (y < 0) throw DatasetError("negative label " + std::to_string(y));
    max_label = std::max(max_label, y);
  }
  num_classes_ = max_label + 1;
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes_), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw DatasetError("label set is not contiguous from 0: class " + std::to_string(c) +
                         " has no nodes");
    }
  }
  edges_ = upper_edges(adjacency_);
}

std::vector<std::size_t> Graph::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes_), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

Graph Graph::with_adjacency(Matrix adjacency) const {
  return Graph(std::move(adjacency), features_, labels_);
}

Split make_split(const Graph& g, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::invalid_argument("make_split: train_frac must lie in (0, 1)");
  }
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(seed);
  rng.shuffle(ids);
  const auto n_train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n)));

  Split split;
  split.seed = seed;
  split.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());

  if (split.train_ids.empty()) {
    split.warnings.push_back("train split is empty");
  } else {
    std::vector<bool> seen(static_cast<std::size_t>(g.num_classes()), false);
    for (auto id : split.train_ids) seen[static_cast<std::size_t>(g.labels()[id])] = true;
    for (std::size_t c = 0; c < seen.size(); ++c)
      if (!seen[c]) split.warnings.push_back("train split has no node of class " + std::to_string(c));
  }
  return split;
}

Matrix sym_normalize(const Matrix& a, bool add_self_loops) {
  if (a.rows() != a.cols()) throw ShapeError("sym_normalize: adjacency is " + a.shape_string());
  const std::size_t n = a.rows();
  const double loop = add_self_loops ? 1.0 : 0.0;
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = loop;
    for (double w : a.row(i)) deg += std::abs(w);
    inv_sqrt[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = a(i, j) + (i == j ? loop : 0.0);
      if (w != 0.0) out(i, j) = inv_sqrt[i] * w * inv_sqrt[j];
    }
  }
  return out;
}

const char* to_string(ViewSource s) {
  switch (s) {
    case ViewSource::random: return "random";
    case ViewSource::info: return "info";
    case ViewSource::spectral_random: return "spectral+random";
    case ViewSource::spectral_info: return "spectral+info";
  }
  return "?";
}

EditCount edit_count(const Graph& original, const ViewPlan& view) {
  if (view.edge_keep.size() != original.edges().size() ||
      view.feat_keep.size() != original.num_features()) {
    throw ShapeError("edit_count: view plan does not match graph");
  }
  EditCount c;
  c.edges_removed = static_cast<std::size_t>(std::count(view.edge_keep.begin(), view.edge_keep.end(), false));
  c.features_masked = static_cast<std::size_t>(std::count(view.feat_keep.begin(), view.feat_keep.end(), false));
  return c;
}

ViewData apply_plan(const Graph& base, const ViewPlan& plan) {
  const auto& edges = base.edges();
  if (plan.edge_keep.size() != edges.size() || plan.feat_keep.size() != base.num_features()) {
    throw ShapeError("apply_plan: view plan does not match graph");
  }
  const std::size_t n = base.num_nodes();
  ViewData v{Matrix(n, n), base.features()};
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!plan.edge_keep[e]) continue;
    v.adjacency(edges[e].i, edges[e].j) = edges[e].weight;
    v.adjacency(edges[e].j, edges[e].i) = edges[e].weight;
  }
  for (std::size_t p = 0; p < plan.feat_keep.size(); ++p) {
    if (plan.feat_keep[p]) continue;
    for (std::size_t r = 0; r < n; ++r) v.features(r, p) = 0.0;
  }
  return v;
}

}  // namespace gclab
