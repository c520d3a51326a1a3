#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gclab/matrix.hpp"

namespace gclab {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Undirected edge with i < j.
struct Edge {
  std::size_t i;
  std::size_t j;
  double weight;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable attributed graph. The adjacency is symmetric with a zero diagonal;
// weights may be any finite value (negative weights appear after spectral
// reconstruction). Labels are contiguous class ids in [0, K).
class Graph {
 public:
  // Validates every invariant; throws DatasetError on violation.
  Graph(Matrix adjacency, Matrix features, std::vector<int> labels);

  std::size_t num_nodes() const { return adjacency_.rows(); }
  std::size_t num_features() const { return features_.cols(); }
  int num_classes() const { return num_classes_; }

  const Matrix& adjacency() const { return adjacency_; }
  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  // Nonzero upper-triangle entries in row-major order.
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<std::size_t> class_counts() const;

  // Same features and labels over a different adjacency.
  Graph with_adjacency(Matrix adjacency) const;

 private:
  Matrix adjacency_;
  Matrix features_;
  std::vector<int> labels_;
  int num_classes_ = 0;
  std::vector<Edge> edges_;
};

std::vector<Edge> upper_edges(const Matrix& adjacency);

struct Split {
  std::vector<std::size_t> train_ids;  // ascending
  std::vector<std::size_t> test_ids;   // ascending
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// floor(train_frac·N) nodes drawn uniformly without replacement.
Split make_split(const Graph& g, double train_frac, std::uint64_t seed);

// D̃^{-1/2}(A + I)D̃^{-1/2} with self loops, else D^{-1/2} A D^{-1/2}.
// Degrees are sums of |weight| so signed weights never produce a
// non-positive degree; for nonnegative input this is the usual GCN operator.
// Zero-degree rows stay zero (apart from the self-loop term).
Matrix sym_normalize(const Matrix& adjacency, bool add_self_loops);

struct SbmParams {
  std::vector<std::size_t> block_sizes;
  double p_in = 0.1;
  double p_out = 0.01;
  std::size_t feat_dim = 32;
  double feat_shift = 1.0;
  std::uint64_t seed = 0;
};

// Stochastic block model with Gaussian features. Pairs are visited in
// row-major upper-triangle order from one substream; block means are random
// unit directions scaled to feat_shift from a second; feature noise from a third.
Graph sbm_generate(const SbmParams& params);

// Directory format: edges.tsv ("i<TAB>j" or "i<TAB>j<TAB>w", 0-indexed,
// undirected, one line per edge), features.csv (N rows of F comma-separated
// reals), labels.txt (N integers, one per line). Blank lines and lines starting
// with '#' in edges.tsv are ignored. Any whitespace separates columns. A pair
// may appear once more in the mirrored direction with the same weight; other
// repeats are errors.
Graph load_dataset(const std::filesystem::path& dir);
// Writes the same format with shortest round-trip float formatting; weights
// are written only when some edge weight differs from 1.
void save_dataset(const Graph& g, const std::filesystem::path& dir);

enum class ViewSource { random, info, spectral_random, spectral_info };
const char* to_string(ViewSource s);

// Keep-masks for one augmented view of a base graph.
struct ViewPlan {
  std::vector<bool> edge_keep;  // parallel to base.edges()
  std::vector<bool> feat_keep;  // one per feature dimension
  ViewSource source = ViewSource::random;
};

struct EditCount {
  std::size_t edges_removed = 0;
  std::size_t features_masked = 0;
  friend bool operator==(const EditCount&, const EditCount&) = default;
};

EditCount edit_count(const Graph& original, const ViewPlan& view);

// Materialises the view: dropped edges are zeroed symmetrically and dropped
// feature dimensions are zeroed for every node.
struct ViewData {
  Matrix adjacency;
  Matrix features;
};
ViewData apply_plan(const Graph& base, const ViewPlan& plan);

}  // namespace gclab
