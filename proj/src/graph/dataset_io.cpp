#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "gclab/graph.hpp"

namespace gclab {

namespace fs = std::filesystem;

namespace {

struct SeenEdge {
  std::size_t line;
  std::size_t from;
  double weight;
  bool mirrored;
};

std::ifstream open_required(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("missing file: " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, const std::string& where) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw DatasetError(where + ": cannot parse '" + std::string(tok) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Graph load_dataset(const fs::path& dir) {
  const fs::path features_path = dir / "features.csv";
  const fs::path labels_path = dir / "labels.txt";
  const fs::path edges_path = dir / "edges.tsv";

  std::vector<double> values;
  std::size_t n = 0, f = 0;
  {
    auto in = open_required(features_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto row = trim(line);
      if (row.empty()) continue;
      std::size_t count = 0;
      std::size_t start = 0;
      const std::string where = features_path.filename().string() + " row " + std::to_string(lineno);
      while (true) {
        const std::size_t comma = row.find(',', start);
        auto tok = trim(row.substr(start, comma == std::string_view::npos ? row.npos : comma - start));
        values.push_back(parse_number<double>(tok, where));
        ++count;
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      if (n == 0) {
        f = count;
      } else if (count != f) {
        throw DatasetError(where + ": ragged row with " + std::to_string(count) +
                           " values, expected " + std::to_string(f));
      }
      ++n;
    }
  }

  std::vector<int> labels;
  {
    auto in = open_required(labels_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto tok = trim(line);
      if (tok.empty()) continue;
      labels.push_back(parse_number<int>(tok, "labels.txt row " + std::to_string(lineno)));
    }
  }
  if (labels.size() != n) {
    throw DatasetError("labels.txt has " + std::to_string(labels.size()) + " entries but features.csv has " +
                       std::to_string(n) + " rows");
  }

  Matrix adj(n, n);
  {
    auto in = open_required(edges_path);
    std::map<std::pair<std::size_t, std::size_t>, SeenEdge> first_seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto row = trim(line);
      if (row.empty() || row.front() == '#') continue;
      const std::string where = "edges.tsv row " + std::to_string(lineno);
      auto toks = split_ws(row);
      if (toks.size() != 2 && toks.size() != 3) {
        throw DatasetError(where + ": expected 2 or 3 columns, got " + std::to_string(toks.size()));
      }
      const auto u = parse_number<std::size_t>(toks[0], where);
      const auto v = parse_number<std::size_t>(toks[1], where);
      const double w = toks.size() == 3 ? parse_number<double>(toks[2], where) : 1.0;
      if (u >= n || v >= n) {
        throw DatasetError(where + ": endpoint out of range (" + std::to_string(u) + ", " +
                           std::to_string(v) + ") with " + std::to_string(n) + " nodes");
      }
      if (u == v) throw DatasetError(where + ": self-loop rejected at node " + std::to_string(u));
      if (w == 0.0) throw DatasetError(where + ": zero edge weight");
      const auto key = std::minmax(u, v);
      auto [it, inserted] = first_seen.emplace(key, SeenEdge{lineno, u, w, false});
      if (!inserted) {
        // Edge lists exported from directed tensors carry every edge twice;
        // one mirrored line with the same weight is accepted.
        SeenEdge& seen = it->second;
        if (seen.mirrored || seen.from == u || seen.weight != w) {
          throw DatasetError(where + ": duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) +
                             "), first seen on row " + std::to_string(seen.line));
        }
        seen.mirrored = true;
        continue;
      }
      adj(u, v) = adj(v, u) = w;
    }
  }

  return Graph(std::move(adj), Matrix(n, f, std::move(values)), std::move(labels));
}

void save_dataset(const Graph& g, const fs::path& dir) {
  if (g.num_features() == 0) throw DatasetError("save_dataset: graph has no features");
  fs::create_directories(dir);
  bool weighted = false;
  for (const auto& e : g.edges()) weighted = weighted || e.weight != 1.0;
  {
    std::ofstream out(dir / "edges.tsv");
    for (const auto& e : g.edges()) {
      out << e.i << '\t' << e.j;
      if (weighted) out << '\t' << format_double(e.weight);
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "features.csv");
    const auto& x = g.features();
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) {
        if (c) out << ',';
        out << format_double(x(r, c));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "labels.txt");
    for (int y : g.labels()) out << y << '\n';
  }
}

}  // namespace gclab
