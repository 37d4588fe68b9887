#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ddsm/common.hpp"
#include "ddsm/rng.hpp"

namespace ddsm {

/// One undirected edge in canonical form: u <= v, positive weight.
/// u == v only for explicitly requested self-loops.
struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

// =============================================================================
// Graph: immutable undirected weighted sparse graph.
//
// Stores the canonical edge list (sorted lexicographically by (u,v), u <= v)
// plus a CSR adjacency over both directions and the weighted degree vector
// d_i = sum_j w_ij. Isolated nodes are rejected at construction: every
// normalized operator divides by sqrt(d_i).
// =============================================================================
class Graph {
 public:
  static Graph build(const std::vector<std::tuple<int, int, double>>& edge_list,
                     int n, bool add_self_loops = false) {
    require(n > 0, "graph must have at least one node");
    std::map<std::pair<int, int>, double> canon;
    bool warned_directed = false;
    for (const auto& [a, b, w] : edge_list) {
      require(a >= 0 && a < n && b >= 0 && b < n,
              "edge endpoint out of range [0," + std::to_string(n) + "): (" +
                  std::to_string(a) + "," + std::to_string(b) + ")");
      require(w > 0.0, "edge weight must be positive on edge (" +
                           std::to_string(a) + "," + std::to_string(b) + ")");
      if (a == b) {
        require(add_self_loops,
                "self-loop on node " + std::to_string(a) +
                    " requires the self-loop flag");
        continue;  // explicit self-loops are regenerated uniformly below
      }
      auto key = std::minmax(a, b);
      auto it = canon.find(key);
      if (it == canon.end()) {
        canon.emplace(key, w);
      } else {
        require(std::abs(it->second - w) <= 1e-12 * std::max(1.0, std::abs(w)),
                "duplicate edge (" + std::to_string(key.first) + "," +
                    std::to_string(key.second) + ") with conflicting weights");
        if (!warned_directed) warned_directed = true;  // symmetrized silently
      }
    }
    Graph g;
    g.n_ = n;
    g.edges_.reserve(canon.size() + (add_self_loops ? n : 0));
    for (const auto& [key, w] : canon) g.edges_.push_back({key.first, key.second, w});
    if (add_self_loops)
      for (int i = 0; i < n; ++i) g.edges_.push_back({i, i, 1.0});
    std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    g.finalize();
    return g;
  }

  int n() const { return n_; }
  int m() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& degrees() const { return degrees_; }
  double degree(int i) const { return degrees_[static_cast<size_t>(i)]; }
  double min_degree() const {
    return *std::min_element(degrees_.begin(), degrees_.end());
  }
  double total_weight() const { return total_weight_; }  // sum of edge weights

  std::span<const int> neighbors(int i) const {
    return {indices_.data() + indptr_[static_cast<size_t>(i)],
            indices_.data() + indptr_[static_cast<size_t>(i) + 1]};
  }
  std::span<const double> neighbor_weights(int i) const {
    return {weights_.data() + indptr_[static_cast<size_t>(i)],
            weights_.data() + indptr_[static_cast<size_t>(i) + 1]};
  }

  bool unweighted() const { return unweighted_; }

  /// y = A_hat x with A_hat = D^{-1/2} A D^{-1/2}, without materializing A_hat.
  Vec norm_adjacency_matvec(const Vec& x) const {
    require(x.size() == n_, "matvec length mismatch: expected " +
                                std::to_string(n_) + ", got " +
                                std::to_string(x.size()));
    Vec y = Vec::Zero(n_);
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      auto nbr = neighbors(i);
      auto wts = neighbor_weights(i);
      for (size_t k = 0; k < nbr.size(); ++k)
        acc += wts[k] * x[nbr[k]] * inv_sqrt_deg_[static_cast<size_t>(nbr[k])];
      y[i] = acc * inv_sqrt_deg_[static_cast<size_t>(i)];
    }
    return y;
  }

  /// y = (I - A_hat) x.
  Vec norm_laplacian_matvec(const Vec& x) const {
    return x - norm_adjacency_matvec(x);
  }

  /// Column-wise norm_adjacency_matvec: A_hat * X.
  Mat norm_adjacency_mul(const Mat& X) const {
    require(X.rows() == n_, "matrix row count mismatch");
    Mat Y(n_, X.cols());
    for (int c = 0; c < X.cols(); ++c) Y.col(c) = norm_adjacency_matvec(X.col(c));
    return Y;
  }

  Mat dense_adjacency() const {
    Mat A = Mat::Zero(n_, n_);
    for (const Edge& e : edges_) {
      if (e.u == e.v) {
        A(e.u, e.u) = e.w;
      } else {
        A(e.u, e.v) = e.w;
        A(e.v, e.u) = e.w;
      }
    }
    return A;
  }

  Mat dense_norm_adjacency() const {
    Mat A = dense_adjacency();
    for (int i = 0; i < n_; ++i) {
      A.row(i) *= inv_sqrt_deg_[static_cast<size_t>(i)];
      A.col(i) *= inv_sqrt_deg_[static_cast<size_t>(i)];
    }
    return A;
  }

  Mat dense_norm_laplacian() const {
    return Mat::Identity(n_, n_) - dense_norm_adjacency();
  }

  /// Random-walk transition matrix P = D^{-1} A.
  Mat dense_transition() const {
    Mat P = dense_adjacency();
    for (int i = 0; i < n_; ++i) P.row(i) /= degrees_[static_cast<size_t>(i)];
    return P;
  }

  bool connected() const {
    std::vector<char> seen(static_cast<size_t>(n_), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : neighbors(u))
        if (!seen[static_cast<size_t>(v)]) {
          seen[static_cast<size_t>(v)] = 1;
          ++count;
          stack.push_back(v);
        }
    }
    return count == n_;
  }

  /// 2-coloring test; a self-loop makes the graph non-bipartite.
  bool bipartite() const {
    std::vector<int> color(static_cast<size_t>(n_), -1);
    for (int s = 0; s < n_; ++s) {
      if (color[static_cast<size_t>(s)] != -1) continue;
      color[static_cast<size_t>(s)] = 0;
      std::vector<int> stack{s};
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : neighbors(u)) {
          if (v == u) return false;
          if (color[static_cast<size_t>(v)] == -1) {
            color[static_cast<size_t>(v)] = 1 - color[static_cast<size_t>(u)];
            stack.push_back(v);
          } else if (color[static_cast<size_t>(v)] ==
                     color[static_cast<size_t>(u)]) {
            return false;
          }
        }
      }
    }
    return true;
  }

  /// Index of a canonical edge (u,v), u<=v, or -1.
  int edge_index(int u, int v) const {
    if (u > v) std::swap(u, v);
    auto it = std::lower_bound(
        edges_.begin(), edges_.end(), std::make_pair(u, v),
        [](const Edge& e, const std::pair<int, int>& key) {
          return std::tie(e.u, e.v) < std::tie(key.first, key.second);
        });
    if (it == edges_.end() || it->u != u || it->v != v) return -1;
    return static_cast<int>(it - edges_.begin());
  }

 private:
  void finalize() {
    degrees_.assign(static_cast<size_t>(n_), 0.0);
    std::vector<int> counts(static_cast<size_t>(n_), 0);
    unweighted_ = true;
    total_weight_ = 0.0;
    for (const Edge& e : edges_) {
      degrees_[static_cast<size_t>(e.u)] += e.w;
      if (e.u != e.v) degrees_[static_cast<size_t>(e.v)] += e.w;
      counts[static_cast<size_t>(e.u)]++;
      if (e.u != e.v) counts[static_cast<size_t>(e.v)]++;
      if (e.w != 1.0) unweighted_ = false;
      total_weight_ += e.w;
    }
    for (int i = 0; i < n_; ++i)
      require(degrees_[static_cast<size_t>(i)] > 0.0,
              "isolated node " + std::to_string(i) +
                  " (pass add_self_loops to patch)");
    indptr_.assign(static_cast<size_t>(n_) + 1, 0);
    for (int i = 0; i < n_; ++i)
      indptr_[static_cast<size_t>(i) + 1] =
          indptr_[static_cast<size_t>(i)] + counts[static_cast<size_t>(i)];
    indices_.resize(indptr_.back());
    weights_.resize(indptr_.back());
    std::vector<int> cursor(indptr_.begin(), indptr_.end() - 1);
    for (const Edge& e : edges_) {
      indices_[static_cast<size_t>(cursor[static_cast<size_t>(e.u)])] = e.v;
      weights_[static_cast<size_t>(cursor[static_cast<size_t>(e.u)]++)] = e.w;
      if (e.u != e.v) {
        indices_[static_cast<size_t>(cursor[static_cast<size_t>(e.v)])] = e.u;
        weights_[static_cast<size_t>(cursor[static_cast<size_t>(e.v)]++)] = e.w;
      }
    }
    inv_sqrt_deg_.resize(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i)
      inv_sqrt_deg_[static_cast<size_t>(i)] =
          1.0 / std::sqrt(degrees_[static_cast<size_t>(i)]);
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> indptr_, indices_;
  std::vector<double> weights_;
  std::vector<double> degrees_, inv_sqrt_deg_;
  double total_weight_ = 0.0;
  bool unweighted_ = true;
};

inline Graph build_graph(const std::vector<std::tuple<int, int, double>>& edges,
                         int n, bool add_self_loops = false) {
  return Graph::build(edges, n, add_self_loops);
}

struct LabeledGraph {
  Graph graph;
  std::vector<int> labels;
  int num_classes = 0;

  LabeledGraph() = default;
  LabeledGraph(Graph g, std::vector<int> y) : graph(std::move(g)), labels(std::move(y)) {
    require(static_cast<int>(labels.size()) == graph.n(),
            "labels length must equal node count");
    for (int c : labels) {
      require(c >= 0, "negative class index");
      num_classes = std::max(num_classes, c + 1);
    }
  }

  /// Indicator matrix Y with Y(i, y_i) = 1.
  Mat one_hot() const {
    Mat Y = Mat::Zero(graph.n(), num_classes);
    for (int i = 0; i < graph.n(); ++i) Y(i, labels[static_cast<size_t>(i)]) = 1.0;
    return Y;
  }
};

// =============================================================================
// Synthetic graphs
// =============================================================================

/// Stochastic block model spec. Homophilic when p_in >= p_out.
struct SbmSpec {
  int n = 0;
  int classes = 2;
  double p_in = 0.5;
  double p_out = 0.05;
  int feature_dim = 8;
  double feature_sep = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    require(n > 0 && classes > 1, "sbm: need n > 0 and classes > 1");
    require(n % classes == 0 && n / classes >= 2,
            "sbm: n must split into equal blocks of size >= 2");
    require(p_in >= 0 && p_in <= 1 && p_out >= 0 && p_out <= 1,
            "sbm: probabilities must lie in [0,1]");
    require(feature_dim > 0, "sbm: feature_dim must be positive");
  }
};

/// Deterministic SBM draw: edge (i,j) uses the counter stream keyed on
/// (seed, i, j, attempt), so resampling one node's row never disturbs others.
inline std::pair<LabeledGraph, Mat> generate_sbm(const SbmSpec& spec) {
  spec.validate();
  const int block = spec.n / spec.classes;
  std::vector<int> labels(static_cast<size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) labels[static_cast<size_t>(i)] = i / block;

  auto edge_coin = [&](int i, int j, int attempt) {
    Rng r(spec.seed, (static_cast<std::uint64_t>(i) << 34) ^
                         (static_cast<std::uint64_t>(j) << 8) ^
                         static_cast<std::uint64_t>(attempt));
    double p = labels[static_cast<size_t>(i)] == labels[static_cast<size_t>(j)]
                   ? spec.p_in
                   : spec.p_out;
    return r.uniform() < p;
  };

  std::vector<int> attempt(static_cast<size_t>(spec.n), 0);
  std::vector<std::tuple<int, int, double>> edges;
  for (int retry = 0;; ++retry) {
    edges.clear();
    std::vector<int> deg(static_cast<size_t>(spec.n), 0);
    for (int i = 0; i < spec.n; ++i)
      for (int j = i + 1; j < spec.n; ++j)
        if (edge_coin(i, j, std::max(attempt[static_cast<size_t>(i)],
                                     attempt[static_cast<size_t>(j)]))) {
          edges.emplace_back(i, j, 1.0);
          deg[static_cast<size_t>(i)]++;
          deg[static_cast<size_t>(j)]++;
        }
    bool ok = true;
    for (int i = 0; i < spec.n; ++i)
      if (deg[static_cast<size_t>(i)] == 0) {
        require(retry < 100, "sbm: node " + std::to_string(i) +
                                 " isolated after 100 resampling attempts");
        attempt[static_cast<size_t>(i)]++;
        ok = false;
      }
    if (ok) break;
  }

  Mat X(spec.n, spec.feature_dim);
  Rng fr(spec.seed, 0xfea7u);
  std::vector<Vec> means;
  for (int c = 0; c < spec.classes; ++c) {
    Vec mu = Vec::Zero(spec.feature_dim);
    mu[c % spec.feature_dim] = spec.feature_sep;
    means.push_back(mu);
  }
  for (int i = 0; i < spec.n; ++i)
    for (int k = 0; k < spec.feature_dim; ++k)
      X(i, k) = means[static_cast<size_t>(labels[static_cast<size_t>(i)])][k] +
                fr.normal();

  return {LabeledGraph(Graph::build(edges, spec.n), std::move(labels)), X};
}

/// Random connected unweighted graph: uniform-attachment spanning tree plus
/// `extra` random chords. The workhorse corpus for the property suites.
inline Graph random_connected_graph(int n, int extra, std::uint64_t seed,
                                    bool force_non_bipartite = false) {
  Rng r(seed);
  std::map<std::pair<int, int>, double> es;
  for (int v = 1; v < n; ++v) {
    int u = static_cast<int>(r.uniform_int(static_cast<std::uint64_t>(v)));
    es[{u, v}] = 1.0;
  }
  for (int k = 0; k < extra; ++k) {
    int u = static_cast<int>(r.uniform_int(static_cast<std::uint64_t>(n)));
    int v = static_cast<int>(r.uniform_int(static_cast<std::uint64_t>(n)));
    if (u != v) es[std::minmax(u, v)] = 1.0;
  }
  auto to_graph = [&] {
    std::vector<std::tuple<int, int, double>> edges;
    for (const auto& [key, w] : es) edges.emplace_back(key.first, key.second, w);
    return Graph::build(edges, n);
  };
  Graph g = to_graph();
  while (force_non_bipartite && g.bipartite()) {
    // close a random odd cycle by linking two same-color tree nodes
    int u = static_cast<int>(r.uniform_int(static_cast<std::uint64_t>(n)));
    int v = static_cast<int>(r.uniform_int(static_cast<std::uint64_t>(n)));
    if (u == v) continue;
    es[std::minmax(u, v)] = 1.0;
    g = to_graph();
  }
  return g;
}

// =============================================================================
// Edge-list file format: one edge per line `u<TAB>v[<TAB>w]`, '#' comments,
// 0-based IDs; node count = max ID + 1 unless given.
// =============================================================================

inline Graph load_edge_list(std::istream& in, std::optional<int> nodes = {},
                            bool add_self_loops = false) {
  std::vector<std::tuple<int, int, double>> edges;
  int max_id = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u, v;
    double w = 1.0;
    if (!(ls >> u)) continue;  // blank
    require(static_cast<bool>(ls >> v),
            "edge list line " + std::to_string(lineno) + ": missing endpoint");
    ls >> w;
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v), w);
    max_id = std::max({max_id, static_cast<int>(u), static_cast<int>(v)});
  }
  int n = nodes.value_or(max_id + 1);
  require(n > 0, "edge list: empty input and no node count given");
  return Graph::build(edges, n, add_self_loops);
}

inline Graph load_edge_list_file(const std::string& path,
                                 std::optional<int> nodes = {},
                                 bool add_self_loops = false) {
  std::ifstream in(path);
  require(in.good(), "cannot open edge list: " + path);
  return load_edge_list(in, nodes, add_self_loops);
}

inline void save_edge_list(std::ostream& out, const Graph& g) {
  for (const Edge& e : g.edges())
    out << e.u << '\t' << e.v << '\t' << format_double(e.w) << '\n';
}

inline void save_edge_list_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  require(out.good(), "cannot write edge list: " + path);
  save_edge_list(out, g);
}

}  // namespace ddsm
