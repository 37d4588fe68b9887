#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ddsm/common.hpp"
#include "ddsm/graph.hpp"
#include "ddsm/spectral.hpp"

namespace ddsm {

// =============================================================================
// Distance kinds
// =============================================================================

enum class DistanceVariant { Vdd, Prdd, Hkdd, Spd, Jaccard, Resistance, Biharmonic, Zero };

struct DistanceKind {
  DistanceVariant variant = DistanceVariant::Vdd;
  int t = 10;          // VDD walk length
  double gamma = 0.9;  // PRDD teleportation / HKDD heat constant

  static DistanceKind vdd(int t) { return {DistanceVariant::Vdd, t, 0.0}; }
  static DistanceKind prdd(double gamma) {
    require(gamma > 0.0 && gamma < 1.0, "prdd: gamma must lie in (0,1)");
    return {DistanceVariant::Prdd, 0, gamma};
  }
  static DistanceKind hkdd(double gamma) {
    require(gamma > 0.0, "hkdd: gamma must be positive");
    return {DistanceVariant::Hkdd, 0, gamma};
  }
  static DistanceKind simple(DistanceVariant v) { return {v, 0, 0.0}; }

  bool diffusion() const {
    return variant == DistanceVariant::Vdd || variant == DistanceVariant::Prdd ||
           variant == DistanceVariant::Hkdd;
  }

  OperatorKind operator_kind() const {
    require(diffusion(), "operator_kind only defined for diffusion distances");
    return variant == DistanceVariant::Hkdd ? OperatorKind::NormLaplacian
                                            : OperatorKind::NormAdjacency;
  }
  Selection selection() const {
    switch (variant) {
      case DistanceVariant::Vdd: return Selection::LargestAbs;
      case DistanceVariant::Prdd: return Selection::LargestAlgebraic;
      case DistanceVariant::Hkdd: return Selection::SmallestAlgebraic;
      default: fail("selection only defined for diffusion distances");
    }
  }

  /// Elementwise eigenvalue map of the spectral embedding.
  double f(double lambda) const {
    switch (variant) {
      case DistanceVariant::Vdd: return std::pow(lambda, t);
      case DistanceVariant::Prdd: return 1.0 / (1.0 - gamma * lambda);
      case DistanceVariant::Hkdd: return std::exp(-gamma * lambda);
      default: fail("f only defined for diffusion distances");
    }
  }

  /// Truncation constant of the approximation sandwich: eps = f(lambda_kappa)^2
  /// with lambda_kappa the last retained eigenvalue under this kind's ordering.
  double truncation_eps(double lambda_kappa) const {
    double fk = f(lambda_kappa);
    return fk * fk;
  }

  std::string name() const {
    switch (variant) {
      case DistanceVariant::Vdd: return "vdd";
      case DistanceVariant::Prdd: return "prdd";
      case DistanceVariant::Hkdd: return "hkdd";
      case DistanceVariant::Spd: return "spd";
      case DistanceVariant::Jaccard: return "jaccard";
      case DistanceVariant::Resistance: return "resistance";
      case DistanceVariant::Biharmonic: return "biharmonic";
      default: return "zero";
    }
  }
  std::string params() const {
    switch (variant) {
      case DistanceVariant::Vdd: return "t=" + std::to_string(t);
      case DistanceVariant::Prdd:
      case DistanceVariant::Hkdd: return "gamma=" + format_double(gamma);
      default: return "-";
    }
  }

  static DistanceKind parse(const std::string& name, int t, double gamma) {
    if (name == "vdd") return vdd(t);
    if (name == "prdd") return prdd(gamma);
    if (name == "hkdd") return hkdd(gamma);
    if (name == "spd") return simple(DistanceVariant::Spd);
    if (name == "jaccard") return simple(DistanceVariant::Jaccard);
    if (name == "resistance") return simple(DistanceVariant::Resistance);
    if (name == "biharmonic") return simple(DistanceVariant::Biharmonic);
    if (name == "zero") return simple(DistanceVariant::Zero);
    fail("unknown distance kind: " + name);
  }
};

/// Per-edge distance values aligned to the graph's canonical edge order.
/// kappa_used < 0 marks an exact (dense-oracle) computation.
struct EdgeDistances {
  DistanceKind kind;
  int kappa_used = -1;
  Vec values;
};

/// Spectral distance embedding Z with Z_i = (U'_i / sqrt(d_i)) * f(Lambda').
struct DistanceEmbedding {
  DistanceKind kind;
  int kappa = 0;
  Mat Z;
};

// =============================================================================
// Spectral path
// =============================================================================

inline DistanceEmbedding diffusion_embedding(const Graph& g,
                                             const SpectralBasis& basis,
                                             const DistanceKind& kind) {
  require(kind.diffusion(), "diffusion_embedding: not a diffusion distance");
  require(basis.operator_kind == kind.operator_kind(),
          "diffusion_embedding: basis built on " + to_string(basis.operator_kind) +
              " but " + kind.name() + " requires " +
              to_string(kind.operator_kind()));
  require(basis.selection == kind.selection(),
          "diffusion_embedding: basis selection " + to_string(basis.selection) +
              " but " + kind.name() + " requires " +
              to_string(kind.selection()));
  require(basis.eigenvectors.rows() == g.n(), "diffusion_embedding: size mismatch");
  DistanceEmbedding emb;
  emb.kind = kind;
  emb.kappa = basis.kappa;
  emb.Z = basis.eigenvectors;
  for (int k = 0; k < basis.kappa; ++k) emb.Z.col(k) *= kind.f(basis.eigenvalues[k]);
  for (int i = 0; i < g.n(); ++i) emb.Z.row(i) /= std::sqrt(g.degree(i));
  return emb;
}

inline EdgeDistances edge_distances(const Graph& g, const DistanceEmbedding& emb) {
  require(emb.Z.rows() == g.n(), "edge_distances: embedding row count mismatch");
  EdgeDistances ed;
  ed.kind = emb.kind;
  ed.kappa_used = emb.kappa;
  ed.values.resize(g.m());
  for (int e = 0; e < g.m(); ++e) {
    const Edge& edge = g.edges()[static_cast<size_t>(e)];
    ed.values[e] = (emb.Z.row(edge.u) - emb.Z.row(edge.v)).norm();
  }
  return ed;
}

/// Truncated spectral distances in one call (Lanczos for kappa < n).
inline EdgeDistances spectral_distances(const Graph& g, const DistanceKind& kind,
                                        int kappa, std::uint64_t seed = 12345,
                                        double tol = 1e-10) {
  SpectralBasis basis =
      kappa >= g.n()
          ? eig_dense(g, kind.operator_kind(), kind.selection())
          : eig_truncated(g, kind.operator_kind(), kind.selection(), kappa, 0,
                          tol, seed);
  return edge_distances(g, diffusion_embedding(g, basis, kind));
}

// =============================================================================
// Dense oracles
//
// VDD:  rows of P^t D^{-1/2} by repeated dense multiplication.
// PRDD: truncated geometric series sum_t gamma^t P^t D^{-1/2}; the tail is cut
//       when gamma^{T+1}/(1-gamma) * max_i d_i^{-1/2} < 1e-13.
// HKDD: Poisson-weighted series of P^t with a right D^{-1/2} factor, summed
//       until cumulative weight >= 1 - 1e-14. With the D^{-1/2} factor this
//       equals the spectral form on every graph; the literal series without it
//       (hkdd_series_literal below) differs by sqrt(d) on d-regular graphs.
// =============================================================================

namespace detail {
inline Mat right_inv_sqrt_deg(const Graph& g, Mat M) {
  for (int j = 0; j < g.n(); ++j) M.col(j) /= std::sqrt(g.degree(j));
  return M;
}
inline EdgeDistances row_distances(const Graph& g, const Mat& M,
                                   const DistanceKind& kind) {
  EdgeDistances ed;
  ed.kind = kind;
  ed.kappa_used = -1;
  ed.values.resize(g.m());
  for (int e = 0; e < g.m(); ++e) {
    const Edge& edge = g.edges()[static_cast<size_t>(e)];
    ed.values[e] = (M.row(edge.u) - M.row(edge.v)).norm();
  }
  return ed;
}
}  // namespace detail

inline EdgeDistances exact_diffusion_oracle(const Graph& g,
                                            const DistanceKind& kind,
                                            int dense_cap = kDefaultDenseCap) {
  require(kind.diffusion(), "exact_diffusion_oracle: not a diffusion distance");
  require(g.n() <= dense_cap, "exact_diffusion_oracle: n exceeds dense cap");
  const Mat P = g.dense_transition();
  const int n = g.n();
  switch (kind.variant) {
    case DistanceVariant::Vdd: {
      Mat Pt = Mat::Identity(n, n);
      for (int s = 0; s < kind.t; ++s) Pt = Pt * P;
      return detail::row_distances(g, detail::right_inv_sqrt_deg(g, Pt), kind);
    }
    case DistanceVariant::Prdd: {
      double max_inv_sqrt = 1.0 / std::sqrt(g.min_degree());
      Mat sum = Mat::Identity(n, n);
      Mat term = Mat::Identity(n, n);
      double coef = 1.0;
      while (coef * kind.gamma / (1.0 - kind.gamma) * max_inv_sqrt >= 1e-13) {
        term = term * P;
        coef *= kind.gamma;
        sum += coef * term;
      }
      return detail::row_distances(g, detail::right_inv_sqrt_deg(g, sum), kind);
    }
    default: {  // Hkdd
      Mat sum = Mat::Zero(n, n);
      Mat term = Mat::Identity(n, n);
      double w = std::exp(-kind.gamma);
      double cum = 0.0;
      int s = 0;
      while (cum < 1.0 - 1e-14) {
        sum += w * term;
        cum += w;
        ++s;
        term = term * P;
        w *= kind.gamma / s;
      }
      return detail::row_distances(g, detail::right_inv_sqrt_deg(g, sum), kind);
    }
  }
}

/// Heat-kernel series without the right D^{-1/2} factor. Bounded by sqrt(2);
/// equals sqrt(d) times the spectral form on d-regular graphs.
inline EdgeDistances hkdd_series_literal(const Graph& g, double gamma,
                                         int dense_cap = kDefaultDenseCap) {
  require(g.n() <= dense_cap, "hkdd_series_literal: n exceeds dense cap");
  const Mat P = g.dense_transition();
  Mat sum = Mat::Zero(g.n(), g.n());
  Mat term = Mat::Identity(g.n(), g.n());
  double w = std::exp(-gamma);
  double cum = 0.0;
  int s = 0;
  while (cum < 1.0 - 1e-14) {
    sum += w * term;
    cum += w;
    ++s;
    term = term * P;
    w *= gamma / s;
  }
  return detail::row_distances(g, sum, DistanceKind::hkdd(gamma));
}

// =============================================================================
// Baseline metrics
// =============================================================================

namespace detail {

inline Vec spd_edges(const Graph& g) {
  const int n = g.n();
  Vec out(g.m());
  if (g.unweighted()) {
    std::vector<int> dist(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
      std::fill(dist.begin(), dist.end(), -1);
      std::queue<int> q;
      q.push(s);
      dist[static_cast<size_t>(s)] = 0;
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : g.neighbors(u))
          if (dist[static_cast<size_t>(v)] < 0) {
            dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
            q.push(v);
          }
      }
      for (int e = 0; e < g.m(); ++e)
        if (g.edges()[static_cast<size_t>(e)].u == s)
          out[e] = dist[static_cast<size_t>(g.edges()[static_cast<size_t>(e)].v)];
    }
  } else {
    std::vector<double> dist(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
      std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      dist[static_cast<size_t>(s)] = 0.0;
      pq.emplace(0.0, s);
      while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du > dist[static_cast<size_t>(u)]) continue;
        auto nbr = g.neighbors(u);
        auto wts = g.neighbor_weights(u);
        for (size_t k = 0; k < nbr.size(); ++k) {
          double nd = du + wts[k];
          if (nd < dist[static_cast<size_t>(nbr[k])]) {
            dist[static_cast<size_t>(nbr[k])] = nd;
            pq.emplace(nd, nbr[k]);
          }
        }
      }
      for (int e = 0; e < g.m(); ++e)
        if (g.edges()[static_cast<size_t>(e)].u == s)
          out[e] = dist[static_cast<size_t>(g.edges()[static_cast<size_t>(e)].v)];
    }
  }
  return out;
}

inline Vec jaccard_edges(const Graph& g) {
  Vec out(g.m());
  for (int e = 0; e < g.m(); ++e) {
    const Edge& edge = g.edges()[static_cast<size_t>(e)];
    auto ni = g.neighbors(edge.u);
    auto nj = g.neighbors(edge.v);
    std::set<int> si(ni.begin(), ni.end()), su(ni.begin(), ni.end());
    int inter = 0;
    for (int v : nj) {
      if (si.count(v)) ++inter;
      su.insert(v);
    }
    out[e] = 1.0 - static_cast<double>(inter) / static_cast<double>(su.size());
  }
  return out;
}

/// Pseudoinverse of the combinatorial Laplacian L = D - A (connected graph:
/// exactly one zero eigenvalue, dropped).
inline Mat laplacian_pinv(const Graph& g) {
  Mat L = -g.dense_adjacency();
  for (int i = 0; i < g.n(); ++i) L(i, i) += g.degree(i);
  Eigen::SelfAdjointEigenSolver<Mat> es(L);
  require(es.info() == Eigen::Success, "laplacian_pinv: eigensolver failed");
  Mat pinv = Mat::Zero(g.n(), g.n());
  double lam_max = es.eigenvalues().maxCoeff();
  for (int k = 0; k < g.n(); ++k) {
    double lam = es.eigenvalues()[k];
    if (lam > 1e-10 * std::max(1.0, lam_max))
      pinv += (1.0 / lam) * es.eigenvectors().col(k) *
              es.eigenvectors().col(k).transpose();
  }
  return pinv;
}

}  // namespace detail

inline EdgeDistances baseline_distance(const Graph& g, const DistanceKind& kind,
                                       int dense_cap = kDefaultDenseCap) {
  EdgeDistances ed;
  ed.kind = kind;
  ed.kappa_used = -1;
  switch (kind.variant) {
    case DistanceVariant::Zero:
      ed.values = Vec::Zero(g.m());
      return ed;
    case DistanceVariant::Spd:
      ed.values = detail::spd_edges(g);
      return ed;
    case DistanceVariant::Jaccard:
      ed.values = detail::jaccard_edges(g);
      return ed;
    case DistanceVariant::Resistance:
    case DistanceVariant::Biharmonic: {
      require(g.n() <= dense_cap, "baseline_distance: n exceeds dense cap");
      require(g.connected(),
              kind.name() + " distance requires a connected graph");
      Mat Q = detail::laplacian_pinv(g);
      if (kind.variant == DistanceVariant::Biharmonic) Q = Mat(Q * Q);
      ed.values.resize(g.m());
      for (int e = 0; e < g.m(); ++e) {
        const Edge& edge = g.edges()[static_cast<size_t>(e)];
        double q = Q(edge.u, edge.u) + Q(edge.v, edge.v) - 2.0 * Q(edge.u, edge.v);
        ed.values[e] = kind.variant == DistanceVariant::Biharmonic
                           ? std::sqrt(std::max(q, 0.0))
                           : q;
      }
      return ed;
    }
    default:
      fail("baseline_distance: " + kind.name() + " is not a baseline metric");
  }
}

/// Dispatch: diffusion kinds via the dense oracle, others via baselines.
inline EdgeDistances exact_distances(const Graph& g, const DistanceKind& kind,
                                     int dense_cap = kDefaultDenseCap) {
  return kind.diffusion() ? exact_diffusion_oracle(g, kind, dense_cap)
                          : baseline_distance(g, kind, dense_cap);
}

// =============================================================================
// Range caps (valid-range diagnostics for diffusion distances)
// =============================================================================

struct RangeReport {
  double cap = 0.0;
  double max_value = 0.0;
  double max_ratio = 0.0;  // max_value / cap
  bool ok(double slack = 1e-9) const { return max_value <= cap + slack; }
};

/// Caps: VDD sqrt(2)/d_min, PRDD sqrt(2)/((1-gamma) d_min), HKDD spectral form
/// sqrt(2)/sqrt(d_min) (and sqrt(2) on regular graphs, asserted by callers).
inline RangeReport check_ranges(const Graph& g, const EdgeDistances& ed) {
  require(ed.kind.diffusion(), "check_ranges: diffusion distances only");
  const double dmin = g.min_degree();
  RangeReport r;
  switch (ed.kind.variant) {
    case DistanceVariant::Vdd: r.cap = std::sqrt(2.0) / dmin; break;
    case DistanceVariant::Prdd:
      r.cap = std::sqrt(2.0) / ((1.0 - ed.kind.gamma) * dmin);
      break;
    default: r.cap = std::sqrt(2.0) / std::sqrt(dmin); break;
  }
  r.max_value = ed.values.size() ? ed.values.maxCoeff() : 0.0;
  r.max_ratio = r.max_value / r.cap;
  return r;
}

// =============================================================================
// Truncation sandwich check
// =============================================================================

struct TruncationReport {
  int kappa = 0;
  double eps = 0.0;
  /// max over edges of (Delta'^2 - Delta^2); positive means the upper bound
  /// was violated.
  double max_upper_violation = -std::numeric_limits<double>::infinity();
  /// max over edges of (Delta^2 - 2 eps / min(d_i,d_j)) - Delta'^2; positive
  /// means the lower bound was violated.
  double max_lower_violation = -std::numeric_limits<double>::infinity();
  std::vector<int> violating_edges;
  bool ok(double slack = 1e-9) const {
    return max_upper_violation <= slack && max_lower_violation <= slack;
  }
};

/// Two-sided truncation bound per edge, with exact Delta and the true ordered
/// spectrum both taken from the dense decomposition.
inline TruncationReport check_truncation_bound(const Graph& g,
                                               const DistanceKind& kind,
                                               int kappa,
                                               int dense_cap = kDefaultDenseCap,
                                               double slack = 1e-9) {
  require(kind.diffusion(), "check_truncation_bound: diffusion distances only");
  require(kappa >= 1 && kappa <= g.n(), "check_truncation_bound: bad kappa");
  SpectralBasis dense = eig_dense(g, kind.operator_kind(), kind.selection(),
                                  dense_cap);
  DistanceEmbedding full = diffusion_embedding(g, dense, kind);

  TruncationReport rep;
  rep.kappa = kappa;
  rep.eps = kind.truncation_eps(dense.eigenvalues[kappa - 1]);
  for (int e = 0; e < g.m(); ++e) {
    const Edge& edge = g.edges()[static_cast<size_t>(e)];
    double full2 = (full.Z.row(edge.u) - full.Z.row(edge.v)).squaredNorm();
    double trunc2 = (full.Z.row(edge.u).head(kappa) - full.Z.row(edge.v).head(kappa))
                        .squaredNorm();
    double same = edge.u == edge.v ? 1.0 : 0.0;
    double lower = full2 - 2.0 * rep.eps * (1.0 - same) /
                               std::min(g.degree(edge.u), g.degree(edge.v));
    double up_v = trunc2 - full2;
    double lo_v = lower - trunc2;
    rep.max_upper_violation = std::max(rep.max_upper_violation, up_v);
    rep.max_lower_violation = std::max(rep.max_lower_violation, lo_v);
    if (up_v > slack || lo_v > slack) rep.violating_edges.push_back(e);
  }
  return rep;
}

// =============================================================================
// Perturbation stability probe (empirical only)
// =============================================================================

struct StabilityReport {
  std::vector<double> magnitudes;
  /// max_changes[trial][level]: max |Delta - Delta'| over edges.
  std::vector<std::vector<double>> max_changes;
  int monotone_trials = 0;
  int trials = 0;
  double monotone_fraction() const {
    return trials ? static_cast<double>(monotone_trials) / trials : 1.0;
  }
};

/// Perturbs `edge_flips` random edge weights multiplicatively by factors
/// (1 + s*eps) with a per-trial direction s reused across magnitudes, then
/// compares exact per-edge distances. Trials that disconnect are resampled.
inline StabilityReport perturbation_stability_probe(
    const Graph& g, const DistanceKind& kind, int edge_flips, int trials,
    std::uint64_t seed,
    std::vector<double> magnitudes = {0.1, 0.01, 0.001}) {
  StabilityReport rep;
  rep.magnitudes = magnitudes;
  rep.trials = trials;
  EdgeDistances base = exact_distances(g, kind);

  for (int trial = 0; trial < trials; ++trial) {
    Rng r(seed, static_cast<std::uint64_t>(trial) + 1);
    std::vector<int> chosen;
    std::vector<double> sign;
    for (int k = 0; k < edge_flips; ++k) {
      chosen.push_back(static_cast<int>(r.uniform_int(
          static_cast<std::uint64_t>(g.m()))));
      sign.push_back(r.uniform() < 0.5 ? -1.0 : 1.0);
    }
    std::vector<double> row;
    for (double eps : magnitudes) {
      std::vector<std::tuple<int, int, double>> edges;
      for (int e = 0; e < g.m(); ++e) {
        const Edge& edge = g.edges()[static_cast<size_t>(e)];
        double w = edge.w;
        for (size_t k = 0; k < chosen.size(); ++k)
          if (chosen[k] == e) w *= 1.0 + sign[k] * eps;
        edges.emplace_back(edge.u, edge.v, w);
      }
      Graph pg = Graph::build(edges, g.n());
      require(pg.connected() == g.connected(),
              "stability probe: perturbation changed connectivity");
      EdgeDistances pd = exact_distances(pg, kind);
      row.push_back((pd.values - base.values).cwiseAbs().maxCoeff());
    }
    bool monotone = true;
    for (size_t k = 1; k < row.size(); ++k)
      if (row[k] > row[k - 1] + 1e-15) monotone = false;
    if (monotone) ++rep.monotone_trials;
    rep.max_changes.push_back(std::move(row));
  }
  return rep;
}

// =============================================================================
// Distance cache file:
//   #dist v1 kind=<name> params=<params> kappa=<kappa|exact>
//   one line per canonical edge: u<TAB>v<TAB>value (17 significant digits)
// =============================================================================

inline void save_distances(std::ostream& out, const Graph& g,
                           const EdgeDistances& ed) {
  out << "#dist v1 kind=" << ed.kind.name() << " params=" << ed.kind.params()
      << " kappa="
      << (ed.kappa_used < 0 ? std::string("exact") : std::to_string(ed.kappa_used))
      << "\n";
  for (int e = 0; e < g.m(); ++e)
    out << g.edges()[static_cast<size_t>(e)].u << '\t'
        << g.edges()[static_cast<size_t>(e)].v << '\t'
        << format_double(ed.values[e]) << '\n';
}

inline EdgeDistances load_distances(std::istream& in, const Graph& g) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), "dist cache: missing header");
  require(header.rfind("#dist v1 ", 0) == 0, "dist cache: bad header");
  auto field = [&](const std::string& key) {
    auto pos = header.find(key + "=");
    require(pos != std::string::npos, "dist cache: missing field " + key);
    auto end = header.find(' ', pos);
    return header.substr(pos + key.size() + 1, end - pos - key.size() - 1);
  };
  std::string params = field("params");
  int t = 10;
  double gamma = 0.9;
  if (params.rfind("t=", 0) == 0) t = std::stoi(params.substr(2));
  if (params.rfind("gamma=", 0) == 0) gamma = std::stod(params.substr(6));
  EdgeDistances ed;
  ed.kind = DistanceKind::parse(field("kind"), t, gamma);
  std::string kap = field("kappa");
  ed.kappa_used = kap == "exact" ? -1 : std::stoi(kap);
  ed.values.resize(g.m());
  for (int e = 0; e < g.m(); ++e) {
    int u, v;
    double val;
    require(static_cast<bool>(in >> u >> v >> val), "dist cache: truncated file");
    require(u == g.edges()[static_cast<size_t>(e)].u &&
                v == g.edges()[static_cast<size_t>(e)].v,
            "dist cache: edge order does not match graph at row " +
                std::to_string(e));
    ed.values[e] = val;
  }
  return ed;
}

inline void save_distances_file(const std::string& path, const Graph& g,
                                const EdgeDistances& ed) {
  std::ofstream out(path);
  require(out.good(), "cannot write distance cache: " + path);
  save_distances(out, g, ed);
}

inline EdgeDistances load_distances_file(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  require(in.good(), "cannot open distance cache: " + path);
  return load_distances(in, g);
}

}  // namespace ddsm
