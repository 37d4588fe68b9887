#pragma once

#include <Eigen/SVD>
#include <cmath>
#include <optional>
#include <vector>

#include "ddsm/common.hpp"
#include "ddsm/graph.hpp"
#include "ddsm/spectral.hpp"

namespace ddsm {

/// D(X) = 1/2 sum_edges || X_i/sqrt(d_i) - X_j/sqrt(d_j) ||^2.
inline double dirichlet_energy(const Graph& g, const Mat& X) {
  require(X.rows() == g.n(), "dirichlet_energy: row count mismatch");
  double acc = 0.0;
  for (const Edge& e : g.edges()) {
    if (e.u == e.v) continue;
    acc += (X.row(e.u) / std::sqrt(g.degree(e.u)) -
            X.row(e.v) / std::sqrt(g.degree(e.v)))
               .squaredNorm();
  }
  return 0.5 * acc;
}

/// Fraction of edges whose endpoints share a label (self-loops count as
/// same-label).
inline double homophily_ratio(const LabeledGraph& lg) {
  require(lg.graph.m() > 0, "homophily_ratio: graph has no edges");
  int same = 0;
  for (const Edge& e : lg.graph.edges())
    if (lg.labels[static_cast<size_t>(e.u)] == lg.labels[static_cast<size_t>(e.v)])
      ++same;
  return static_cast<double>(same) / lg.graph.m();
}

struct HomophilyIdentityReport {
  double direct = 0.0;    // edge-count ratio
  double spectral = 0.0;  // 1 - D(D^{1/2} Y) / m
  double gap = 0.0;
  bool ok(double tol = 1e-12) const { return gap <= tol; }
};

/// The homophily ratio equals 1 - D(D^{1/2} Y)/m where Y is the one-hot label
/// matrix: each heterophilic edge contributes exactly 1 to the energy.
inline HomophilyIdentityReport verify_homophily_identity(const LabeledGraph& lg) {
  HomophilyIdentityReport r;
  r.direct = homophily_ratio(lg);
  Mat X = lg.one_hot();
  for (int i = 0; i < lg.graph.n(); ++i)
    X.row(i) *= std::sqrt(lg.graph.degree(i));
  r.spectral = 1.0 - dirichlet_energy(lg.graph, X) / lg.graph.m();
  r.gap = std::abs(r.direct - r.spectral);
  return r;
}

namespace detail {
/// Row-normalized copy of H; rows with zero norm are flagged invalid.
inline std::pair<Mat, std::vector<char>> unit_rows(const Mat& H) {
  Mat U = H;
  std::vector<char> valid(static_cast<size_t>(H.rows()), 1);
  for (int i = 0; i < H.rows(); ++i) {
    double nrm = U.row(i).norm();
    if (nrm == 0.0)
      valid[static_cast<size_t>(i)] = 0;
    else
      U.row(i) /= nrm;
  }
  return {std::move(U), std::move(valid)};
}
}  // namespace detail

/// Smoothness metric: mean over ordered node pairs of the distance between
/// unit-normalized rows, scaled by 1/2 (so an orthogonal pair scores
/// sqrt(2)/2). Zero-norm rows are dropped from both sum and pair count.
inline double smv(const Mat& H) {
  auto [U, valid] = detail::unit_rows(H);
  std::vector<int> idx;
  for (int i = 0; i < H.rows(); ++i)
    if (valid[static_cast<size_t>(i)]) idx.push_back(i);
  const int n = static_cast<int>(idx.size());
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      acc += (U.row(idx[static_cast<size_t>(a)]) -
              U.row(idx[static_cast<size_t>(b)]))
                 .norm();
  // unordered sum doubled = ordered-pair sum; normalizer 1/(2 n (n-1))
  return 2.0 * acc / (2.0 * n * (n - 1.0));
}

/// Mean absolute Pearson correlation over ordered pairs of distinct feature
/// dimensions, population (1/n) covariance. Constant columns are excluded
/// pairwise; absent when fewer than two non-constant columns remain.
inline std::optional<double> corr(const Mat& H) {
  const int n = static_cast<int>(H.rows());
  if (n < 2 || H.cols() < 2) return std::nullopt;
  Mat C = H.rowwise() - H.colwise().mean();
  std::vector<int> cols;
  Vec sigma(H.cols());
  for (int j = 0; j < H.cols(); ++j) {
    sigma[j] = std::sqrt(C.col(j).squaredNorm() / n);
    if (sigma[j] > 0.0) cols.push_back(j);
  }
  const int d = static_cast<int>(cols.size());
  if (d < 2) return std::nullopt;
  double acc = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      int i = cols[static_cast<size_t>(a)], j = cols[static_cast<size_t>(b)];
      acc += std::abs(C.col(i).dot(C.col(j)) / (n * sigma[i] * sigma[j]));
    }
  return 2.0 * acc / (static_cast<double>(d) * (d - 1.0));
}

/// Heterophilic-edge separation: mean normalized-row distance over edges whose
/// endpoints disagree, scaled by 1/2. Absent when the graph has no
/// heterophilic edges; edges touching a zero-norm row are dropped with count
/// adjustment.
inline std::optional<double> hos(const LabeledGraph& lg, const Mat& H) {
  require(H.rows() == lg.graph.n(), "hos: row count mismatch");
  auto [U, valid] = detail::unit_rows(H);
  double acc = 0.0;
  int count = 0;
  bool any_hetero = false;
  for (const Edge& e : lg.graph.edges()) {
    if (lg.labels[static_cast<size_t>(e.u)] == lg.labels[static_cast<size_t>(e.v)])
      continue;
    any_hetero = true;
    if (!valid[static_cast<size_t>(e.u)] || !valid[static_cast<size_t>(e.v)])
      continue;
    acc += (U.row(e.u) - U.row(e.v)).norm();
    ++count;
  }
  if (!any_hetero || count == 0) return std::nullopt;
  return acc / (2.0 * count);
}

struct DiagnosticsReport {
  double dirichlet = 0.0;
  double smv = 0.0;
  std::optional<double> corr;
  std::optional<double> hos;
  std::optional<double> homophily;
};

inline DiagnosticsReport diagnostics(const Graph& g, const Mat& H,
                                     const std::vector<int>* labels = nullptr) {
  DiagnosticsReport r;
  r.dirichlet = dirichlet_energy(g, H);
  r.smv = ddsm::smv(H);
  r.corr = ddsm::corr(H);
  if (labels) {
    LabeledGraph lg(g, *labels);
    r.hos = ddsm::hos(lg, H);
    r.homophily = homophily_ratio(lg);
  }
  return r;
}

// =============================================================================
// Repeated-smoothing limit check: on a connected non-bipartite graph,
// A_hat^k H0 -> pi (pi' H0) and the Gram matrix collapses to rank one.
// =============================================================================

struct LimitReport {
  int k_used = 0;
  double limit_residual = 0.0;   // ||A_hat^k H0 - pi (pi' H0)||_F
  double sv_ratio = 0.0;         // sigma_2 / sigma_1 of the Gram matrix
  double gram_residual = 0.0;    // ||Gram - (H0' pi)(pi' H0)||_F
  bool ok(double tol) const {
    return limit_residual <= tol && sv_ratio <= tol && gram_residual <= tol;
  }
};

inline LimitReport check_oversmoothing_limit(const Graph& g, const Mat& H0,
                                             int k_max, double tol) {
  require(H0.rows() == g.n(), "check_oversmoothing_limit: row count mismatch");
  require(g.connected(), "repeated-smoothing limit requires a connected graph");
  require(!g.bipartite(),
          "repeated-smoothing limit hypothesis violated: graph is bipartite "
          "(-1 is an eigenvalue and A_hat^k does not converge)");
  Vec pi = stationary_direction(g);
  Mat limit = pi * (pi.transpose() * H0);

  // second-largest |eigenvalue| sets the decay rate; derive k from it
  SpectralBasis basis = eig_dense(g, OperatorKind::NormAdjacency,
                                  Selection::LargestAbs);
  double lam2 = g.n() > 1 ? std::abs(basis.eigenvalues[1]) : 0.0;
  int k_needed = k_max;
  if (lam2 > 0.0 && lam2 < 1.0)
    k_needed = std::min(
        k_max, static_cast<int>(std::ceil(std::log(tol) / std::log(lam2))) + 5);

  LimitReport rep;
  Mat H = H0;
  for (int k = 0; k < k_needed; ++k) H = g.norm_adjacency_mul(H);
  rep.k_used = k_needed;
  rep.limit_residual = (H - limit).norm();

  Mat gram = H.transpose() * H;
  Eigen::JacobiSVD<Mat> svd(gram);
  double s1 = svd.singularValues()[0];
  rep.sv_ratio = gram.rows() > 1 && s1 > 0.0 ? svd.singularValues()[1] / s1 : 0.0;
  Vec proj = H0.transpose() * pi;
  rep.gram_residual = (gram - proj * proj.transpose()).norm();
  return rep;
}

}  // namespace ddsm
