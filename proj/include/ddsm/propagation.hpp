#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ddsm/common.hpp"
#include "ddsm/distances.hpp"
#include "ddsm/graph.hpp"
#include "ddsm/metrics.hpp"

namespace ddsm {

enum class ThirdTerm { Raw, ColumnNormalized };

/// Coefficients of the propagation objective and its layer update. alpha
/// weights the anchor to the initial features, beta the decorrelation term,
/// eta scales the target distances; (1 - alpha - beta) must stay nonnegative.
struct PropagationConfig {
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  int layers = 1;
  double eps_denom = 1e-8;  // floor for the stress denominator
  ThirdTerm third_term = ThirdTerm::ColumnNormalized;

  void validate() const {
    require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0,1]");
    require(beta >= 0.0 && beta <= 1.0, "beta must lie in [0,1]");
    require(alpha + beta <= 1.0 + 1e-15, "alpha + beta must not exceed 1");
    require(eta >= 0.0, "eta must be nonnegative");
    require(layers >= 0, "layer count must be nonnegative");
    require(eps_denom > 0.0, "eps_denom must be positive");
  }
};

// =============================================================================
// Feature matrix CSV: one row per node, comma-separated 64-bit floats,
// no header by default. NaN/Inf rejected at the boundary.
// =============================================================================

inline void check_finite(const Mat& H, const std::string& what) {
  for (int i = 0; i < H.rows(); ++i)
    for (int j = 0; j < H.cols(); ++j)
      require(std::isfinite(H(i, j)), what + ": non-finite value at row " +
                                          std::to_string(i) + ", column " +
                                          std::to_string(j));
}

inline Mat load_feature_csv(std::istream& in, bool skip_header = false) {
  std::vector<std::vector<double>> rows;
  std::string line;
  if (skip_header) std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    require(rows.empty() || row.size() == rows.front().size(),
            "feature csv: ragged row " + std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), "feature csv: no data rows");
  Mat H(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < H.rows(); ++i)
    for (int j = 0; j < H.cols(); ++j)
      H(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  check_finite(H, "feature csv");
  return H;
}

inline Mat load_feature_csv_file(const std::string& path,
                                 bool skip_header = false) {
  std::ifstream in(path);
  require(in.good(), "cannot open feature csv: " + path);
  return load_feature_csv(in, skip_header);
}

inline void save_feature_csv(std::ostream& out, const Mat& H) {
  for (int i = 0; i < H.rows(); ++i) {
    for (int j = 0; j < H.cols(); ++j)
      out << format_double(H(i, j)) << (j + 1 == H.cols() ? "\n" : ",");
  }
}

inline void save_feature_csv_file(const std::string& path, const Mat& H) {
  std::ofstream out(path);
  require(out.good(), "cannot write feature csv: " + path);
  save_feature_csv(out, H);
}

// =============================================================================
// Objective terms
// =============================================================================

/// S = sum_edges ( || H_i/sqrt(d_i) - H_j/sqrt(d_j) || - eta * Delta(i,j) )^2.
inline double stress_loss(const Graph& g, const Mat& H,
                          const EdgeDistances& delta, double eta) {
  require(H.rows() == g.n(), "stress_loss: row count mismatch");
  require(delta.values.size() == g.m(), "stress_loss: distance count mismatch");
  double acc = 0.0;
  for (int e = 0; e < g.m(); ++e) {
    const Edge& edge = g.edges()[static_cast<size_t>(e)];
    if (edge.u == edge.v) continue;
    double dist = (H.row(edge.u) / std::sqrt(g.degree(edge.u)) -
                   H.row(edge.v) / std::sqrt(g.degree(edge.v)))
                      .norm();
    double r = dist - eta * delta.values[e];
    acc += r * r;
  }
  return acc;
}

/// C = 1/2 || H' H - I ||_F^2.
inline double orth_loss(const Mat& H) {
  Mat G = H.transpose() * H;
  G.diagonal().array() -= 1.0;
  return 0.5 * G.squaredNorm();
}

/// (1 - alpha - beta) S + beta C + alpha || H - H0 ||_F^2.
inline double ddsm_objective(const Graph& g, const Mat& H, const Mat& H0,
                             const EdgeDistances& delta,
                             const PropagationConfig& cfg) {
  cfg.validate();
  require(H.rows() == H0.rows() && H.cols() == H0.cols(),
          "ddsm_objective: H and H0 shapes differ");
  return (1.0 - cfg.alpha - cfg.beta) * stress_loss(g, H, delta, cfg.eta) +
         cfg.beta * orth_loss(H) + cfg.alpha * (H - H0).squaredNorm();
}

/// Potential whose half-gradient descent step is exactly one layer update with
/// the Raw third term (on unweighted graphs, where sum_j H_i/d_i = H_i):
///   (1-a-b) S + a ||H - H0||_F^2 + b (||H||_F^2 - 1/2 ||H'H||_F^2).
/// The last bracket differs from orth_loss by a constant plus a sign on the
/// quartic term; it is the potential the update descends, and the
/// finite-difference tests target it.
inline double update_potential(const Graph& g, const Mat& H, const Mat& H0,
                               const EdgeDistances& delta,
                               const PropagationConfig& cfg) {
  cfg.validate();
  double gram2 = (H.transpose() * H).squaredNorm();
  return (1.0 - cfg.alpha - cfg.beta) * stress_loss(g, H, delta, cfg.eta) +
         cfg.alpha * (H - H0).squaredNorm() +
         cfg.beta * (H.squaredNorm() - 0.5 * gram2);
}

// =============================================================================
// Layer update
// =============================================================================

namespace detail {
inline Mat third_term(const Mat& H, ThirdTerm kind) {
  if (kind == ThirdTerm::Raw) return H * (H.transpose() * H);
  Mat Hn = H;
  for (int j = 0; j < Hn.cols(); ++j) {
    double nrm = Hn.col(j).norm();
    if (nrm > 0.0) Hn.col(j) /= nrm;  // zero columns stay zero
  }
  return Hn * (Hn.transpose() * H);
}

[[noreturn]] inline void nan_diagnostic(const Mat& M, const std::string& term) {
  for (int i = 0; i < M.rows(); ++i)
    if (!M.row(i).allFinite())
      fail("propagation produced a non-finite value at node " +
           std::to_string(i) + " in the " + term);
  fail("propagation produced a non-finite value in the " + term);
}
}  // namespace detail

/// One propagation layer:
///   H_i <- (1-a-b) sum_j w_ij H_j / sqrt(d_i d_j)
///        + eta (1-a-b) sum_j Delta_ij (H_i/d_i - H_j/sqrt(d_i d_j))
///                      / max(||H_i/sqrt(d_i) - H_j/sqrt(d_j)||, eps_denom)
///        + b T_i + a H0_i
/// computed Jacobi-style from the previous snapshot. T = H H'H (Raw) or
/// Hn Hn'H with unit columns (ColumnNormalized).
inline Mat ddsm_layer(const Graph& g, const Mat& Hk, const Mat& H0,
                      const EdgeDistances& delta,
                      const PropagationConfig& cfg) {
  cfg.validate();
  require(Hk.rows() == g.n(), "ddsm_layer: row count mismatch");
  require(Hk.rows() == H0.rows() && Hk.cols() == H0.cols(),
          "ddsm_layer: H and H0 shapes differ");
  require(delta.values.size() == g.m(), "ddsm_layer: distance count mismatch");
  const double smooth = 1.0 - cfg.alpha - cfg.beta;

  Mat out = smooth * g.norm_adjacency_mul(Hk);
  if (!out.allFinite()) detail::nan_diagnostic(out, "aggregation term");

  if (cfg.eta != 0.0 && smooth != 0.0) {
    Mat stress = Mat::Zero(Hk.rows(), Hk.cols());
    for (int e = 0; e < g.m(); ++e) {
      const Edge& edge = g.edges()[static_cast<size_t>(e)];
      if (edge.u == edge.v) continue;
      const double di = g.degree(edge.u), dj = g.degree(edge.v);
      const double cross = std::sqrt(di * dj);
      double denom = std::max(
          (Hk.row(edge.u) / std::sqrt(di) - Hk.row(edge.v) / std::sqrt(dj))
              .norm(),
          cfg.eps_denom);
      double scale = delta.values[e] / denom;
      stress.row(edge.u) +=
          scale * (Hk.row(edge.u) / di - Hk.row(edge.v) / cross);
      stress.row(edge.v) +=
          scale * (Hk.row(edge.v) / dj - Hk.row(edge.u) / cross);
    }
    if (!stress.allFinite()) detail::nan_diagnostic(stress, "stress term");
    out += cfg.eta * smooth * stress;
  }

  if (cfg.beta != 0.0) {
    Mat T = detail::third_term(Hk, cfg.third_term);
    if (!T.allFinite()) detail::nan_diagnostic(T, "decorrelation term");
    out += cfg.beta * T;
  }
  if (cfg.alpha != 0.0) out += cfg.alpha * H0;
  if (!out.allFinite()) detail::nan_diagnostic(out, "layer output");
  return out;
}

// =============================================================================
// Multi-layer propagation with optional per-layer diagnostics
// =============================================================================

struct LayerTraceRow {
  int layer = 0;
  double objective = 0.0;
  double dirichlet = 0.0;
  double smv = 0.0;
  std::optional<double> corr;
  std::optional<double> hos;
};

inline Mat propagate(const Graph& g, const Mat& H0, const EdgeDistances& delta,
                     const PropagationConfig& cfg,
                     std::vector<LayerTraceRow>* trace = nullptr,
                     const std::vector<int>* labels = nullptr) {
  cfg.validate();
  Mat H = H0;
  auto record = [&](int layer) {
    if (!trace) return;
    LayerTraceRow row;
    row.layer = layer;
    row.objective = ddsm_objective(g, H, H0, delta, cfg);
    row.dirichlet = dirichlet_energy(g, H);
    row.smv = smv(H);
    row.corr = corr(H);
    if (labels) row.hos = hos(LabeledGraph(g, *labels), H);
    trace->push_back(std::move(row));
  };
  record(0);
  for (int k = 0; k < cfg.layers; ++k) {
    H = ddsm_layer(g, H, H0, delta, cfg);
    record(k + 1);
  }
  return H;
}

}  // namespace ddsm
