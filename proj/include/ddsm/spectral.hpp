#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ddsm/common.hpp"
#include "ddsm/graph.hpp"
#include "ddsm/rng.hpp"

namespace ddsm {

enum class OperatorKind { NormAdjacency, NormLaplacian };
enum class Selection { LargestAbs, LargestAlgebraic, SmallestAlgebraic };

inline std::string to_string(OperatorKind k) {
  return k == OperatorKind::NormAdjacency ? "norm_adjacency" : "norm_laplacian";
}
inline std::string to_string(Selection s) {
  switch (s) {
    case Selection::LargestAbs: return "largest_abs";
    case Selection::LargestAlgebraic: return "largest_algebraic";
    default: return "smallest_algebraic";
  }
}

/// kappa retained eigenpairs of A_hat or L_hat, ordered by the selection rule.
/// Columns of `vectors` are orthonormal; `seed` is the Lanczos start-vector
/// seed (0 for dense decompositions).
struct SpectralBasis {
  OperatorKind operator_kind = OperatorKind::NormAdjacency;
  Selection selection = Selection::LargestAbs;
  int kappa = 0;
  Vec eigenvalues;
  Mat eigenvectors;
  std::uint64_t seed = 0;
};

namespace detail {

/// Ordering permutation for a full set of eigenvalues under a selection rule.
inline std::vector<int> selection_order(const Vec& lam, Selection sel) {
  std::vector<int> idx(static_cast<size_t>(lam.size()));
  std::iota(idx.begin(), idx.end(), 0);
  switch (sel) {
    case Selection::LargestAbs:
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        double da = std::abs(lam[a]), db = std::abs(lam[b]);
        if (da != db) return da > db;
        return lam[a] > lam[b];
      });
      break;
    case Selection::LargestAlgebraic:
      std::stable_sort(idx.begin(), idx.end(),
                       [&](int a, int b) { return lam[a] > lam[b]; });
      break;
    case Selection::SmallestAlgebraic:
      std::stable_sort(idx.begin(), idx.end(),
                       [&](int a, int b) { return lam[a] < lam[b]; });
      break;
  }
  return idx;
}

inline std::function<Vec(const Vec&)> operator_matvec(const Graph& g,
                                                      OperatorKind kind) {
  if (kind == OperatorKind::NormAdjacency)
    return [&g](const Vec& x) { return g.norm_adjacency_matvec(x); };
  return [&g](const Vec& x) { return g.norm_laplacian_matvec(x); };
}

}  // namespace detail

inline constexpr int kDefaultDenseCap = 4096;

/// Full symmetric eigendecomposition, ordered by `sel`. Ground truth for the
/// truncated path and for the distance oracles.
inline SpectralBasis eig_dense(const Graph& g, OperatorKind kind,
                               Selection sel = Selection::LargestAbs,
                               int dense_cap = kDefaultDenseCap) {
  require(g.n() <= dense_cap,
          "eig_dense: n = " + std::to_string(g.n()) + " exceeds dense cap " +
              std::to_string(dense_cap) + "; use eig_truncated");
  Mat M = kind == OperatorKind::NormAdjacency ? g.dense_norm_adjacency()
                                              : g.dense_norm_laplacian();
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  require(es.info() == Eigen::Success, "eig_dense: eigensolver failed");
  auto order = detail::selection_order(es.eigenvalues(), sel);
  SpectralBasis basis;
  basis.operator_kind = kind;
  basis.selection = sel;
  basis.kappa = g.n();
  basis.eigenvalues.resize(g.n());
  basis.eigenvectors.resize(g.n(), g.n());
  for (int k = 0; k < g.n(); ++k) {
    basis.eigenvalues[k] = es.eigenvalues()[order[static_cast<size_t>(k)]];
    basis.eigenvectors.col(k) = es.eigenvectors().col(order[static_cast<size_t>(k)]);
  }
  return basis;
}

// =============================================================================
// Lanczos with full reorthogonalization.
//
// Builds a Krylov basis V with explicit two-pass Gram-Schmidt against all
// previous vectors, keeps the applied images M*V, and performs Rayleigh-Ritz
// on T = V' (M V). Near-breakdowns restart with a fresh random direction
// orthogonal to the current basis, so the iteration can exhaust the whole
// space (kappa = n is exact). Residuals are computed explicitly per retained
// pair, never estimated.
// =============================================================================
inline SpectralBasis eig_truncated(const Graph& g, OperatorKind kind,
                                   Selection sel, int kappa,
                                   int max_iters = 0, double tol = 1e-10,
                                   std::uint64_t seed = 12345) {
  const int n = g.n();
  require(kappa >= 1 && kappa <= n, "eig_truncated: kappa out of [1, n]");
  if (max_iters <= 0) max_iters = std::min(n, std::max(8 * kappa + 40, 200));
  max_iters = std::min(max_iters, n);
  auto mv = detail::operator_matvec(g, kind);

  Rng rng(seed, static_cast<std::uint64_t>(kind) * 2 +
                    static_cast<std::uint64_t>(sel));
  std::vector<Vec> V, MV;
  auto orthonormalize = [&](Vec v) -> Vec {
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : V) v -= q.dot(v) * q;
    double nrm = v.norm();
    if (nrm < 1e-12) return Vec();  // caller restarts
    return v / nrm;
  };
  auto random_unit = [&] {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return Vec(v / v.norm());
  };

  Vec v = random_unit();
  Mat T = Mat::Zero(max_iters, max_iters);

  int target = kappa;
  Vec ritz_vals;
  Mat ritz_vecs_small;
  std::vector<int> picked;
  double worst_residual = std::numeric_limits<double>::infinity();

  while (static_cast<int>(V.size()) < max_iters) {
    V.push_back(v);
    MV.push_back(mv(v));
    const int m = static_cast<int>(V.size());
    for (int i = 0; i < m; ++i) {
      double tij = V[static_cast<size_t>(i)].dot(MV.back());
      T(i, m - 1) = tij;
      T(m - 1, i) = tij;
    }

    bool check_now = m >= std::min(target + 2, n) &&
                     (m % 5 == 0 || m == max_iters || m == n);
    if (check_now) {
      Eigen::SelfAdjointEigenSolver<Mat> es(T.topLeftCorner(m, m));
      auto order = detail::selection_order(es.eigenvalues(), sel);
      // extend target across degenerate clusters at the truncation boundary
      target = kappa;
      while (target < m && target < n &&
             std::abs(es.eigenvalues()[order[static_cast<size_t>(target - 1)]] -
                      es.eigenvalues()[order[static_cast<size_t>(target)]]) <
                 1e-10)
        ++target;
      // trusting the boundary gap needs a converged pair beyond it; Lanczos
      // only surfaces repeated eigenvalues after restarts, so keep iterating
      // until the (target+1)-th Ritz pair is available (or the space is
      // exhausted)
      int guard = target < n ? target + 1 : target;
      if (guard <= m) {
        worst_residual = 0.0;
        picked.assign(order.begin(), order.begin() + guard);
        ritz_vals.resize(guard);
        for (int k = 0; k < guard; ++k) {
          int j = picked[static_cast<size_t>(k)];
          ritz_vals[k] = es.eigenvalues()[j];
          Vec y = Vec::Zero(n), my = Vec::Zero(n);
          for (int i = 0; i < m; ++i) {
            y += es.eigenvectors()(i, j) * V[static_cast<size_t>(i)];
            my += es.eigenvectors()(i, j) * MV[static_cast<size_t>(i)];
          }
          worst_residual =
              std::max(worst_residual, (my - ritz_vals[k] * y).norm());
        }
        if (worst_residual <= tol || m == n) {
          if (m == n && worst_residual > tol && worst_residual > 1e-8)
            fail("eig_truncated: stagnated at full dimension, worst residual " +
                 format_double(worst_residual));
          SpectralBasis basis;
          basis.operator_kind = kind;
          basis.selection = sel;
          basis.kappa = target;
          basis.seed = seed;
          basis.eigenvalues = ritz_vals.head(target);
          basis.eigenvectors.resize(n, target);
          for (int k = 0; k < target; ++k) {
            int j = picked[static_cast<size_t>(k)];
            Vec y = Vec::Zero(n);
            for (int i = 0; i < m; ++i)
              y += es.eigenvectors()(i, j) * V[static_cast<size_t>(i)];
            basis.eigenvectors.col(k) = y / y.norm();
          }
          return basis;
        }
      }
    }

    if (static_cast<int>(V.size()) == max_iters) break;
    Vec w = MV.back();
    v = orthonormalize(std::move(w));
    while (v.size() == 0) {  // invariant subspace hit; deflate and continue
      if (static_cast<int>(V.size()) >= n) break;
      v = orthonormalize(random_unit());
    }
    if (v.size() == 0) break;
  }
  fail("eig_truncated: no convergence within " + std::to_string(max_iters) +
       " iterations, worst residual " + format_double(worst_residual));
}

/// pi with pi_i = sqrt(d_i / sum_k d_k): the top A_hat eigenvector direction
/// on connected graphs (eigenvalue 1).
inline Vec stationary_direction(const Graph& g) {
  Vec pi(g.n());
  double total = 0.0;
  for (double d : g.degrees()) total += d;
  for (int i = 0; i < g.n(); ++i) pi[i] = std::sqrt(g.degree(i) / total);
  return pi;
}

// =============================================================================
// Basis cache file:
//   #spectral v1 kind=<k> sel=<s> kappa=<kappa> seed=<seed>
//   kappa eigenvalues, then n x kappa eigenvector entries row-major,
//   whitespace-separated, 17 significant digits. Round-trips bit-exactly.
// =============================================================================

inline void save_basis(std::ostream& out, const SpectralBasis& b) {
  out << "#spectral v1 kind=" << to_string(b.operator_kind)
      << " sel=" << to_string(b.selection) << " kappa=" << b.kappa
      << " seed=" << b.seed << "\n";
  for (int k = 0; k < b.kappa; ++k)
    out << format_double(b.eigenvalues[k]) << (k + 1 == b.kappa ? "\n" : " ");
  for (int i = 0; i < b.eigenvectors.rows(); ++i) {
    for (int k = 0; k < b.kappa; ++k)
      out << format_double(b.eigenvectors(i, k)) << (k + 1 == b.kappa ? "\n" : " ");
  }
}

inline SpectralBasis load_basis(std::istream& in, int n) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)),
          "basis cache: missing header");
  require(header.rfind("#spectral v1 ", 0) == 0, "basis cache: bad header");
  auto field = [&](const std::string& key) {
    auto pos = header.find(key + "=");
    require(pos != std::string::npos, "basis cache: missing field " + key);
    auto end = header.find(' ', pos);
    return header.substr(pos + key.size() + 1, end - pos - key.size() - 1);
  };
  SpectralBasis b;
  b.operator_kind = field("kind") == "norm_adjacency" ? OperatorKind::NormAdjacency
                                                      : OperatorKind::NormLaplacian;
  std::string sel = field("sel");
  b.selection = sel == "largest_abs"         ? Selection::LargestAbs
                : sel == "largest_algebraic" ? Selection::LargestAlgebraic
                                             : Selection::SmallestAlgebraic;
  b.kappa = std::stoi(field("kappa"));
  b.seed = std::stoull(field("seed"));
  b.eigenvalues.resize(b.kappa);
  for (int k = 0; k < b.kappa; ++k)
    require(static_cast<bool>(in >> b.eigenvalues[k]),
            "basis cache: truncated eigenvalues");
  b.eigenvectors.resize(n, b.kappa);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < b.kappa; ++k)
      require(static_cast<bool>(in >> b.eigenvectors(i, k)),
              "basis cache: truncated eigenvectors");
  return b;
}

}  // namespace ddsm
