#pragma once

#include <json.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "ddsm/common.hpp"
#include "ddsm/distances.hpp"
#include "ddsm/graph.hpp"
#include "ddsm/metrics.hpp"
#include "ddsm/propagation.hpp"
#include "ddsm/spectral.hpp"

namespace ddsm {

using nlohmann::json;

// =============================================================================
// Property suites. Each returns a deterministic JSON report (no timestamps):
//   { "suite": ..., "pass": bool, "checks": [ {"name", "pass", ...}, ... ] }
// The CLI `check` subcommand and the acceptance harness both run these.
// =============================================================================

namespace detail {

/// Sparse corpus for the range-cap suite: random spanning tree plus a few
/// chords, n in [8, 64]. Kept sparse deliberately — the per-kind caps are
/// loose on trees and tighten as density grows.
inline Graph bounds_graph(int i) {
  int n = 8 + (i * 7) % 57;
  int extra = i % 4;
  return random_connected_graph(n, extra, 40000 + static_cast<std::uint64_t>(i));
}

inline std::vector<DistanceKind> cap_grid() {
  return {DistanceKind::vdd(1),    DistanceKind::vdd(5),
          DistanceKind::vdd(10),   DistanceKind::prdd(0.5),
          DistanceKind::prdd(0.9), DistanceKind::hkdd(0.1),
          DistanceKind::hkdd(1.0), DistanceKind::hkdd(10.0)};
}

inline json finish(json& report) {
  bool pass = true;
  for (const auto& c : report["checks"]) pass = pass && c["pass"].get<bool>();
  report["pass"] = pass;
  return report;
}

}  // namespace detail

/// Range caps for all three diffusion kinds across a sparse corpus, plus the
/// sqrt(2) heat-kernel cap on regular graphs, plus the two-sided truncation
/// sandwich at several cutoffs.
inline json suite_bounds(int cap_graphs = 200, int sandwich_graphs = 50) {
  json report{{"suite", "bounds"}, {"checks", json::array()}};

  double worst_ratio = 0.0;
  std::string worst_case;
  bool caps_ok = true;
  for (int i = 0; i < cap_graphs; ++i) {
    Graph g = detail::bounds_graph(i);
    for (const DistanceKind& kind : detail::cap_grid()) {
      RangeReport r = check_ranges(g, exact_diffusion_oracle(g, kind));
      if (r.max_ratio > worst_ratio) {
        worst_ratio = r.max_ratio;
        worst_case = kind.name() + "(" + kind.params() + ") graph " +
                     std::to_string(i);
      }
      caps_ok = caps_ok && r.ok();
    }
  }
  report["checks"].push_back({{"name", "distance_caps"},
                              {"pass", caps_ok},
                              {"graphs", cap_graphs},
                              {"worst_ratio", worst_ratio},
                              {"worst_case", worst_case}});

  // regular graphs: the literal heat-kernel series stays below sqrt(2)
  bool reg_ok = true;
  double reg_worst = 0.0;
  for (int n : {4, 5, 6, 9, 12, 17, 24, 33}) {
    std::vector<std::tuple<int, int, double>> cyc;
    for (int v = 0; v < n; ++v) cyc.emplace_back(v, (v + 1) % n, 1.0);
    Graph g = Graph::build(cyc, n);
    for (double gamma : {0.1, 1.0, 10.0}) {
      double mx = hkdd_series_literal(g, gamma).values.maxCoeff();
      reg_worst = std::max(reg_worst, mx / std::sqrt(2.0));
      reg_ok = reg_ok && mx <= std::sqrt(2.0) + 1e-9;
    }
  }
  report["checks"].push_back({{"name", "heat_kernel_regular_cap"},
                              {"pass", reg_ok},
                              {"worst_ratio", reg_worst}});

  double worst_upper = -1.0, worst_lower = -1.0;
  bool sandwich_ok = true, exact_ok = true;
  double worst_exact_gap = 0.0;
  for (int i = 0; i < sandwich_graphs; ++i) {
    Graph g = detail::bounds_graph(3 * i + 1);
    int n = g.n();
    for (const DistanceKind& kind :
         {DistanceKind::vdd(5), DistanceKind::prdd(0.9),
          DistanceKind::hkdd(1.0)}) {
      for (int kappa : {1, (n + 3) / 4, (n + 1) / 2, n}) {
        TruncationReport tr = check_truncation_bound(g, kind, kappa);
        worst_upper = std::max(worst_upper, tr.max_upper_violation);
        worst_lower = std::max(worst_lower, tr.max_lower_violation);
        sandwich_ok = sandwich_ok && tr.ok();
        if (kappa == n) {
          // full basis: truncated equals exact
          double gap = std::abs(tr.max_upper_violation);
          worst_exact_gap = std::max(worst_exact_gap, gap);
          exact_ok = exact_ok && gap <= 1e-10;
        }
      }
    }
  }
  report["checks"].push_back({{"name", "truncation_sandwich"},
                              {"pass", sandwich_ok},
                              {"graphs", sandwich_graphs},
                              {"worst_upper_violation", worst_upper},
                              {"worst_lower_violation", worst_lower}});
  report["checks"].push_back({{"name", "full_basis_equality"},
                              {"pass", exact_ok},
                              {"worst_gap", worst_exact_gap}});
  return detail::finish(report);
}

/// The layer update equals a half-gradient descent step of its potential:
/// ddsm_layer(H) - H = -1/2 grad(L), checked against central differences on
/// random instances with the raw third term.
inline json suite_gradient(int instances = 100) {
  json report{{"suite", "gradient"}, {"checks", json::array()}};
  double worst_rel = 0.0;
  bool ok = true;
  for (int i = 0; i < instances; ++i) {
    Rng r(77000 + static_cast<std::uint64_t>(i));
    int n = 6 + static_cast<int>(r.uniform_int(11));  // <= 16
    int d = 2 + static_cast<int>(r.uniform_int(4));   // <= 5
    Graph g = random_connected_graph(n, 1 + static_cast<int>(r.uniform_int(5)),
                                     50000 + static_cast<std::uint64_t>(i));
    Mat H(n, d), H0(n, d);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < d; ++b) {
        H(a, b) = r.normal();
        H0(a, b) = r.normal();
      }
    EdgeDistances delta;
    delta.kind = DistanceKind::vdd(2);
    delta.values.resize(g.m());
    for (int e = 0; e < g.m(); ++e) delta.values[e] = 0.1 + 1.9 * r.uniform();

    PropagationConfig cfg;
    cfg.alpha = 0.3 * r.uniform();
    cfg.beta = 0.3 * r.uniform();
    cfg.eta = 0.5 * r.uniform();
    cfg.eps_denom = 1e-14;  // distinct normalized rows keep denominators large
    cfg.third_term = ThirdTerm::Raw;

    Mat step = ddsm_layer(g, H, H0, delta, cfg) - H;
    Mat grad(n, d);
    const double h = 1e-6;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < d; ++b) {
        Mat Hp = H, Hm = H;
        Hp(a, b) += h;
        Hm(a, b) -= h;
        grad(a, b) = (update_potential(g, Hp, H0, delta, cfg) -
                      update_potential(g, Hm, H0, delta, cfg)) /
                     (2.0 * h);
      }
    double rel = (step + 0.5 * grad).norm() / (1.0 + grad.norm());
    worst_rel = std::max(worst_rel, rel);
    ok = ok && rel <= 1e-4;
  }
  report["checks"].push_back({{"name", "half_gradient_step"},
                              {"pass", ok},
                              {"instances", instances},
                              {"worst_relative_error", worst_rel}});
  return detail::finish(report);
}

/// Repeated-smoothing limits (stationary direction, rank-one Gram collapse)
/// and the homophily/Dirichlet identity.
inline json suite_limits(int limit_graphs = 20, int identity_graphs = 50) {
  json report{{"suite", "limits"}, {"checks", json::array()}};

  bool lim_ok = true;
  double worst_res = 0.0, worst_sv = 0.0, worst_gram = 0.0;
  for (int i = 0; i < limit_graphs; ++i) {
    Graph g = random_connected_graph(6 + (i * 5) % 40, 3 + i % 5,
                                     60000 + static_cast<std::uint64_t>(i),
                                     /*force_non_bipartite=*/true);
    Rng r(61000 + static_cast<std::uint64_t>(i));
    Mat H0(g.n(), 4);
    for (int a = 0; a < g.n(); ++a)
      for (int b = 0; b < 4; ++b) H0(a, b) = r.normal();
    H0 /= H0.norm();  // unit scale so tolerances are absolute
    LimitReport rep = check_oversmoothing_limit(g, H0, 100000, 1e-6);
    worst_res = std::max(worst_res, rep.limit_residual);
    worst_sv = std::max(worst_sv, rep.sv_ratio);
    worst_gram = std::max(worst_gram, rep.gram_residual);
    lim_ok = lim_ok && rep.ok(1e-6);
  }
  report["checks"].push_back({{"name", "smoothing_limit"},
                              {"pass", lim_ok},
                              {"graphs", limit_graphs},
                              {"worst_limit_residual", worst_res},
                              {"worst_sv_ratio", worst_sv},
                              {"worst_gram_residual", worst_gram}});

  bool id_ok = true;
  double worst_gap = 0.0;
  for (int i = 0; i < identity_graphs; ++i) {
    Graph g = random_connected_graph(5 + (i * 3) % 50, i % 6,
                                     62000 + static_cast<std::uint64_t>(i));
    Rng r(63000 + static_cast<std::uint64_t>(i));
    std::vector<int> labels(static_cast<size_t>(g.n()));
    int classes = 2 + static_cast<int>(r.uniform_int(3));
    for (int a = 0; a < g.n(); ++a)
      labels[static_cast<size_t>(a)] = static_cast<int>(r.uniform_int(
          static_cast<std::uint64_t>(classes)));
    HomophilyIdentityReport rep =
        verify_homophily_identity(LabeledGraph(g, labels));
    worst_gap = std::max(worst_gap, rep.gap);
    id_ok = id_ok && rep.ok(1e-12);
  }
  report["checks"].push_back({{"name", "homophily_identity"},
                              {"pass", id_ok},
                              {"graphs", identity_graphs},
                              {"worst_gap", worst_gap}});
  return detail::finish(report);
}

/// Full-basis truncated distances agree with the dense series/power oracles:
/// all three kinds everywhere, plus the literal heat-kernel series on regular
/// graphs where it coincides with the spectral form.
inline json suite_oracle(int graphs = 15) {
  json report{{"suite", "oracle"}, {"checks", json::array()}};
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < graphs; ++i) {
    Graph g = random_connected_graph(6 + (i * 4) % 30, 2 + i % 4,
                                     70000 + static_cast<std::uint64_t>(i));
    for (const DistanceKind& kind :
         {DistanceKind::vdd(3), DistanceKind::vdd(10), DistanceKind::prdd(0.5),
          DistanceKind::prdd(0.9), DistanceKind::hkdd(1.0),
          DistanceKind::hkdd(10.0)}) {
      EdgeDistances spectral = spectral_distances(g, kind, g.n());
      EdgeDistances oracle = exact_diffusion_oracle(g, kind);
      double gap = (spectral.values - oracle.values).cwiseAbs().maxCoeff();
      worst = std::max(worst, gap);
      ok = ok && gap <= 1e-9;
    }
  }
  report["checks"].push_back({{"name", "spectral_vs_series"},
                              {"pass", ok},
                              {"graphs", graphs},
                              {"worst_gap", worst}});

  bool reg_ok = true;
  double reg_worst = 0.0;
  for (int n : {5, 8, 13, 20}) {
    std::vector<std::tuple<int, int, double>> cyc;
    for (int v = 0; v < n; ++v) cyc.emplace_back(v, (v + 1) % n, 1.0);
    Graph g = Graph::build(cyc, n);
    for (double gamma : {0.5, 2.0}) {
      DistanceKind kind = DistanceKind::hkdd(gamma);
      EdgeDistances spectral = spectral_distances(g, kind, n);
      EdgeDistances literal = hkdd_series_literal(g, gamma);
      // on a d-regular graph the literal series is sqrt(d) x spectral
      double gap = (std::sqrt(2.0) * spectral.values - literal.values)
                       .cwiseAbs()
                       .maxCoeff();
      reg_worst = std::max(reg_worst, gap);
      reg_ok = reg_ok && gap <= 1e-9;
    }
  }
  report["checks"].push_back({{"name", "heat_kernel_regular_agreement"},
                              {"pass", reg_ok},
                              {"worst_gap", reg_worst}});
  return detail::finish(report);
}

/// Iterative eigensolver vs dense decomposition: eigenvalue agreement and
/// explicit residuals, both operators, all selection rules.
inline json suite_eigen(int graphs = 30) {
  json report{{"suite", "eigen"}, {"checks", json::array()}};
  double worst_eval = 0.0, worst_res = 0.0;
  bool ok = true;
  for (int i = 0; i < graphs; ++i) {
    int n = 16 + (i * 29) % 241;  // up to 256
    Graph g = random_connected_graph(n, n / 4,
                                     80000 + static_cast<std::uint64_t>(i));
    int kappa = std::min(32, std::max(4, n / 8));
    for (auto [kind, sel] :
         {std::pair{OperatorKind::NormAdjacency, Selection::LargestAbs},
          std::pair{OperatorKind::NormAdjacency, Selection::LargestAlgebraic},
          std::pair{OperatorKind::NormLaplacian, Selection::SmallestAlgebraic}}) {
      SpectralBasis lanczos = eig_truncated(g, kind, sel, kappa);
      SpectralBasis dense = eig_dense(g, kind, sel);
      for (int k = 0; k < kappa; ++k) {
        double gap = std::abs(lanczos.eigenvalues[k] - dense.eigenvalues[k]);
        worst_eval = std::max(worst_eval, gap);
        ok = ok && gap <= 1e-8;
        Vec v = lanczos.eigenvectors.col(k);
        Vec mv = kind == OperatorKind::NormAdjacency
                     ? g.norm_adjacency_matvec(v)
                     : g.norm_laplacian_matvec(v);
        double res = (mv - lanczos.eigenvalues[k] * v).norm();
        worst_res = std::max(worst_res, res);
        ok = ok && res <= 1e-8;
      }
    }
  }
  report["checks"].push_back({{"name", "lanczos_vs_dense"},
                              {"pass", ok},
                              {"graphs", graphs},
                              {"worst_eigenvalue_gap", worst_eval},
                              {"worst_residual", worst_res}});
  return detail::finish(report);
}

/// Empirical perturbation stability: the max distance change shrinks (weakly)
/// with the perturbation magnitude in at least 90% of trials, and a zero
/// perturbation changes nothing.
inline json suite_stability(int trials = 50) {
  json report{{"suite", "stability"}, {"checks", json::array()}};
  int monotone = 0, total = 0;
  for (int gi = 0; gi < 5; ++gi) {
    Graph g = random_connected_graph(20 + 6 * gi, 8 + gi,
                                     90000 + static_cast<std::uint64_t>(gi));
    StabilityReport rep = perturbation_stability_probe(
        g, DistanceKind::vdd(5), 3, trials / 5,
        91000 + static_cast<std::uint64_t>(gi));
    monotone += rep.monotone_trials;
    total += rep.trials;
  }
  double frac = total ? static_cast<double>(monotone) / total : 1.0;
  report["checks"].push_back({{"name", "monotone_in_magnitude"},
                              {"pass", frac >= 0.9},
                              {"trials", total},
                              {"monotone_fraction", frac}});

  Graph g = random_connected_graph(24, 10, 92000);
  EdgeDistances a = exact_distances(g, DistanceKind::vdd(5));
  EdgeDistances b = exact_distances(g, DistanceKind::vdd(5));
  double zero_change = (a.values - b.values).cwiseAbs().maxCoeff();
  report["checks"].push_back({{"name", "zero_perturbation_identity"},
                              {"pass", zero_change == 0.0},
                              {"max_change", zero_change}});
  return detail::finish(report);
}

inline json run_suite(const std::string& name) {
  if (name == "bounds") return suite_bounds();
  if (name == "gradient") return suite_gradient();
  if (name == "limits") return suite_limits();
  if (name == "oracle") return suite_oracle();
  if (name == "eigen") return suite_eigen();
  if (name == "stability") return suite_stability();
  if (name == "all") {
    json report{{"suite", "all"}, {"suites", json::array()}};
    bool pass = true;
    for (const char* s :
         {"bounds", "gradient", "limits", "oracle", "eigen", "stability"}) {
      json r = run_suite(s);
      pass = pass && r["pass"].get<bool>();
      report["suites"].push_back(std::move(r));
    }
    report["pass"] = pass;
    return report;
  }
  fail("unknown suite: " + name +
       " (expected bounds|gradient|limits|oracle|eigen|stability|all)");
}

}  // namespace ddsm
