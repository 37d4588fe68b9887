#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ddsm/spectral.hpp"

using namespace ddsm;

namespace {
Graph cycle(int n) {
  std::vector<std::tuple<int, int, double>> es;
  for (int v = 0; v < n; ++v) es.emplace_back(v, (v + 1) % n, 1.0);
  return Graph::build(es, n);
}
}  // namespace

TEST_CASE("dense spectra of hand-solved graphs") {
  Graph k2 = Graph::build({{0, 1, 1.0}}, 2);
  SpectralBasis b = eig_dense(k2, OperatorKind::NormAdjacency);
  // |1| ties |-1|; the larger algebraic value wins
  CHECK(b.eigenvalues[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(b.eigenvalues[1] == Catch::Approx(-1.0).margin(1e-12));

  Graph tri = Graph::build({{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, 3);
  SpectralBasis t = eig_dense(tri, OperatorKind::NormAdjacency,
                              Selection::LargestAlgebraic);
  CHECK(t.eigenvalues[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(t.eigenvalues[1] == Catch::Approx(-0.5).margin(1e-12));
  CHECK(t.eigenvalues[2] == Catch::Approx(-0.5).margin(1e-12));

  // C6 spectrum: cos(2 pi k / 6)
  SpectralBasis c = eig_dense(cycle(6), OperatorKind::NormAdjacency,
                              Selection::LargestAlgebraic);
  Vec expect(6);
  expect << 1.0, 0.5, 0.5, -0.5, -0.5, -1.0;
  CHECK((c.eigenvalues - expect).cwiseAbs().maxCoeff() < 1e-12);

  // normalized Laplacian eigenvalues are 1 - adjacency eigenvalues
  SpectralBasis l = eig_dense(cycle(6), OperatorKind::NormLaplacian,
                              Selection::SmallestAlgebraic);
  for (int k = 0; k < 6; ++k)
    CHECK(l.eigenvalues[k] == Catch::Approx(1.0 - c.eigenvalues[k]).margin(1e-12));
}

TEST_CASE("selection orderings") {
  Vec lam(4);
  lam << 0.9, -0.95, 0.2, -0.2;
  auto abs_order = detail::selection_order(lam, Selection::LargestAbs);
  CHECK(abs_order[0] == 1);
  CHECK(abs_order[1] == 0);
  CHECK(abs_order[2] == 2);  // |0.2| tie resolved toward larger algebraic
  CHECK(abs_order[3] == 3);
  auto alg = detail::selection_order(lam, Selection::LargestAlgebraic);
  CHECK(alg[0] == 0);
  CHECK(alg[3] == 1);
  auto small = detail::selection_order(lam, Selection::SmallestAlgebraic);
  CHECK(small[0] == 1);
}

TEST_CASE("dense cap error") {
  Graph g = random_connected_graph(12, 4, 5);
  CHECK_THROWS_WITH(eig_dense(g, OperatorKind::NormAdjacency,
                              Selection::LargestAbs, /*dense_cap=*/8),
                    Catch::Matchers::ContainsSubstring("eig_truncated"));
}

TEST_CASE("iterative solver matches dense on all selections") {
  for (std::uint64_t s : {10ull, 11ull, 12ull}) {
    Graph g = random_connected_graph(60, 30, s);
    for (auto [kind, sel] :
         {std::pair{OperatorKind::NormAdjacency, Selection::LargestAbs},
          std::pair{OperatorKind::NormAdjacency, Selection::LargestAlgebraic},
          std::pair{OperatorKind::NormLaplacian, Selection::SmallestAlgebraic}}) {
      SpectralBasis lan = eig_truncated(g, kind, sel, 8);
      SpectralBasis den = eig_dense(g, kind, sel);
      REQUIRE(lan.kappa >= 8);
      for (int k = 0; k < 8; ++k) {
        CHECK(std::abs(lan.eigenvalues[k] - den.eigenvalues[k]) < 1e-9);
        Vec v = lan.eigenvectors.col(k);
        Vec mv = kind == OperatorKind::NormAdjacency
                     ? g.norm_adjacency_matvec(v)
                     : g.norm_laplacian_matvec(v);
        CHECK((mv - lan.eigenvalues[k] * v).norm() < 1e-9);
      }
      // retained columns stay orthonormal
      Mat G = lan.eigenvectors.transpose() * lan.eigenvectors;
      CHECK((G - Mat::Identity(lan.kappa, lan.kappa)).norm() < 1e-9);
    }
  }
}

TEST_CASE("full-dimension request is exact") {
  Graph g = random_connected_graph(14, 6, 3);
  SpectralBasis lan = eig_truncated(g, OperatorKind::NormAdjacency,
                                    Selection::LargestAbs, g.n());
  SpectralBasis den = eig_dense(g, OperatorKind::NormAdjacency);
  REQUIRE(lan.kappa == g.n());
  CHECK((lan.eigenvalues - den.eigenvalues).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("degenerate clusters are not split") {
  // C6 has eigenvalue 0.5 with multiplicity two; asking for kappa=2 under
  // LargestAlgebraic would cut inside the pair, so the basis must grow
  SpectralBasis b = eig_truncated(cycle(6), OperatorKind::NormAdjacency,
                                  Selection::LargestAlgebraic, 2);
  CHECK(b.kappa >= 3);
  CHECK(b.eigenvalues[1] == Catch::Approx(0.5).margin(1e-9));
  CHECK(b.eigenvalues[2] == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("stationary direction is the top eigenvector") {
  Graph g = random_connected_graph(25, 12, 9);
  Vec pi = stationary_direction(g);
  CHECK(pi.norm() == Catch::Approx(1.0).margin(1e-12));
  CHECK((g.norm_adjacency_matvec(pi) - pi).norm() < 1e-12);
}

TEST_CASE("basis cache round trip is bit exact") {
  Graph g = random_connected_graph(20, 8, 21);
  SpectralBasis b = eig_truncated(g, OperatorKind::NormLaplacian,
                                  Selection::SmallestAlgebraic, 5, 0, 1e-10, 777);
  std::stringstream ss;
  save_basis(ss, b);
  SpectralBasis r = load_basis(ss, g.n());
  CHECK(r.operator_kind == b.operator_kind);
  CHECK(r.selection == b.selection);
  CHECK(r.kappa == b.kappa);
  CHECK(r.seed == 777);
  CHECK((r.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);

  std::stringstream bad("#wrong header\n");
  CHECK_THROWS_AS(load_basis(bad, 3), Error);
}
