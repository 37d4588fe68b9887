#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ddsm/graph.hpp"

using namespace ddsm;

TEST_CASE("edge canonicalization and accessors") {
  Graph g = Graph::build({{1, 0, 1.0}, {0, 1, 1.0}, {1, 2, 2.0}}, 3);
  REQUIRE(g.n() == 3);
  REQUIRE(g.m() == 2);
  CHECK(g.edges()[0].u == 0);
  CHECK(g.edges()[0].v == 1);
  CHECK(g.edges()[1].w == 2.0);
  CHECK(g.degree(0) == 1.0);
  CHECK(g.degree(1) == 3.0);
  CHECK(g.degree(2) == 2.0);
  CHECK(g.min_degree() == 1.0);
  CHECK(g.edge_index(2, 1) == 1);
  CHECK(g.edge_index(0, 2) == -1);
  CHECK_FALSE(g.unweighted());
  auto nbr = g.neighbors(1);
  REQUIRE(nbr.size() == 2);
  CHECK(nbr[0] == 0);
  CHECK(nbr[1] == 2);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_WITH(Graph::build({{0, 3, 1.0}}, 3),
                    Catch::Matchers::ContainsSubstring("out of range"));
  CHECK_THROWS_WITH(Graph::build({{0, 1, -1.0}}, 2),
                    Catch::Matchers::ContainsSubstring("positive"));
  CHECK_THROWS_WITH(Graph::build({{0, 1, 1.0}, {1, 0, 2.0}}, 2),
                    Catch::Matchers::ContainsSubstring("conflicting"));
  CHECK_THROWS_WITH(Graph::build({{0, 0, 1.0}, {0, 1, 1.0}}, 2),
                    Catch::Matchers::ContainsSubstring("self-loop"));
  CHECK_THROWS_WITH(Graph::build({{0, 1, 1.0}}, 3),
                    Catch::Matchers::ContainsSubstring("isolated node 2"));
}

TEST_CASE("self-loop flag patches every node") {
  Graph g = Graph::build({{0, 1, 1.0}}, 3, /*add_self_loops=*/true);
  REQUIRE(g.m() == 4);  // one edge + three loops
  CHECK(g.degree(2) == 1.0);
  CHECK(g.edge_index(2, 2) == 3);
  CHECK_FALSE(g.bipartite());  // loops are odd cycles
}

TEST_CASE("connectivity and bipartiteness") {
  Graph path = Graph::build({{0, 1, 1.0}, {1, 2, 1.0}}, 3);
  CHECK(path.connected());
  CHECK(path.bipartite());
  Graph triangle = Graph::build({{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, 3);
  CHECK_FALSE(triangle.bipartite());
  Graph two = Graph::build({{0, 1, 1.0}, {2, 3, 1.0}}, 4);
  CHECK_FALSE(two.connected());
  std::vector<std::tuple<int, int, double>> c4;
  for (int v = 0; v < 4; ++v) c4.emplace_back(v, (v + 1) % 4, 1.0);
  CHECK(Graph::build(c4, 4).bipartite());
}

TEST_CASE("normalized operators agree with dense forms") {
  Graph g = random_connected_graph(17, 9, 42);
  Mat Ahat = g.dense_norm_adjacency();
  Mat Lhat = g.dense_norm_laplacian();
  Rng r(7);
  Vec x(g.n());
  for (int i = 0; i < g.n(); ++i) x[i] = r.normal();
  CHECK((g.norm_adjacency_matvec(x) - Ahat * x).norm() < 1e-13);
  CHECK((g.norm_laplacian_matvec(x) - Lhat * x).norm() < 1e-13);
  Mat X(g.n(), 3);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = r.normal();
  CHECK((g.norm_adjacency_mul(X) - Ahat * X).norm() < 1e-13);
  // row sums of the transition matrix are exactly 1
  Mat P = g.dense_transition();
  CHECK((P.rowwise().sum() - Vec::Ones(g.n())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("edge list io round trip") {
  Graph g = Graph::build({{0, 1, 1.5}, {1, 2, 1.0}}, 3);
  std::stringstream ss;
  save_edge_list(ss, g);
  Graph h = load_edge_list(ss);
  REQUIRE(h.n() == 3);
  REQUIRE(h.m() == 2);
  CHECK(h.edges()[0].w == 1.5);

  std::stringstream in("# comment\n0\t1\n\n2 0 2.5 # trailing\n");
  Graph p = load_edge_list(in);
  CHECK(p.n() == 3);
  CHECK(p.edges()[0].w == 1.0);  // default weight
  CHECK(p.edges()[1].w == 2.5);

  std::stringstream bad("0\n");
  CHECK_THROWS_WITH(load_edge_list(bad),
                    Catch::Matchers::ContainsSubstring("line 1"));
}

TEST_CASE("block model generator") {
  SbmSpec spec;
  spec.n = 40;
  spec.classes = 2;
  spec.p_in = 0.5;
  spec.p_out = 0.05;
  spec.seed = 11;
  auto [lg, X] = generate_sbm(spec);
  auto [lg2, X2] = generate_sbm(spec);
  CHECK(lg.graph.m() == lg2.graph.m());  // deterministic
  CHECK((X - X2).norm() == 0.0);
  CHECK(lg.num_classes == 2);
  CHECK(lg.labels[0] == 0);
  CHECK(lg.labels[39] == 1);
  CHECK(X.rows() == 40);
  CHECK(X.cols() == spec.feature_dim);
  // homophilic parameters produce mostly within-class edges
  int same = 0;
  for (const Edge& e : lg.graph.edges())
    if (lg.labels[(size_t)e.u] == lg.labels[(size_t)e.v]) ++same;
  CHECK(same > lg.graph.m() / 2);

  spec.p_in = 1.5;
  CHECK_THROWS_AS(generate_sbm(spec), Error);
}

TEST_CASE("random connected graph helper") {
  for (std::uint64_t s : {1ull, 2ull, 3ull}) {
    Graph g = random_connected_graph(30, 10, s);
    CHECK(g.connected());
    Graph h = random_connected_graph(30, 0, s, /*force_non_bipartite=*/true);
    CHECK(h.connected());
    CHECK_FALSE(h.bipartite());
  }
}

TEST_CASE("one-hot labels") {
  LabeledGraph lg(Graph::build({{0, 1, 1.0}, {1, 2, 1.0}}, 3), {2, 0, 2});
  CHECK(lg.num_classes == 3);
  Mat Y = lg.one_hot();
  CHECK(Y(0, 2) == 1.0);
  CHECK(Y(1, 0) == 1.0);
  CHECK(Y.sum() == 3.0);
  CHECK_THROWS_AS(LabeledGraph(Graph::build({{0, 1, 1.0}}, 2), {0}), Error);
}
