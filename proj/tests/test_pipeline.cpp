#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ddsm/pipeline.hpp"

using namespace ddsm;

namespace {
EdgeDistances zero_delta(const Graph& g) {
  EdgeDistances d;
  d.kind = DistanceKind::simple(DistanceVariant::Zero);
  d.values = Vec::Zero(g.m());
  return d;
}
Mat random_mat(int n, int d, std::uint64_t seed) {
  Mat H(n, d);
  Rng r(seed);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) H(i, j) = r.normal();
  return H;
}
}  // namespace

TEST_CASE("stratified splits") {
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) labels.push_back(i % 2);
  SplitSpec s = make_splits(labels, 5);
  CHECK(s.train.size() == 30);
  CHECK(s.val.size() == 10);
  CHECK(s.test.size() == 10);
  // stratification: 15 train nodes per class
  int c0 = 0;
  for (int i : s.train) c0 += labels[static_cast<size_t>(i)] == 0;
  CHECK(c0 == 15);
  // determinism and seed sensitivity
  SplitSpec s2 = make_splits(labels, 5);
  CHECK(s.train == s2.train);
  SplitSpec s3 = make_splits(labels, 6);
  CHECK(s.train != s3.train);

  SplitSpec overlap = s;
  overlap.val.push_back(s.train[0]);
  CHECK_THROWS_WITH(overlap.validate(50, labels),
                    Catch::Matchers::ContainsSubstring("two splits"));
  SplitSpec missing;
  missing.train = {0, 2, 4};  // class 1 absent
  CHECK_THROWS_WITH(missing.validate(50, labels),
                    Catch::Matchers::ContainsSubstring("class 1"));
}

TEST_CASE("splits and labels io") {
  SplitSpec s;
  s.train = {0, 1};
  s.val = {2};
  s.test = {3};
  std::stringstream ss;
  save_splits(ss, s);
  SplitSpec r = load_splits(ss);
  CHECK(r.train == s.train);
  CHECK(r.val == s.val);
  CHECK(r.test == s.test);
  std::stringstream bad("0 dev\n");
  CHECK_THROWS_WITH(load_splits(bad),
                    Catch::Matchers::ContainsSubstring("unknown set"));
}

TEST_CASE("feature maps") {
  Mat X = random_mat(12, 6, 7);
  CHECK((apply_feature_map(X, FeatureMap::identity()) - X).norm() == 0.0);

  Mat P = apply_feature_map(X, FeatureMap::random_projection(3, 9));
  CHECK(P.rows() == 12);
  CHECK(P.cols() == 3);
  Mat P2 = apply_feature_map(X, FeatureMap::random_projection(3, 9));
  CHECK((P - P2).norm() == 0.0);

  Mat C = apply_feature_map(X, FeatureMap::truncated_pca(2));
  CHECK(C.cols() == 2);
  // principal scores are centered and uncorrelated across components
  CHECK(C.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(C.col(0).dot(C.col(1))) < 1e-9);
  // leading component carries at least as much variance
  CHECK(C.col(0).squaredNorm() >= C.col(1).squaredNorm());
  CHECK_THROWS_AS(apply_feature_map(X, FeatureMap::truncated_pca(7)), Error);
}

TEST_CASE("classifier gradient matches finite differences") {
  Mat H = random_mat(5, 3, 11);
  Mat A = detail::augment_ones(H);
  std::vector<int> labels{0, 1, 2, 1, 0};
  std::vector<int> rows{0, 1, 2, 3, 4};
  Mat W = 0.3 * random_mat(4, 3, 12);
  Mat G = classifier_grad(A, labels, rows, W, 0.01);
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < W.cols(); ++j) {
      Mat Wp = W, Wm = W;
      Wp(i, j) += h;
      Wm(i, j) -= h;
      double fd = (classifier_loss(A, labels, rows, Wp, 0.01) -
                   classifier_loss(A, labels, rows, Wm, 0.01)) /
                  (2 * h);
      worst = std::max(worst,
                       std::abs(fd - G(i, j)) / (1.0 + std::abs(G(i, j))));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("separable problem reaches full training accuracy") {
  // two well-separated feature clusters on a sparse graph, no propagation
  SbmSpec spec;
  spec.n = 30;
  spec.classes = 2;
  spec.p_in = 0.4;
  spec.p_out = 0.05;
  spec.feature_sep = 8.0;
  spec.seed = 3;
  auto [lg, X] = generate_sbm(spec);
  TrainConfig cfg;
  cfg.lr = 0.5;
  cfg.epochs = 500;
  cfg.prop.layers = 0;
  SplitSpec split = make_splits(lg.labels, 1);
  TrainResult res = fit_classifier(lg, X, zero_delta(lg.graph), cfg, split);
  CHECK(res.history.back().train_acc == 1.0);
  // repeat run is bit-identical
  TrainResult res2 = fit_classifier(lg, X, zero_delta(lg.graph), cfg, split);
  CHECK((res.weights - res2.weights).norm() == 0.0);
  CHECK(res.history.size() == res2.history.size());
}

TEST_CASE("ties in evaluation go to the lowest class") {
  Mat H = Mat::Zero(4, 2);
  Mat W = Mat::Zero(3, 3);  // all logits equal -> predict class 0
  std::vector<int> labels{0, 1, 0, 2};
  CHECK(evaluate(W, H, labels, {0, 1, 2, 3}) == 0.5);
}

TEST_CASE("plain smoothing pipeline matches a dense power implementation") {
  SbmSpec spec;
  spec.n = 24;
  spec.classes = 2;
  spec.p_in = 0.5;
  spec.p_out = 0.1;
  spec.seed = 8;
  auto [lg, X] = generate_sbm(spec);
  TrainConfig cfg;
  cfg.lr = 0.2;
  cfg.epochs = 120;
  cfg.prop.layers = 3;  // alpha = beta = eta = 0
  SplitSpec split = make_splits(lg.labels, 2);
  TrainResult res = fit_classifier(lg, X, zero_delta(lg.graph), cfg, split);

  // independent dense realization of the same pipeline
  Mat Ahat = lg.graph.dense_norm_adjacency();
  Mat H = X;
  for (int k = 0; k < 3; ++k) H = Ahat * H;
  CHECK((res.propagated - H).norm() < 1e-10);
  Mat A = detail::augment_ones(H);
  Mat W = Mat::Zero(A.cols(), lg.num_classes);
  for (int epoch = 0; epoch < res.best_epoch; ++epoch)
    W -= cfg.lr * classifier_grad(A, lg.labels, split.train, W, 0.0);
  Mat Z1 = detail::augment_ones(res.propagated) * res.weights;
  Mat Z2 = A * W;
  for (int i = 0; i < lg.graph.n(); ++i) {
    int a = 0, b = 0;
    for (int c = 1; c < lg.num_classes; ++c) {
      if (Z1(i, c) > Z1(i, a)) a = c;
      if (Z2(i, c) > Z2(i, b)) b = c;
    }
    CHECK(a == b);
  }
}

TEST_CASE("residual propagation matches the geometric closed form") {
  Graph g = random_connected_graph(14, 7, 17);
  Mat H0 = random_mat(g.n(), 3, 18);
  PropagationConfig cfg;
  cfg.alpha = 0.2;
  cfg.layers = 8;
  Mat H = propagate(g, H0, zero_delta(g), cfg);
  Mat Ahat = g.dense_norm_adjacency();
  // H^K = (1-a)^K Ahat^K H0 + a sum_{i<K} (1-a)^i Ahat^i H0
  Mat power = H0, closed = Mat::Zero(g.n(), 3);
  double coef = 1.0;
  for (int i = 0; i < 8; ++i) {
    closed += 0.2 * coef * power;
    power = Ahat * power;
    coef *= 0.8;
  }
  closed += coef * power;
  CHECK((H - closed).norm() < 1e-11);
}

TEST_CASE("divergence produces a helpful error") {
  SbmSpec spec;
  spec.n = 20;
  spec.classes = 2;
  spec.p_in = 0.5;
  spec.p_out = 0.1;
  spec.feature_sep = 50.0;
  spec.seed = 4;
  auto [lg, X] = generate_sbm(spec);
  TrainConfig cfg;
  cfg.lr = 1e12;
  cfg.weight_decay = 1.0;  // decay feedback at this lr overflows within epochs
  cfg.epochs = 50;
  cfg.prop.layers = 0;
  CHECK_THROWS_WITH(
      fit_classifier(lg, X, zero_delta(lg.graph), cfg, make_splits(lg.labels, 1)),
      Catch::Matchers::ContainsSubstring("learning rate"));
}

TEST_CASE("early stopping respects patience") {
  SbmSpec spec;
  spec.n = 30;
  spec.classes = 2;
  spec.p_in = 0.4;
  spec.p_out = 0.05;
  spec.feature_sep = 8.0;
  spec.seed = 9;
  auto [lg, X] = generate_sbm(spec);
  TrainConfig cfg;
  cfg.lr = 0.5;
  cfg.epochs = 5000;
  cfg.patience = 10;
  cfg.prop.layers = 0;
  TrainResult res = fit_classifier(lg, X, zero_delta(lg.graph), cfg,
                                   make_splits(lg.labels, 1));
  CHECK(res.history.size() < 5000);
  CHECK(res.history.size() >= static_cast<size_t>(res.best_epoch));
}

TEST_CASE("ablation table shape and determinism") {
  SbmSpec spec;
  spec.n = 30;
  spec.classes = 2;
  spec.p_in = 0.3;
  spec.p_out = 0.1;
  spec.seed = 12;
  auto [lg, X] = generate_sbm(spec);
  TrainConfig cfg;
  cfg.lr = 0.3;
  cfg.epochs = 60;
  cfg.prop.layers = 2;
  cfg.prop.eta = 0.5;
  cfg.prop.alpha = 0.1;
  std::vector<DistanceKind> kinds{DistanceKind::vdd(5),
                                  DistanceKind::simple(DistanceVariant::Zero)};
  AblationTable t1 = run_ablation(lg, X, kinds, 8, cfg, {1, 2, 3});
  REQUIRE(t1.rows.size() == 6);
  CHECK(t1.rows[0].kind == "vdd");
  CHECK(t1.rows[5].kind == "zero");
  AblationTable t2 = run_ablation(lg, X, kinds, 8, cfg, {1, 2, 3});
  for (size_t i = 0; i < t1.rows.size(); ++i)
    CHECK(t1.rows[i].test_accuracy == t2.rows[i].test_accuracy);

  // beta sweep doubles the arms for nonzero beta
  cfg.prop.beta = 0.05;
  AblationTable t3 = run_ablation(lg, X, kinds, 8, cfg, {1}, true);
  CHECK(t3.rows.size() == 4);
  std::stringstream ss;
  save_ablation_csv(ss, t3);
  CHECK(ss.str().rfind("kind,seed,beta,test_accuracy\n", 0) == 0);
}
