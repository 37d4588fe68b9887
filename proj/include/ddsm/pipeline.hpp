#pragma once

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ddsm/common.hpp"
#include "ddsm/distances.hpp"
#include "ddsm/graph.hpp"
#include "ddsm/propagation.hpp"
#include "ddsm/rng.hpp"

namespace ddsm {

// =============================================================================
// Splits
// =============================================================================

struct SplitSpec {
  std::vector<int> train, val, test;
  std::uint64_t seed = 0;

  void validate(int n, const std::vector<int>& labels) const {
    std::vector<int> tag(static_cast<size_t>(n), -1);
    auto mark = [&](const std::vector<int>& idx, int t) {
      for (int i : idx) {
        require(i >= 0 && i < n, "split index out of range: " + std::to_string(i));
        require(tag[static_cast<size_t>(i)] == -1,
                "node " + std::to_string(i) + " appears in two splits");
        tag[static_cast<size_t>(i)] = t;
      }
    };
    mark(train, 0);
    mark(val, 1);
    mark(test, 2);
    require(!train.empty(), "train split is empty");
    int num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<char> seen(static_cast<size_t>(num_classes), 0);
    for (int i : train) seen[static_cast<size_t>(labels[static_cast<size_t>(i)])] = 1;
    for (int c = 0; c < num_classes; ++c)
      require(seen[static_cast<size_t>(c)],
              "class " + std::to_string(c) + " missing from train split");
  }
};

/// Stratified split: per class, a seeded shuffle assigns the first
/// train_frac to train, the next val_frac to val, the rest to test.
/// Defaults 60/20/20.
inline SplitSpec make_splits(const std::vector<int>& labels, std::uint64_t seed,
                             double train_frac = 0.6, double val_frac = 0.2) {
  require(train_frac > 0.0 && val_frac >= 0.0 && train_frac + val_frac < 1.0,
          "split fractions must satisfy 0 < train, 0 <= val, train+val < 1");
  std::map<int, std::vector<int>> by_class;
  for (size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(static_cast<int>(i));
  SplitSpec s;
  s.seed = seed;
  for (auto& [c, idx] : by_class) {
    Rng r(seed, 0x5917u + static_cast<std::uint64_t>(c));
    for (size_t k = idx.size(); k > 1; --k)
      std::swap(idx[k - 1], idx[r.uniform_int(k)]);
    size_t ntr = std::max<size_t>(
        1, static_cast<size_t>(std::floor(train_frac * idx.size())));
    size_t nva = static_cast<size_t>(std::floor(val_frac * idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) {
      if (k < ntr)
        s.train.push_back(idx[k]);
      else if (k < ntr + nva)
        s.val.push_back(idx[k]);
      else
        s.test.push_back(idx[k]);
    }
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  s.validate(static_cast<int>(labels.size()), labels);
  return s;
}

/// Splits file: `node<TAB>{train|val|test}` per line, '#' comments.
inline void save_splits(std::ostream& out, const SplitSpec& s) {
  for (int i : s.train) out << i << "\ttrain\n";
  for (int i : s.val) out << i << "\tval\n";
  for (int i : s.test) out << i << "\ttest\n";
}

inline SplitSpec load_splits(std::istream& in) {
  SplitSpec s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int node;
    std::string part;
    if (!(ls >> node)) continue;
    require(static_cast<bool>(ls >> part),
            "splits file line " + std::to_string(lineno) + ": missing set name");
    if (part == "train")
      s.train.push_back(node);
    else if (part == "val")
      s.val.push_back(node);
    else if (part == "test")
      s.test.push_back(node);
    else
      fail("splits file line " + std::to_string(lineno) + ": unknown set '" +
           part + "'");
  }
  return s;
}

inline void save_splits_file(const std::string& path, const SplitSpec& s) {
  std::ofstream out(path);
  require(out.good(), "cannot write splits: " + path);
  save_splits(out, s);
}

inline SplitSpec load_splits_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open splits: " + path);
  return load_splits(in);
}

/// Labels file: one integer class per line, row i = node i.
inline std::vector<int> load_labels_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open labels: " + path);
  std::vector<int> labels;
  int y;
  while (in >> y) labels.push_back(y);
  require(!labels.empty(), "labels file is empty: " + path);
  return labels;
}

inline void save_labels_file(const std::string& path,
                             const std::vector<int>& labels) {
  std::ofstream out(path);
  require(out.good(), "cannot write labels: " + path);
  for (int y : labels) out << y << '\n';
}

// =============================================================================
// Feature maps
// =============================================================================

enum class FeatureMapKind { Identity, RandomProjection, TruncatedPCA };

struct FeatureMap {
  FeatureMapKind kind = FeatureMapKind::Identity;
  int dim = 0;  // output dimension for projection / PCA
  std::uint64_t seed = 0;

  static FeatureMap identity() { return {}; }
  static FeatureMap random_projection(int d, std::uint64_t seed) {
    return {FeatureMapKind::RandomProjection, d, seed};
  }
  static FeatureMap truncated_pca(int d) {
    return {FeatureMapKind::TruncatedPCA, d, 0};
  }
};

inline Mat apply_feature_map(const Mat& X, const FeatureMap& fm) {
  switch (fm.kind) {
    case FeatureMapKind::Identity:
      return X;
    case FeatureMapKind::RandomProjection: {
      require(fm.dim > 0, "random projection needs a positive dimension");
      Mat W(X.cols(), fm.dim);
      Rng r(fm.seed, 0x9a0du);
      const double scale = 1.0 / std::sqrt(static_cast<double>(X.cols()));
      for (int i = 0; i < W.rows(); ++i)
        for (int j = 0; j < W.cols(); ++j) W(i, j) = scale * r.normal();
      return X * W;
    }
    default: {  // TruncatedPCA
      require(fm.dim > 0 && fm.dim <= X.cols(),
              "pca dimension must lie in [1, feature count]");
      Mat C = X.rowwise() - X.colwise().mean();
      Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeThinV);
      return C * svd.matrixV().leftCols(fm.dim);
    }
  }
}

// =============================================================================
// Softmax classifier, full-batch gradient descent, manual gradients.
// Weights are (d+1) x C with a bias row; rows of H are augmented with 1.
// =============================================================================

struct TrainConfig {
  double lr = 0.1;
  double weight_decay = 0.0;
  int epochs = 200;
  int patience = 0;  // 0 disables early stopping
  FeatureMap feature_map;
  PropagationConfig prop;

  void validate() const {
    require(lr > 0.0, "learning rate must be positive");
    require(weight_decay >= 0.0, "weight decay must be nonnegative");
    require(epochs > 0, "epoch count must be positive");
    require(patience >= 0, "patience must be nonnegative");
    prop.validate();
  }
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
};

struct TrainResult {
  Mat weights;  // (d+1) x C, last row is the bias
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_val_acc = 0.0;
  Mat propagated;  // H after propagation, reused for evaluation
};

namespace detail {

inline Mat augment_ones(const Mat& H) {
  Mat A(H.rows(), H.cols() + 1);
  A.leftCols(H.cols()) = H;
  A.col(H.cols()).setOnes();
  return A;
}

inline Mat softmax_rows(const Mat& Z) {
  Mat P = Z;
  for (int i = 0; i < P.rows(); ++i) {
    P.row(i).array() -= P.row(i).maxCoeff();
    P.row(i) = P.row(i).array().exp();
    P.row(i) /= P.row(i).sum();
  }
  return P;
}

}  // namespace detail

/// Mean cross-entropy over the given rows plus (wd/2)||W||^2.
inline double classifier_loss(const Mat& H_aug, const std::vector<int>& labels,
                              const std::vector<int>& rows, const Mat& W,
                              double weight_decay) {
  double acc = 0.0;
  for (int i : rows) {
    Vec z = (H_aug.row(i) * W).transpose();
    double zmax = z.maxCoeff();
    double lse = zmax + std::log((z.array() - zmax).exp().sum());
    acc += lse - z[labels[static_cast<size_t>(i)]];
  }
  return acc / static_cast<double>(rows.size()) +
         0.5 * weight_decay * W.squaredNorm();
}

/// Closed-form gradient of classifier_loss: H'(P - Y)/|rows| + wd W.
inline Mat classifier_grad(const Mat& H_aug, const std::vector<int>& labels,
                           const std::vector<int>& rows, const Mat& W,
                           double weight_decay) {
  Mat G = weight_decay * W;
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (int i : rows) {
    Vec z = (H_aug.row(i) * W).transpose();
    z.array() -= z.maxCoeff();
    Vec p = z.array().exp();
    p /= p.sum();
    p[labels[static_cast<size_t>(i)]] -= 1.0;
    G += inv * H_aug.row(i).transpose() * p.transpose();
  }
  return G;
}

/// Argmax-class accuracy; ties go to the lowest class index.
inline double evaluate(const Mat& W, const Mat& H,
                       const std::vector<int>& labels,
                       const std::vector<int>& rows) {
  if (rows.empty()) return 0.0;
  Mat Z = detail::augment_ones(H) * W;
  int correct = 0;
  for (int i : rows) {
    int arg = 0;
    for (int c = 1; c < Z.cols(); ++c)
      if (Z(i, c) > Z(i, arg)) arg = c;
    if (arg == labels[static_cast<size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

inline TrainResult fit_classifier(const LabeledGraph& lg, const Mat& X,
                                  const EdgeDistances& delta,
                                  const TrainConfig& cfg,
                                  const SplitSpec& split) {
  cfg.validate();
  split.validate(lg.graph.n(), lg.labels);
  require(X.rows() == lg.graph.n(), "feature row count mismatch");

  TrainResult res;
  Mat H0 = apply_feature_map(X, cfg.feature_map);
  res.propagated = propagate(lg.graph, H0, delta, cfg.prop);
  Mat A = detail::augment_ones(res.propagated);

  Mat W = Mat::Zero(A.cols(), lg.num_classes);
  Mat best_W = W;
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    W -= cfg.lr * classifier_grad(A, lg.labels, split.train, W,
                                  cfg.weight_decay);
    EpochStats st;
    st.epoch = epoch;
    st.loss = classifier_loss(A, lg.labels, split.train, W, cfg.weight_decay);
    require(std::isfinite(st.loss),
            "training diverged (loss is not finite); reduce the learning rate");
    st.train_acc = evaluate(W, res.propagated, lg.labels, split.train);
    st.val_acc = split.val.empty()
                     ? st.train_acc
                     : evaluate(W, res.propagated, lg.labels, split.val);
    res.history.push_back(st);
    if (st.val_acc > res.best_val_acc ||
        (epoch == 1 && res.history.size() == 1)) {
      res.best_val_acc = st.val_acc;
      res.best_epoch = epoch;
      best_W = W;
      since_best = 0;
    } else if (++since_best >= cfg.patience && cfg.patience > 0) {
      break;
    }
  }
  res.weights = best_W;
  return res;
}

// =============================================================================
// Ablation runner
// =============================================================================

struct AblationRow {
  std::string kind;
  std::uint64_t seed = 0;
  double beta = 0.0;
  double test_accuracy = 0.0;
};

struct AblationTable {
  std::vector<AblationRow> rows;

  double mean_accuracy(const std::string& kind, double beta) const {
    double acc = 0.0;
    int count = 0;
    for (const auto& r : rows)
      if (r.kind == kind && r.beta == beta) {
        acc += r.test_accuracy;
        ++count;
      }
    return count ? acc / count : 0.0;
  }
};

inline void save_ablation_csv(std::ostream& out, const AblationTable& table) {
  out << "kind,seed,beta,test_accuracy\n";
  for (const auto& r : table.rows)
    out << r.kind << ',' << r.seed << ',' << format_double(r.beta) << ','
        << format_double(r.test_accuracy) << '\n';
}

/// For every distance kind and seed: split, compute distances (truncated at
/// `kappa`, or exactly when kappa >= n), train, record test accuracy. When
/// `sweep_beta_zero` is set each arm is run twice, with the configured beta
/// and with beta = 0.
inline AblationTable run_ablation(const LabeledGraph& lg, const Mat& X,
                                  const std::vector<DistanceKind>& kinds,
                                  int kappa, const TrainConfig& cfg,
                                  const std::vector<std::uint64_t>& seeds,
                                  bool sweep_beta_zero = false) {
  cfg.validate();
  AblationTable table;
  for (const DistanceKind& kind : kinds) {
    EdgeDistances delta =
        kind.diffusion() && kappa < lg.graph.n()
            ? spectral_distances(lg.graph, kind, kappa)
            : exact_distances(lg.graph, kind);
    std::vector<double> betas{cfg.prop.beta};
    if (sweep_beta_zero && cfg.prop.beta != 0.0) betas.push_back(0.0);
    for (double beta : betas) {
      TrainConfig arm = cfg;
      arm.prop.beta = beta;
      for (std::uint64_t seed : seeds) {
        SplitSpec split = make_splits(lg.labels, seed);
        arm.feature_map.seed = seed;
        TrainResult res = fit_classifier(lg, X, delta, arm, split);
        table.rows.push_back(
            {kind.name(), seed, beta,
             evaluate(res.weights, res.propagated, lg.labels, split.test)});
      }
    }
  }
  return table;
}

}  // namespace ddsm
