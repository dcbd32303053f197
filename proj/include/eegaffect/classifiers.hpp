#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eegaffect/error.hpp"
#include "eegaffect/labeling.hpp"
#include "eegaffect/util.hpp"

namespace eegaffect {

enum class ClassifierKind { LinearSvm, RandomForest };

inline std::string_view to_string(ClassifierKind k) {
  return k == ClassifierKind::LinearSvm ? "svm" : "random_forest";
}

inline ClassifierKind parse_classifier(std::string_view s) {
  if (s == "svm" || s == "linear_svm") return ClassifierKind::LinearSvm;
  if (s == "random_forest" || s == "rf") return ClassifierKind::RandomForest;
  fail(ErrorCode::ConfigError, "unknown classifier '" + std::string(s) + "'");
}

struct TrainConfig {
  ClassifierKind kind = ClassifierKind::RandomForest;
  double c = 1.0;
  std::size_t n_trees = 500;
  std::size_t mtry = 0;  // 0 = floor(sqrt(n_features))
  std::size_t min_leaf = 1;
  std::size_t max_epochs = 1000;
  double tolerance = 1e-4;
  std::uint64_t seed = 1;
  bool bootstrap = true;
  std::size_t n_jobs = 1;

  std::size_t resolved_mtry(std::size_t n_features) const {
    if (mtry > 0) return std::min(mtry, n_features);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
  }

  void validate() const {
    if (!(c > 0.0) || n_trees == 0 || min_leaf == 0 || max_epochs == 0 || !(tolerance > 0.0) || n_jobs == 0)
      fail(ErrorCode::ConfigError, "training parameters must be positive");
  }

  bool operator==(const TrainConfig&) const = default;
};

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  return {{"kind", to_string(c.kind)},     {"C", c.c},
          {"n_trees", c.n_trees},          {"mtry", c.mtry},
          {"min_leaf", c.min_leaf},        {"max_epochs", c.max_epochs},
          {"tolerance", c.tolerance},      {"seed", c.seed},
          {"bootstrap", c.bootstrap}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c = {}) {
  if (j.contains("kind")) c.kind = parse_classifier(j["kind"].get<std::string>());
  c.c = j.value("C", c.c);
  c.n_trees = j.value("n_trees", c.n_trees);
  c.mtry = j.value("mtry", c.mtry);
  c.min_leaf = j.value("min_leaf", c.min_leaf);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.tolerance = j.value("tolerance", c.tolerance);
  c.seed = j.value("seed", c.seed);
  c.bootstrap = j.value("bootstrap", c.bootstrap);
  return c;
}

/// Per-feature z-scoring fitted on training rows.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sd;

  static Standardizer fit(const std::vector<std::vector<double>>& rows, const FeatureLayout* layout = nullptr) {
    if (rows.empty()) fail(ErrorCode::TooFewInstances, "standardizer needs rows");
    const std::size_t d = rows.front().size();
    Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    const auto n = static_cast<double>(rows.size());
    for (std::size_t j = 0; j < d; ++j) {
      double lo = rows[0][j];
      double hi = rows[0][j];
      double sum = 0.0;
      for (const auto& r : rows) {
        sum += r[j];
        lo = std::min(lo, r[j]);
        hi = std::max(hi, r[j]);
      }
      if (lo == hi)
        fail(ErrorCode::ConstantFeature,
             layout != nullptr && j < layout->size() ? (*layout)[j].to_string() : "column " + std::to_string(j));
      s.mean[j] = sum / n;
      double ss = 0.0;
      for (const auto& r : rows) ss += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
      s.sd[j] = std::sqrt(ss / n);
    }
    return s;
  }

  std::vector<double> transform(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / sd[j];
    return out;
  }

  bool operator==(const Standardizer&) const = default;
};

// ---------------------------------------------------------------- linear SVM

struct SvmPair {
  Label negative;  // class voted for when the decision value is <= 0
  Label positive;
  std::vector<double> w;
  double b = 0.0;
  std::size_t epochs = 0;
  bool converged = false;
  double duality_gap = 0.0;
  std::vector<double> dual_history;  // dual objective after each epoch

  bool operator==(const SvmPair&) const = default;
};

struct LinearSvmModel {
  std::vector<Label> classes;  // ascending
  std::vector<SvmPair> pairs;  // one-vs-one, (i < j) in class order
  double c = 1.0;
  Standardizer standardizer;

  std::size_t n_features() const { return standardizer.mean.size(); }
  bool converged() const {
    return std::all_of(pairs.begin(), pairs.end(), [](const SvmPair& p) { return p.converged; });
  }

  bool operator==(const LinearSvmModel&) const = default;
};

namespace detail {

inline void require_classes(const LabeledDataset& data) {
  const auto counts = data.class_counts();
  if (counts.size() < 2) fail(ErrorCode::SingleClassDataset, "training data has one class");
}

inline std::vector<Label> sorted_classes(const std::vector<Label>& y) {
  std::vector<Label> c(y.begin(), y.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

// Dual coordinate descent for the L1-loss soft-margin SVM with the bias
// folded in as a constant feature of value 1:
//   max_a  sum a_i - 1/2 |sum a_i y_i x_i|^2,  0 <= a_i <= C.
inline SvmPair solve_pair(const std::vector<std::vector<double>>& x, const std::vector<double>& y, double c,
                          std::size_t max_epochs, double tol, std::uint64_t seed) {
  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  std::vector<double> w(d + 1, 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qii(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;
    for (double v : x[i]) s += v * v;
    qii[i] = s;
  }
  auto dot = [&](std::size_t i) {
    double s = w[d];
    for (std::size_t j = 0; j < d; ++j) s += w[j] * x[i][j];
    return s;
  };

  SvmPair out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const double g = y[i] * dot(i) - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) pg = std::min(g, 0.0);
      else if (alpha[i] == c) pg = std::max(g, 0.0);
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / qii[i], 0.0, c);
      const double step = (alpha[i] - old) * y[i];
      for (std::size_t j = 0; j < d; ++j) w[j] += step * x[i][j];
      w[d] += step;
    }

    double wnorm = 0.0;
    for (double v : w) wnorm += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) hinge += std::max(0.0, 1.0 - y[i] * dot(i));
    const double primal = 0.5 * wnorm + c * hinge;
    const double dual = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * wnorm;
    out.dual_history.push_back(dual);
    out.epochs = epoch;
    out.duality_gap = primal - dual;
    if (out.duality_gap <= tol * std::max(1.0, std::abs(primal))) {
      out.converged = true;
      break;
    }
  }
  out.b = w[d];
  w.pop_back();
  out.w = std::move(w);
  return out;
}

}  // namespace detail

/// One-vs-one linear C-SVM on standardized features. Pairs that hit the
/// epoch cap are returned with converged == false.
inline LinearSvmModel train_linear_svm(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  detail::require_classes(data);
  for (const auto& [label, count] : data.class_counts())
    if (count < 2) fail(ErrorCode::TooFewInstances, "class " + std::string(to_string(label)) + " has one row");

  LinearSvmModel m;
  m.c = cfg.c;
  m.classes = detail::sorted_classes(data.y);
  m.standardizer = Standardizer::fit(data.x, &data.layout);
  std::vector<std::vector<double>> z;
  z.reserve(data.rows());
  for (const auto& row : data.x) z.push_back(m.standardizer.transform(row));

  std::size_t pair_index = 0;
  for (std::size_t a = 0; a < m.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < m.classes.size(); ++b, ++pair_index) {
      std::vector<std::vector<double>> xs;
      std::vector<double> ys;
      for (std::size_t i = 0; i < data.rows(); ++i) {
        if (data.y[i] == m.classes[a] || data.y[i] == m.classes[b]) {
          xs.push_back(z[i]);
          ys.push_back(data.y[i] == m.classes[b] ? 1.0 : -1.0);
        }
      }
      auto p = detail::solve_pair(xs, ys, cfg.c, cfg.max_epochs, cfg.tolerance, derive_seed(cfg.seed, pair_index));
      p.negative = m.classes[a];
      p.positive = m.classes[b];
      m.pairs.push_back(std::move(p));
    }
  }
  return m;
}

// ------------------------------------------------------------- random forest

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> counts;  // class counts at a leaf, indexed like classes

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf())
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                                      : nodes[i].right);
    return nodes[i];
  }

  std::size_t vote(std::span<const double> x) const {
    const auto& c = leaf_for(x).counts;
    return static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
  }

  bool operator==(const DecisionTree&) const = default;
};

struct RandomForestModel {
  std::vector<Label> classes;
  std::vector<DecisionTree> trees;
  std::size_t n_features = 0;
  std::size_t mtry = 1;
  std::size_t min_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::optional<double> oob_accuracy;

  std::size_t n_trees() const { return trees.size(); }
  bool operator==(const RandomForestModel&) const = default;
};

namespace detail {

inline double gini(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double s = 1.0;
  for (double c : counts) s -= (c / total) * (c / total);
  return s;
}

class TreeGrower {
 public:
  TreeGrower(const std::vector<std::vector<double>>& x, const std::vector<std::size_t>& y_idx, std::size_t n_classes,
             std::size_t mtry, std::size_t min_leaf, std::uint64_t seed)
      : x_(x), y_(y_idx), k_(n_classes), mtry_(mtry), min_leaf_(min_leaf), rng_(seed) {}

  DecisionTree grow(std::vector<std::size_t> sample) {
    DecisionTree tree;
    struct Pending {
      std::size_t node;
      std::vector<std::size_t> rows;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(sample)});
    while (!stack.empty()) {
      auto [node, rows] = std::move(stack.back());
      stack.pop_back();
      std::vector<double> counts(k_, 0.0);
      for (auto r : rows) counts[y_[r]] += 1.0;
      const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
      const auto split = pure || rows.size() < 2 * min_leaf_ ? std::nullopt : best_split(rows);
      if (!split) {
        tree.nodes[node].counts = std::move(counts);
        continue;
      }
      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      for (auto r : rows) (x_[r][split->feature] <= split->threshold ? left : right).push_back(r);
      const auto li = tree.nodes.size();
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& n = tree.nodes[node];
      n.feature = static_cast<int>(split->feature);
      n.threshold = split->threshold;
      n.left = static_cast<int>(li);
      n.right = static_cast<int>(li + 1);
      stack.push_back({li + 1, std::move(right)});
      stack.push_back({li, std::move(left)});
    }
    return tree;
  }

 private:
  struct Split {
    std::size_t feature;
    double threshold;
  };

  // Tries features in a random order; the first mtry are always examined and
  // the search continues past mtry only until some valid split exists.
  std::optional<Split> best_split(const std::vector<std::size_t>& rows) {
    const std::size_t d = x_.front().size();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), 0);
    std::shuffle(features.begin(), features.end(), rng_);

    std::optional<Split> best;
    double best_score = INFINITY;
    std::vector<std::pair<double, std::size_t>> vals(rows.size());
    std::vector<double> left(k_);
    std::vector<double> total(k_, 0.0);
    for (auto r : rows) total[y_[r]] += 1.0;
    const auto n = static_cast<double>(rows.size());

    for (std::size_t fi = 0; fi < d; ++fi) {
      if (fi >= mtry_ && best) break;
      const std::size_t f = features[fi];
      for (std::size_t i = 0; i < rows.size(); ++i) vals[i] = {x_[rows[i]][f], y_[rows[i]]};
      std::sort(vals.begin(), vals.end());
      std::fill(left.begin(), left.end(), 0.0);
      std::vector<double> right = total;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left[vals[i].second] += 1.0;
        right[vals[i].second] -= 1.0;
        const std::size_t nl = i + 1;
        if (vals[i].first == vals[i + 1].first || nl < min_leaf_ || rows.size() - nl < min_leaf_) continue;
        const double nld = static_cast<double>(nl);
        const double score = nld * gini(left, nld) + (n - nld) * gini(right, n - nld);
        if (score < best_score) {
          best_score = score;
          double thr = vals[i].first + (vals[i + 1].first - vals[i].first) / 2.0;
          if (!(thr < vals[i + 1].first)) thr = vals[i].first;
          best = Split{f, thr};
        }
      }
    }
    return best;
  }

  const std::vector<std::vector<double>>& x_;
  const std::vector<std::size_t>& y_;
  std::size_t k_;
  std::size_t mtry_;
  std::size_t min_leaf_;
  std::mt19937_64 rng_;
};

inline std::size_t argmax_lowest(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace detail

/// Breiman forest of Gini CART trees. Tree t is seeded from (seed, t), so
/// the forest does not depend on cfg.n_jobs.
inline RandomForestModel train_random_forest(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  detail::require_classes(data);
  RandomForestModel m;
  m.classes = detail::sorted_classes(data.y);
  m.n_features = data.cols();
  m.mtry = cfg.resolved_mtry(m.n_features);
  m.min_leaf = cfg.min_leaf;
  m.bootstrap = cfg.bootstrap;
  m.seed = cfg.seed;

  const std::size_t n = data.rows();
  std::vector<std::size_t> yidx(n);
  for (std::size_t i = 0; i < n; ++i)
    yidx[i] = static_cast<std::size_t>(std::find(m.classes.begin(), m.classes.end(), data.y[i]) - m.classes.begin());

  m.trees.resize(cfg.n_trees);
  std::vector<std::vector<std::uint8_t>> in_bag(cfg.n_trees);
  parallel_for(cfg.n_trees, cfg.n_jobs, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(cfg.seed, t));
    std::vector<std::size_t> sample(n);
    in_bag[t].assign(n, cfg.bootstrap ? 0 : 1);
    if (cfg.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& s : sample) {
        s = pick(rng);
        in_bag[t][s] = 1;
      }
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    detail::TreeGrower grower(data.x, yidx, m.classes.size(), m.mtry, m.min_leaf, rng());
    m.trees[t] = grower.grow(std::move(sample));
  });

  if (cfg.bootstrap) {
    std::size_t scored = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> votes(m.classes.size(), 0.0);
      bool any = false;
      for (std::size_t t = 0; t < m.trees.size(); ++t) {
        if (in_bag[t][i]) continue;
        votes[m.trees[t].vote(data.x[i])] += 1.0;
        any = true;
      }
      if (!any) continue;
      ++scored;
      correct += detail::argmax_lowest(votes) == yidx[i];
    }
    if (scored > 0) m.oob_accuracy = static_cast<double>(correct) / static_cast<double>(scored);
  }
  return m;
}

// ------------------------------------------------------------ shared surface

using Model = std::variant<LinearSvmModel, RandomForestModel>;

inline Model train(const LabeledDataset& data, const TrainConfig& cfg) {
  if (cfg.kind == ClassifierKind::LinearSvm) return train_linear_svm(data, cfg);
  return train_random_forest(data, cfg);
}

inline std::size_t n_features(const Model& m) {
  return std::visit(
      [](const auto& mm) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(mm)>, LinearSvmModel>) return mm.n_features();
        else return mm.n_features;
      },
      m);
}

inline const std::vector<Label>& classes(const Model& m) {
  return std::visit([](const auto& mm) -> const std::vector<Label>& { return mm.classes; }, m);
}

inline double pair_decision(const SvmPair& p, std::span<const double> z) {
  double s = p.b;
  for (std::size_t j = 0; j < z.size(); ++j) s += p.w[j] * z[j];
  return s;
}

/// Per-class votes: SVM one-vs-one wins, or RF tree votes.
inline std::vector<double> class_votes(const Model& model, std::span<const double> x) {
  if (x.size() != n_features(model))
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(n_features(model)) + " features, got " +
                                           std::to_string(x.size()));
  std::vector<double> votes(classes(model).size(), 0.0);
  if (const auto* svm = std::get_if<LinearSvmModel>(&model)) {
    const auto z = svm->standardizer.transform(x);
    for (const auto& p : svm->pairs) {
      const Label winner = pair_decision(p, z) > 0.0 ? p.positive : p.negative;
      votes[static_cast<std::size_t>(std::find(svm->classes.begin(), svm->classes.end(), winner) -
                                     svm->classes.begin())] += 1.0;
    }
  } else {
    const auto& rf = std::get<RandomForestModel>(model);
    for (const auto& t : rf.trees) votes[t.vote(x)] += 1.0;
  }
  return votes;
}

/// Label with the most votes; ties go to the lowest class.
inline Label predict(const Model& model, std::span<const double> x) {
  return classes(model)[detail::argmax_lowest(class_votes(model, x))];
}

/// Binary models only. SVM: signed margin, positive favoring the higher
/// class (High). RF: fraction of trees voting for the higher class.
inline double decision_score(const Model& model, std::span<const double> x) {
  if (classes(model).size() != 2) fail(ErrorCode::NotBinaryModel, std::to_string(classes(model).size()) + " classes");
  if (const auto* svm = std::get_if<LinearSvmModel>(&model)) {
    if (x.size() != svm->n_features()) fail(ErrorCode::DimensionMismatch, "feature count");
    return pair_decision(svm->pairs.front(), svm->standardizer.transform(x));
  }
  const auto votes = class_votes(model, x);
  return votes[1] / static_cast<double>(std::get<RandomForestModel>(model).trees.size());
}

// ------------------------------------------------------------ serialization

namespace detail {

inline nlohmann::ordered_json labels_json(const std::vector<Label>& ls) {
  auto j = nlohmann::ordered_json::array();
  for (auto l : ls) j.push_back(to_string(l));
  return j;
}

inline std::vector<Label> labels_from(const nlohmann::json& j) {
  std::vector<Label> out;
  for (const auto& s : j) out.push_back(parse_label(s.get<std::string>()));
  return out;
}

}  // namespace detail

inline nlohmann::ordered_json model_to_json(const Model& model) {
  nlohmann::ordered_json j;
  if (const auto* svm = std::get_if<LinearSvmModel>(&model)) {
    j["kind"] = "svm";
    j["classes"] = detail::labels_json(svm->classes);
    j["C"] = svm->c;
    j["standardizer"] = {{"mean", svm->standardizer.mean}, {"sd", svm->standardizer.sd}};
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : svm->pairs)
      pairs.push_back({{"negative", to_string(p.negative)},
                       {"positive", to_string(p.positive)},
                       {"w", p.w},
                       {"b", p.b},
                       {"epochs", p.epochs},
                       {"converged", p.converged},
                       {"duality_gap", p.duality_gap}});
    j["pairs"] = pairs;
  } else {
    const auto& rf = std::get<RandomForestModel>(model);
    j["kind"] = "random_forest";
    j["classes"] = detail::labels_json(rf.classes);
    j["n_features"] = rf.n_features;
    j["mtry"] = rf.mtry;
    j["min_leaf"] = rf.min_leaf;
    j["bootstrap"] = rf.bootstrap;
    j["seed"] = rf.seed;
    j["oob_accuracy"] = rf.oob_accuracy ? nlohmann::ordered_json(*rf.oob_accuracy) : nlohmann::ordered_json(nullptr);
    auto trees = nlohmann::ordered_json::array();
    for (const auto& t : rf.trees) {
      auto nodes = nlohmann::ordered_json::array();
      for (const auto& nd : t.nodes)
        nodes.push_back({{"feature", nd.feature},
                         {"threshold", nd.threshold},
                         {"left", nd.left},
                         {"right", nd.right},
                         {"counts", nd.counts}});
      trees.push_back(nodes);
    }
    j["trees"] = trees;
  }
  return j;
}

inline Model model_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "svm") {
      LinearSvmModel m;
      m.classes = detail::labels_from(j.at("classes"));
      m.c = j.at("C").get<double>();
      m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
      m.standardizer.sd = j.at("standardizer").at("sd").get<std::vector<double>>();
      for (const auto& p : j.at("pairs")) {
        SvmPair sp;
        sp.negative = parse_label(p.at("negative").get<std::string>());
        sp.positive = parse_label(p.at("positive").get<std::string>());
        sp.w = p.at("w").get<std::vector<double>>();
        sp.b = p.at("b").get<double>();
        sp.epochs = p.value("epochs", std::size_t{0});
        sp.converged = p.value("converged", true);
        sp.duality_gap = p.value("duality_gap", 0.0);
        m.pairs.push_back(std::move(sp));
      }
      return m;
    }
    if (kind == "random_forest") {
      RandomForestModel m;
      m.classes = detail::labels_from(j.at("classes"));
      m.n_features = j.at("n_features").get<std::size_t>();
      m.mtry = j.at("mtry").get<std::size_t>();
      m.min_leaf = j.at("min_leaf").get<std::size_t>();
      m.bootstrap = j.at("bootstrap").get<bool>();
      m.seed = j.at("seed").get<std::uint64_t>();
      if (!j.at("oob_accuracy").is_null()) m.oob_accuracy = j["oob_accuracy"].get<double>();
      for (const auto& t : j.at("trees")) {
        DecisionTree tree;
        for (const auto& nd : t) {
          TreeNode node{nd.at("feature").get<int>(), nd.at("threshold").get<double>(), nd.at("left").get<int>(),
                        nd.at("right").get<int>(), nd.at("counts").get<std::vector<double>>()};
          if (node.feature >= static_cast<int>(m.n_features)) fail(ErrorCode::ParseError, "node feature out of range");
          tree.nodes.push_back(std::move(node));
        }
        m.trees.push_back(std::move(tree));
      }
      return m;
    }
    fail(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("model: ") + e.what());
  }
}

}  // namespace eegaffect
