#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegaffect/classifiers.hpp"
#include "eegaffect/error.hpp"
#include "eegaffect/labeling.hpp"
#include "eegaffect/util.hpp"

namespace eegaffect {

struct FoldPlan {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignment;  // row -> fold
  std::vector<std::string> warnings;

  std::vector<std::size_t> rows_in(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] == fold) out.push_back(i);
    return out;
  }
};

struct FoldOptions {
  bool group_by_subject = false;
};

/// Stratified k-fold plan. Rows are put in (subject_id, trial_id) order,
/// shuffled per class with a seeded generator, and dealt round-robin with
/// the fold pointer carried across classes. Fold sizes therefore differ by
/// at most one, as do per-class counts. With `group_by_subject`, whole
/// subjects are dealt instead.
inline FoldPlan plan_folds(std::span<const Label> y, std::span<const TrialKey> keys, std::size_t k, std::uint64_t seed,
                           const FoldOptions& opt = {}) {
  const std::size_t n = y.size();
  if (k < 2) fail(ErrorCode::TooFewInstances, "k must be >= 2");
  if (n < k) fail(ErrorCode::TooFewInstances, std::to_string(n) + " rows for " + std::to_string(k) + " folds");
  if (!keys.empty() && keys.size() != n) fail(ErrorCode::DimensionMismatch, "keys and labels differ in length");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (!keys.empty()) std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(n, 0);

  if (opt.group_by_subject) {
    if (keys.empty()) fail(ErrorCode::ConfigError, "subject grouping needs trial keys");
    std::vector<int> subjects;
    for (auto i : order)
      if (subjects.empty() || subjects.back() != keys[i].subject_id) subjects.push_back(keys[i].subject_id);
    if (subjects.size() < k)
      fail(ErrorCode::TooFewInstances, std::to_string(subjects.size()) + " subjects for " + std::to_string(k) + " folds");
    std::mt19937_64 rng(derive_seed(seed, 0));
    std::shuffle(subjects.begin(), subjects.end(), rng);
    std::map<int, std::size_t> fold_of;
    for (std::size_t s = 0; s < subjects.size(); ++s) fold_of[subjects[s]] = s % k;
    for (std::size_t i = 0; i < n; ++i) plan.assignment[i] = fold_of[keys[i].subject_id];
    return plan;
  }

  std::map<Label, std::vector<std::size_t>> by_class;
  for (auto i : order) by_class[y[i]].push_back(i);
  std::size_t next = 0;
  for (auto& [label, rows] : by_class) {
    if (rows.size() < k)
      plan.warnings.push_back("class " + std::string(to_string(label)) + " has " + std::to_string(rows.size()) +
                              " rows (< k); spread best-effort");
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(label_index(label)) + 1));
    std::shuffle(rows.begin(), rows.end(), rng);
    for (auto i : rows) plan.assignment[i] = next++ % k;
  }
  return plan;
}

struct OutOfFoldScore {
  TrialKey key;
  Label label;
  double score;
};

struct CvResult {
  FeatureMethod method = FeatureMethod::Spd;
  PartitionScheme scheme = PartitionScheme::Bipartition;
  AffectDimension dimension = AffectDimension::Valence;
  TrainConfig config;
  LabelingOptions labeling;

  std::vector<double> fold_accuracy;  // evaluated folds, in fold order
  std::vector<std::size_t> fold_index;
  std::vector<std::size_t> fold_size;
  std::vector<std::size_t> skipped_folds;
  std::size_t nonconverged_folds = 0;
  double mean_accuracy = 0.0;
  std::map<Label, std::size_t> class_counts;
  std::vector<OutOfFoldScore> oof;          // binary datasets only
  std::vector<std::string> fold_models;     // serialized, when requested
  std::vector<std::string> warnings;

  std::string key() const {
    return std::string(to_string(method)) + "__" + std::string(to_string(scheme)) + "__" +
           std::string(to_string(dimension)) + "__" + std::string(to_string(config.kind));
  }
};

struct CvOptions {
  bool keep_models = false;
  std::size_t workers = 1;
};

/// Trains on k-1 folds and scores the held-out fold, for every fold.
/// Training rows are taken in key order and each fold gets a seed derived
/// from (cfg.seed, fold), so the result does not depend on row order or on
/// scheduling. A fold whose training split has one class is skipped.
inline CvResult cross_validate(const LabeledDataset& data, const TrainConfig& cfg, const FoldPlan& plan,
                               const CvOptions& opt = {}) {
  if (plan.assignment.size() != data.rows()) fail(ErrorCode::DimensionMismatch, "fold plan does not cover the data");
  CvResult res;
  res.method = data.method;
  res.scheme = data.scheme;
  res.dimension = data.dimension;
  res.config = cfg;
  res.class_counts = data.class_counts();
  res.warnings = plan.warnings;
  const bool binary = res.class_counts.size() == 2;

  struct FoldOut {
    std::optional<double> accuracy;
    std::size_t size = 0;
    bool converged = true;
    std::vector<OutOfFoldScore> oof;
    std::string model;
  };
  std::vector<FoldOut> folds(plan.k);

  parallel_for(plan.k, opt.workers, [&](std::size_t f) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < data.rows(); ++i) (plan.assignment[i] == f ? test_rows : train_rows).push_back(i);
    std::stable_sort(train_rows.begin(), train_rows.end(),
                     [&](auto a, auto b) { return data.keys[a] < data.keys[b]; });
    auto& out = folds[f];
    out.size = test_rows.size();
    if (test_rows.empty()) return;
    const auto train_set = data.subset(train_rows);
    if (train_set.class_counts().size() < 2) return;

    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = derive_seed(cfg.seed, f);
    const Model model = train(train_set, fold_cfg);
    if (const auto* svm = std::get_if<LinearSvmModel>(&model)) out.converged = svm->converged();
    if (opt.keep_models) out.model = model_to_json(model).dump();

    std::size_t correct = 0;
    for (auto i : test_rows) {
      correct += predict(model, data.x[i]) == data.y[i];
      if (binary && classes(model).size() == 2) out.oof.push_back({data.keys[i], data.y[i], decision_score(model, data.x[i])});
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(test_rows.size());
  });

  for (std::size_t f = 0; f < plan.k; ++f) {
    auto& fo = folds[f];
    if (!fo.accuracy) {
      res.skipped_folds.push_back(f);
      res.warnings.push_back("fold " + std::to_string(f) + " skipped: single-class training split");
      continue;
    }
    res.fold_index.push_back(f);
    res.fold_accuracy.push_back(*fo.accuracy);
    res.fold_size.push_back(fo.size);
    res.nonconverged_folds += fo.converged ? 0 : 1;
    res.oof.insert(res.oof.end(), fo.oof.begin(), fo.oof.end());
    if (opt.keep_models) res.fold_models.push_back(std::move(fo.model));
  }
  if (res.fold_accuracy.empty()) fail(ErrorCode::SingleClassDataset, "every fold was skipped");
  res.mean_accuracy = std::accumulate(res.fold_accuracy.begin(), res.fold_accuracy.end(), 0.0) /
                      static_cast<double>(res.fold_accuracy.size());
  std::sort(res.oof.begin(), res.oof.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  return res;
}

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Threshold sweep over distinct scores in descending order (ties move
/// together); High is the positive class. AUC by the trapezoid rule.
inline RocCurve roc_curve(std::span<const double> scores, std::span<const Label> y) {
  if (scores.size() != y.size()) fail(ErrorCode::DimensionMismatch, "scores and labels differ in length");
  double pos = 0.0;
  double neg = 0.0;
  for (auto l : y) {
    if (l == Label::Medium) fail(ErrorCode::InvalidSpec, "ROC needs Low/High labels");
    (l == Label::High ? pos : neg) += 1.0;
  }
  if (pos == 0.0 || neg == 0.0) fail(ErrorCode::SingleClassLabels, "both Low and High are required");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0, INFINITY});
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) (y[order[i]] == Label::High ? tp : fp) += 1.0;
    const RocPoint p{fp / neg, tp / pos, s};
    const auto& prev = roc.points.back();
    roc.auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
    roc.points.push_back(p);
  }
  return roc;
}

struct HistogramPair {
  FeatureDescriptor feature;
  std::vector<double> edges;
  std::vector<std::size_t> low_counts;
  std::vector<std::size_t> high_counts;
};

/// Equal-width bins over the feature's [min, max], shared by both classes.
inline HistogramPair feature_histograms(const LabeledDataset& data, std::size_t feature, std::size_t bins) {
  if (bins < 2) fail(ErrorCode::InvalidSpec, "need at least 2 bins");
  if (feature >= data.cols()) fail(ErrorCode::DimensionMismatch, "feature index out of range");
  if (data.rows() == 0) fail(ErrorCode::TooFewInstances, "empty dataset");
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (data.y[i] == Label::Medium) fail(ErrorCode::InvalidSpec, "histograms need bipartition data");
    lo = std::min(lo, data.x[i][feature]);
    hi = std::max(hi, data.x[i][feature]);
  }
  if (!(hi > lo)) fail(ErrorCode::ConstantFeature, data.layout[feature].to_string());

  HistogramPair h{data.layout[feature], std::vector<double>(bins + 1), std::vector<std::size_t>(bins, 0),
                  std::vector<std::size_t>(bins, 0)};
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
  h.edges[bins] = hi;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto b = static_cast<std::size_t>((data.x[i][feature] - lo) / width);
    b = std::min(b, bins - 1);
    (data.y[i] == Label::High ? h.high_counts : h.low_counts)[b] += 1;
  }
  return h;
}

// ---------------------------------------------------------------- reports

inline std::string percent(double accuracy) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * accuracy);
  return buf;
}

struct AccuracyTable {
  ClassifierKind classifier;
  std::vector<FeatureMethod> methods;      // rows
  std::vector<std::string> columns;        // "<scheme>.<dimension>"
  std::vector<std::vector<std::optional<double>>> cells;
};

struct Tabulation {
  std::vector<AccuracyTable> tables;
  std::vector<std::string> warnings;
};

inline std::string column_key(PartitionScheme s, AffectDimension d) {
  return std::string(to_string(s)) + "." + std::string(to_string(d));
}

/// Methods x (scheme, dimension) mean-accuracy tables, one per classifier.
/// A repeated (method, scheme, dimension, classifier) key keeps the later
/// result and records a warning.
inline Tabulation tabulate(std::span<const CvResult> results) {
  Tabulation tab;
  std::map<std::string, const CvResult*> latest;
  for (const auto& r : results) {
    const auto k = r.key();
    if (latest.count(k)) tab.warnings.push_back("duplicate result for " + k + "; later result wins");
    latest[k] = &r;
  }

  std::set<ClassifierKind> kinds;
  for (const auto& [k, r] : latest) kinds.insert(r->config.kind);
  for (auto kind : kinds) {
    AccuracyTable t;
    t.classifier = kind;
    std::set<FeatureMethod> methods;
    std::set<std::pair<PartitionScheme, AffectDimension>> cols;
    for (const auto& [k, r] : latest) {
      if (r->config.kind != kind) continue;
      methods.insert(r->method);
      cols.insert({r->scheme, r->dimension});
    }
    t.methods.assign(methods.begin(), methods.end());
    // Column order mirrors the published tables: scheme, then arousal before valence.
    std::vector<std::pair<PartitionScheme, AffectDimension>> ordered;
    for (auto s : kAllSchemes)
      for (auto d : kAllDimensions)
        if (cols.count({s, d})) ordered.push_back({s, d});
    for (const auto& [s, d] : ordered) t.columns.push_back(column_key(s, d));
    for (auto m : t.methods) {
      std::vector<std::optional<double>> row;
      for (const auto& [s, d] : ordered) {
        std::optional<double> cell;
        for (const auto& [k, r] : latest)
          if (r->config.kind == kind && r->method == m && r->scheme == s && r->dimension == d) cell = r->mean_accuracy;
        row.push_back(cell);
      }
      t.cells.push_back(std::move(row));
    }
    tab.tables.push_back(std::move(t));
  }
  return tab;
}

inline std::string tabulation_csv(const Tabulation& tab) {
  std::ostringstream os;
  for (const auto& t : tab.tables) {
    os << "classifier,method";
    for (const auto& c : t.columns) os << ',' << c;
    os << '\n';
    for (std::size_t i = 0; i < t.methods.size(); ++i) {
      os << to_string(t.classifier) << ',' << to_string(t.methods[i]);
      for (const auto& cell : t.cells[i]) os << ',' << (cell ? percent(*cell) : std::string("failed"));
      os << '\n';
    }
  }
  return os.str();
}

inline nlohmann::ordered_json cv_to_json(const CvResult& r) {
  nlohmann::ordered_json j;
  j["key"] = r.key();
  j["method"] = to_string(r.method);
  j["scheme"] = to_string(r.scheme);
  j["dimension"] = to_string(r.dimension);
  j["classifier"] = to_string(r.config.kind);
  j["train_config"] = to_json(r.config);
  j["labeling"] = {{"contiguous_boundaries", r.labeling.contiguous_boundaries}};
  nlohmann::ordered_json counts;
  for (const auto& [l, c] : r.class_counts) counts[std::string(to_string(l))] = c;
  j["class_counts"] = counts;
  j["fold_index"] = r.fold_index;
  j["fold_accuracy"] = r.fold_accuracy;
  j["fold_size"] = r.fold_size;
  j["skipped_folds"] = r.skipped_folds;
  j["nonconverged_folds"] = r.nonconverged_folds;
  j["mean_accuracy"] = r.mean_accuracy;
  j["mean_accuracy_percent"] = percent(r.mean_accuracy);
  j["warnings"] = r.warnings;
  return j;
}

inline CvResult cv_from_json(const nlohmann::json& j) {
  CvResult r;
  try {
    r.method = parse_method(j.at("method").get<std::string>());
    r.scheme = parse_scheme(j.at("scheme").get<std::string>());
    r.dimension = parse_dimension(j.at("dimension").get<std::string>());
    r.config = train_config_from_json(j.at("train_config"));
    r.labeling.contiguous_boundaries = j.at("labeling").value("contiguous_boundaries", false);
    for (const auto& [l, c] : j.at("class_counts").items()) r.class_counts[parse_label(l)] = c.get<std::size_t>();
    r.fold_index = j.at("fold_index").get<std::vector<std::size_t>>();
    r.fold_accuracy = j.at("fold_accuracy").get<std::vector<double>>();
    r.fold_size = j.at("fold_size").get<std::vector<std::size_t>>();
    r.skipped_folds = j.at("skipped_folds").get<std::vector<std::size_t>>();
    r.nonconverged_folds = j.at("nonconverged_folds").get<std::size_t>();
    r.mean_accuracy = j.at("mean_accuracy").get<double>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("cv result: ") + e.what());
  }
  return r;
}

inline std::string roc_csv(const RocCurve& roc) {
  std::ostringstream os;
  os << "fpr,tpr,threshold\n";
  for (const auto& p : roc.points) os << format_real(p.fpr) << ',' << format_real(p.tpr) << ',' << format_real(p.threshold) << '\n';
  return os.str();
}

inline std::string histograms_csv(std::span<const HistogramPair> hs) {
  std::ostringstream os;
  os << "feature,bin,lower,upper,count_low,count_high\n";
  for (const auto& h : hs)
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
      os << h.feature.to_string() << ',' << b << ',' << format_real(h.edges[b]) << ',' << format_real(h.edges[b + 1])
         << ',' << h.low_counts[b] << ',' << h.high_counts[b] << '\n';
  return os.str();
}

}  // namespace eegaffect
