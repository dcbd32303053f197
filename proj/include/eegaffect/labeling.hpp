#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eegaffect/error.hpp"
#include "eegaffect/features.hpp"
#include "eegaffect/signal_model.hpp"

namespace eegaffect {

enum class AffectDimension { Valence, Arousal };
enum class PartitionScheme { Bipartition, Tripartition };
enum class Label { Low = 0, Medium = 1, High = 2 };

inline constexpr std::array<AffectDimension, 2> kAllDimensions = {AffectDimension::Arousal, AffectDimension::Valence};
inline constexpr std::array<PartitionScheme, 2> kAllSchemes = {PartitionScheme::Bipartition, PartitionScheme::Tripartition};

inline std::string_view to_string(AffectDimension d) { return d == AffectDimension::Valence ? "valence" : "arousal"; }
inline std::string_view to_string(PartitionScheme s) {
  return s == PartitionScheme::Bipartition ? "bipartition" : "tripartition";
}
inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::Low: return "Low";
    case Label::Medium: return "Medium";
    case Label::High: return "High";
  }
  return "?";
}

inline AffectDimension parse_dimension(std::string_view s) {
  if (s == "valence") return AffectDimension::Valence;
  if (s == "arousal") return AffectDimension::Arousal;
  fail(ErrorCode::ConfigError, "unknown dimension '" + std::string(s) + "'");
}
inline PartitionScheme parse_scheme(std::string_view s) {
  if (s == "bipartition") return PartitionScheme::Bipartition;
  if (s == "tripartition") return PartitionScheme::Tripartition;
  fail(ErrorCode::ConfigError, "unknown scheme '" + std::string(s) + "'");
}
inline Label parse_label(std::string_view s) {
  for (auto l : {Label::Low, Label::Medium, Label::High})
    if (to_string(l) == s) return l;
  fail(ErrorCode::ParseError, "unknown label '" + std::string(s) + "'");
}

inline constexpr int label_index(Label l) { return static_cast<int>(l); }

struct LabelingOptions {
  // Equal thirds of [1, 9] instead of the published ranges with gaps.
  bool contiguous_boundaries = false;

  bool operator==(const LabelingOptions&) const = default;
};

/// Published ranges: [1,3] Low, [4,6] Medium, [7,9] High, boundaries
/// inclusive. Ratings in the gaps (3,4) and (6,7) are excluded, as is
/// Medium under the bipartition scheme.
inline std::optional<Label> map_rating(double r, PartitionScheme scheme, const LabelingOptions& opt = {}) {
  if (!(r >= 1.0 && r <= 9.0)) fail(ErrorCode::RatingOutOfRange, std::to_string(r));
  std::optional<Label> label;
  if (opt.contiguous_boundaries) {
    if (r < 11.0 / 3.0) label = Label::Low;
    else if (r > 19.0 / 3.0) label = Label::High;
    else label = Label::Medium;
  } else if (r <= 3.0) {
    label = Label::Low;
  } else if (r >= 4.0 && r <= 6.0) {
    label = Label::Medium;
  } else if (r >= 7.0) {
    label = Label::High;
  }
  if (scheme == PartitionScheme::Bipartition && label == Label::Medium) return std::nullopt;
  return label;
}

inline double rating_for(const Ratings& r, AffectDimension d) {
  return d == AffectDimension::Valence ? r.valence : r.arousal;
}

struct LabeledDataset {
  std::vector<std::vector<double>> x;  // rows
  std::vector<Label> y;
  FeatureLayout layout;
  FeatureMethod method = FeatureMethod::Spd;
  AffectDimension dimension = AffectDimension::Valence;
  PartitionScheme scheme = PartitionScheme::Bipartition;
  std::vector<TrialKey> keys;

  std::size_t rows() const { return y.size(); }
  std::size_t cols() const { return layout.size(); }

  std::map<Label, std::size_t> class_counts() const {
    std::map<Label, std::size_t> c;
    for (auto l : y) ++c[l];
    return c;
  }

  /// Copy restricted to the given rows (in the given order).
  LabeledDataset subset(std::span<const std::size_t> rows_wanted) const {
    LabeledDataset out{{}, {}, layout, method, dimension, scheme, {}};
    for (auto i : rows_wanted) {
      out.x.push_back(x[i]);
      out.y.push_back(y[i]);
      out.keys.push_back(keys[i]);
    }
    return out;
  }
};

/// Joins feature rows with ratings, maps to labels, drops excluded rows.
inline LabeledDataset build_dataset(std::span<const KeyedFeatures> features, const std::map<TrialKey, Ratings>& ratings,
                                    AffectDimension dim, PartitionScheme scheme, const LabelingOptions& opt = {}) {
  LabeledDataset ds;
  ds.dimension = dim;
  ds.scheme = scheme;
  if (!features.empty()) {
    ds.layout = features.front().features.layout;
    ds.method = features.front().features.method;
  }
  for (const auto& row : features) {
    if (row.features.layout != ds.layout) fail(ErrorCode::LayoutMismatch, "feature rows disagree on layout");
    const auto it = ratings.find(row.key);
    if (it == ratings.end())
      fail(ErrorCode::MissingRating, "subject " + std::to_string(row.key.subject_id) + " trial " +
                                         std::to_string(row.key.trial_id));
    const auto label = map_rating(rating_for(it->second, dim), scheme, opt);
    if (!label) continue;
    for (double v : row.features.values)
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteSample, "non-finite feature value");
    ds.x.push_back(row.features.values);
    ds.y.push_back(*label);
    ds.keys.push_back(row.key);
  }
  if (ds.rows() == 0) fail(ErrorCode::EmptyAfterExclusion, std::string(to_string(scheme)) + " " + std::string(to_string(dim)));
  if (ds.class_counts().size() < 2) fail(ErrorCode::SingleClassDataset, std::string(to_string(dim)));
  return ds;
}

/// CSV export: key columns, features, then label/dimension/scheme.
inline void write_labeled_csv(std::ostream& os, const LabeledDataset& ds) {
  os << "subject_id,trial_id";
  for (const auto& d : ds.layout) os << ',' << d.to_string();
  os << ",label,dimension,scheme\n";
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    os << ds.keys[i].subject_id << ',' << ds.keys[i].trial_id;
    for (double v : ds.x[i]) os << ',' << format_real(v);
    os << ',' << to_string(ds.y[i]) << ',' << to_string(ds.dimension) << ',' << to_string(ds.scheme) << '\n';
  }
}

}  // namespace eegaffect
