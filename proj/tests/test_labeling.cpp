#include <gtest/gtest.h>

#include <set>

#include "eegaffect/labeling.hpp"

using namespace eegaffect;

namespace {

std::vector<KeyedFeatures> rows_for(std::size_t n) {
  std::vector<KeyedFeatures> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({{1, static_cast<int>(i + 1)},
                   {FeatureMethod::Spd, {static_cast<double>(i)}, {{"Fp1", "alpha", "spd"}}}});
  return out;
}

std::map<TrialKey, Ratings> ratings_for(const std::vector<double>& valence) {
  std::map<TrialKey, Ratings> out;
  for (std::size_t i = 0; i < valence.size(); ++i) out[{1, static_cast<int>(i + 1)}] = Ratings{valence[i], 5.0, {}, {}};
  return out;
}

}  // namespace

TEST(MapRating, Examples) {
  EXPECT_EQ(map_rating(2.0, PartitionScheme::Tripartition), Label::Low);
  EXPECT_EQ(map_rating(5.0, PartitionScheme::Bipartition), std::nullopt);
  EXPECT_EQ(map_rating(5.0, PartitionScheme::Tripartition), Label::Medium);
  EXPECT_EQ(map_rating(3.5, PartitionScheme::Bipartition), std::nullopt);
  EXPECT_EQ(map_rating(3.5, PartitionScheme::Tripartition), std::nullopt);
  EXPECT_EQ(map_rating(6.5, PartitionScheme::Tripartition), std::nullopt);
  for (double edge : {3.0, 1.0}) EXPECT_EQ(map_rating(edge, PartitionScheme::Bipartition), Label::Low);
  for (double edge : {4.0, 6.0}) EXPECT_EQ(map_rating(edge, PartitionScheme::Tripartition), Label::Medium);
  for (double edge : {7.0, 9.0}) EXPECT_EQ(map_rating(edge, PartitionScheme::Bipartition), Label::High);
  EXPECT_THROW(map_rating(9.01, PartitionScheme::Bipartition), Error);
  EXPECT_THROW(map_rating(0.99, PartitionScheme::Tripartition), Error);
}

TEST(MapRating, ContiguousBoundariesOption) {
  const LabelingOptions opt{true};
  EXPECT_EQ(map_rating(3.5, PartitionScheme::Tripartition, opt), Label::Low);
  EXPECT_EQ(map_rating(3.7, PartitionScheme::Tripartition, opt), Label::Medium);
  EXPECT_EQ(map_rating(6.5, PartitionScheme::Tripartition, opt), Label::High);
  EXPECT_EQ(map_rating(6.5, PartitionScheme::Bipartition, opt), Label::High);
  EXPECT_EQ(map_rating(5.0, PartitionScheme::Bipartition, opt), std::nullopt);
}

TEST(MapRating, MonotoneAndNested) {
  std::optional<Label> prev;
  for (int t = 10; t <= 90; ++t) {
    const double r = t / 10.0;
    const auto tri = map_rating(r, PartitionScheme::Tripartition);
    const auto bi = map_rating(r, PartitionScheme::Bipartition);
    if (bi) {
      EXPECT_EQ(bi, tri);
    }
    if (tri && *tri != Label::Medium) {
      EXPECT_EQ(bi, tri);
    }
    if (tri) {
      if (prev) {
        EXPECT_LE(label_index(*prev), label_index(*tri)) << r;
      }
      prev = tri;
    }
  }
}

TEST(BuildDataset, Examples) {
  const auto rows = rows_for(3);
  const auto ratings = ratings_for({2.0, 5.0, 8.0});
  const auto bi = build_dataset(rows, ratings, AffectDimension::Valence, PartitionScheme::Bipartition);
  EXPECT_EQ(bi.y, (std::vector<Label>{Label::Low, Label::High}));
  EXPECT_EQ(bi.keys, (std::vector<TrialKey>{{1, 1}, {1, 3}}));
  const auto tri = build_dataset(rows, ratings, AffectDimension::Valence, PartitionScheme::Tripartition);
  EXPECT_EQ(tri.y, (std::vector<Label>{Label::Low, Label::Medium, Label::High}));

  std::set<TrialKey> tri_minus_medium;
  for (std::size_t i = 0; i < tri.rows(); ++i)
    if (tri.y[i] != Label::Medium) tri_minus_medium.insert(tri.keys[i]);
  EXPECT_EQ(std::set<TrialKey>(bi.keys.begin(), bi.keys.end()), tri_minus_medium);
}

TEST(BuildDataset, Errors) {
  const auto rows = rows_for(3);
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code([&] { build_dataset(rows, ratings_for({5, 5, 5}), AffectDimension::Valence, PartitionScheme::Bipartition); }),
            ErrorCode::EmptyAfterExclusion);
  EXPECT_EQ(code([&] { build_dataset(rows, ratings_for({2, 2, 5}), AffectDimension::Valence, PartitionScheme::Bipartition); }),
            ErrorCode::SingleClassDataset);
  EXPECT_EQ(code([&] { build_dataset(rows, ratings_for({2, 8}), AffectDimension::Valence, PartitionScheme::Bipartition); }),
            ErrorCode::MissingRating);
  auto bad = rows;
  bad[1].features.layout = {{"Fp2", "alpha", "spd"}};
  EXPECT_EQ(code([&] { build_dataset(bad, ratings_for({2, 5, 8}), AffectDimension::Valence, PartitionScheme::Bipartition); }),
            ErrorCode::LayoutMismatch);
}

TEST(BuildDataset, UsesRequestedDimension) {
  const auto rows = rows_for(2);
  std::map<TrialKey, Ratings> r = {{{1, 1}, {5.0, 1.5, {}, {}}}, {{1, 2}, {5.0, 8.5, {}, {}}}};
  const auto ds = build_dataset(rows, r, AffectDimension::Arousal, PartitionScheme::Bipartition);
  EXPECT_EQ(ds.y, (std::vector<Label>{Label::Low, Label::High}));
  EXPECT_EQ(ds.dimension, AffectDimension::Arousal);
}
