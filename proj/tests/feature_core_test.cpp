#include <gtest/gtest.h>

#include "support.hpp"

using namespace geomorph;

namespace {

FeatureSystem english() {
  return build_feature_system({{"tense", {"past", "present"}},
                               {"person", {"1st", "2nd", "3rd"}},
                               {"number", {"sg", "pl"}}});
}

}  // namespace

TEST(FeatureSystem, CoordinatesFollowDeclarationOrder) {
  FeatureSystem fs = english();
  EXPECT_EQ(fs.num_features(), 3u);
  EXPECT_EQ(fs.num_values(), 7u);
  EXPECT_EQ(fs.value_names(), (std::vector<std::string>{"past", "present", "1st", "2nd", "3rd", "sg", "pl"}));
  EXPECT_EQ(fs.index_of("3rd"), 4u);
  EXPECT_EQ(fs.feature_of(4), 1u);
  EXPECT_EQ(fs.block_begin(2), 5u);
  EXPECT_EQ(fs.block_end(2), 7u);
}

TEST(FeatureSystem, RejectsBadDeclarations) {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  EXPECT_EQ(kind_of([] { build_feature_system({}); }), ErrorKind::EmptyFeature);
  EXPECT_EQ(kind_of([] { build_feature_system({{"number", {"sg"}}}); }), ErrorKind::EmptyFeature);
  EXPECT_EQ(kind_of([] { build_feature_system({{"a", {"x", "y"}}, {"b", {"y", "z"}}}); }), ErrorKind::DuplicateValue);
  EXPECT_EQ(kind_of([] { build_feature_system({{"a", {"x", "y"}}, {"a", {"u", "v"}}}); }), ErrorKind::DuplicateValue);
}

TEST(Corner, ThirdSingularPresent) {
  FeatureSystem fs = english();
  Vector c = corner_vector(make_cell(fs, {"present", "3rd", "sg"}), fs);
  EXPECT_EQ(c, (Vector{0, 1, 0, 0, 1, 1, 0}));
}

TEST(Corner, OneOnePerBlock) {
  FeatureSystem fs = english();
  for (const auto& cell : full_cross_product(fs)) {
    Vector c = corner_vector(cell, fs);
    for (std::size_t f = 0; f < fs.num_features(); ++f) {
      double sum = 0.0;
      for (std::size_t k = fs.block_begin(f); k < fs.block_end(f); ++k) sum += c[k];
      EXPECT_EQ(sum, 1.0);
    }
  }
}

TEST(Cell, UnknownAndMisplacedValues) {
  FeatureSystem fs = english();
  EXPECT_THROW(corner_vector(make_cell(fs, {"present", "4th", "sg"}), fs), Error);
  EXPECT_THROW(corner_vector(make_cell(fs, {"present", "sg", "3rd"}), fs), Error);
  EXPECT_THROW(make_cell(fs, {"present", "3rd"}), Error);
  EXPECT_EQ(cell_label(make_cell(fs, {"past", "2nd", "pl"}), fs), "past,2nd,pl");
}

TEST(Phi, FullEnglishParadigm) {
  FeatureSystem fs = english();
  PhiMatrix phi = build_phi(fs, full_cross_product(fs));
  EXPECT_EQ(phi.num_cells(), 12u);
  EXPECT_EQ(phi.num_values(), 7u);
  for (std::size_t i = 0; i < 12; ++i) {
    double sum = 0.0;
    for (double x : phi.entries.row(i)) sum += x;
    EXPECT_EQ(sum, 3.0);
  }
  EXPECT_TRUE(validate_feature_blocks(phi, fs).empty());
}

TEST(Phi, DuplicateCellRejected) {
  FeatureSystem fs = english();
  auto c = make_cell(fs, {"past", "1st", "sg"});
  try {
    build_phi(fs, {c, c});
    FAIL() << "duplicate accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateCell);
  }
}

// Blocks are orthogonal and sum to the ones vector for any subset of cells
// built from corners; a hand-edited row breaks both.
TEST(Phi, BlockStructureViolations) {
  FeatureSystem fs = english();
  PhiMatrix phi = build_phi(fs, full_cross_product(fs));
  phi.entries(0, 1) = 1.0;  // row 0 now has past and present
  auto v = validate_feature_blocks(phi, fs);
  ASSERT_FALSE(v.empty());
  bool nonorth = false, sums = false;
  for (const auto& x : v) {
    nonorth = nonorth || x.kind == BlockViolation::Kind::NonOrthogonalColumns;
    sums = sums || x.kind == BlockViolation::Kind::BlockSumNotOnes;
  }
  EXPECT_TRUE(nonorth);
  EXPECT_TRUE(sums);
}

TEST(Phi, EveryFixtureHasBlockStructure) {
  for (const auto& name : bundled_fixture_names()) {
    ParadigmFile f = load_input(name);
    if (f.kind() != FileKind::Paradigm) continue;
    ParadigmData d = paradigm_data(f);
    EXPECT_TRUE(validate_feature_blocks(d.phi, d.features).empty()) << name;
  }
}
