#include <gtest/gtest.h>

#include "support.hpp"

using namespace geomorph;

namespace {

constexpr double kPi = std::numbers::pi;

double deg(double d) { return d * kPi / 180.0; }

AngleModel spanish() { return angle_model(load_input("spanish")); }

}  // namespace

TEST(AngleOfSum, Bisector) {
  EXPECT_NEAR(angle_of_sum(0.7, 0.7).angle, 0.7, 1e-15);
  EXPECT_NEAR(angle_of_sum(0.7, 0.7).magnitude, 2.0, 1e-15);
  EXPECT_NEAR(angle_of_sum(deg(60), 0.0).angle, deg(30), 1e-15);
  EXPECT_NEAR(angle_of_sum(deg(60), 0.0).magnitude, std::sqrt(3.0), 1e-15);
  // across the branch cut the short way round
  EXPECT_NEAR(angle_of_sum(deg(170), deg(-170)).angle, kPi, 1e-12);
}

TEST(AngleOfSum, MatchesVectorSum) {
  gmtest::Gen g(11);
  for (int k = 0; k < 200; ++k) {
    double a = g.real(-kPi, kPi), b = g.real(-kPi, kPi);
    if (std::abs(std::abs(wrap_angle(a - b)) - kPi) < 1e-6) continue;
    double x = std::cos(a) + std::cos(b), y = std::sin(a) + std::sin(b);
    SumAngle s = angle_of_sum(a, b);
    EXPECT_NEAR(std::abs(wrap_angle(s.angle - std::atan2(y, x))), 0.0, 1e-9);
    EXPECT_NEAR(s.magnitude, std::hypot(x, y), 1e-12);
  }
}

TEST(AngleOfSum, AutoPlusS) {
  SumAngle s = angle_of_sum(deg(-31.568), deg(28.909));
  EXPECT_NEAR(to_degrees(s.angle), -1.3295, 1e-3);
  EXPECT_NEAR(s.magnitude, 10.765 / 6.23, 0.01);
}

TEST(AngleOfSum, AntipodalThrows) {
  try {
    angle_of_sum(0.3, 0.3 + kPi);
    FAIL() << "antipodal sum accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateSum);
  }
}

TEST(SelectAffix, SpanishSecondPerson) {
  AngleModel m = spanish();
  EXPECT_EQ(select_affix_for_stem(m, "cant", 0.0).affix, "as");
  EXPECT_EQ(select_affix_for_stem(m, "com", 0.0).affix, "es");
  EXPECT_EQ(select_affix_for_stem(m, "cant", kPi / 2).affix, "o");
  EXPECT_EQ(select_affix_for_stem(m, "com", kPi / 2).affix, "o");
}

TEST(SelectAffix, SpanishSumsAgainstFigure) {
  AngleModel m = spanish();
  auto sum = [&](const char* s, const char* a) { return angle_of_sum(m.stem(s).radians, m.affix(a).radians); };
  EXPECT_NEAR(to_degrees(sum("cant", "as").angle), -0.289, 0.01);
  EXPECT_NEAR(to_degrees(sum("com", "as").angle), 51.49, 0.01);
  EXPECT_NEAR(to_degrees(sum("com", "es").angle), 41.92, 0.01);
  EXPECT_NEAR(sum("com", "as").magnitude, 9.368 / 6.23, 0.01);
  EXPECT_NEAR(sum("com", "es").magnitude, 7.87 / 6.23, 0.01);
  EXPECT_NEAR(sum("cant", "es").magnitude, 12.46 / 6.23, 0.01);
}

TEST(SelectAffix, UnknownStemAndEmptyInventory) {
  AngleModel m = spanish();
  try {
    select_affix_for_stem(m, "habl", 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownStem);
  }
  m.affixes.clear();
  try {
    select_affix_for_stem(m, "cant", 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInventory);
  }
}

TEST(SelectAffix, NdDistanceVersion) {
  ParadigmFile f = load_input("spanish");
  AngleModel m = angle_model(f);
  CompositionInventory inv = composition_inventory(f, m);
  ASSERT_EQ(inv.gold_forms.size(), 4u);
  for (const auto& form : inv.gold_forms) {
    Vector corner = corner_vector(form.cell, f.features);
    AffixSelection s = select_affix_for_stem(inv, form.stem, corner);
    ASSERT_TRUE(s.affix.has_value());
  }
}

TEST(SelectPair, NearestSumWins) {
  CompositionInventory inv;
  inv.stems = {{"s1", {1, 0, 0}}, {"s2", {0, 1, 0}}};
  inv.affixes = {{"a1", {0, 0, 1}}, {"a2", {1, 0, 0}}};
  Vector corner{1, 0, 1};
  PairSelection p = select_pair(inv, corner);
  ASSERT_TRUE(p.winner);
  EXPECT_EQ(p.winner->first, "s1");
  EXPECT_EQ(p.winner->second, "a1");
  EXPECT_NEAR(p.distance, 0.0, 1e-15);
}

TEST(SelectPair, TieLeavesNoWinner) {
  CompositionInventory inv;
  inv.stems = {{"s", {1, 0}}};
  inv.affixes = {{"a", {0, 1}}, {"b", {0, 1}}};
  PairSelection p = select_pair(inv, Vector{1, 1});
  EXPECT_FALSE(p.winner);
  EXPECT_EQ(p.tied.size(), 2u);
  inv.affixes.clear();
  EXPECT_THROW(select_pair(inv, Vector{1, 1}), Error);
}

TEST(TargetAngle, PlaneAxes) {
  ParadigmFile f = load_input("german_plurals");
  EXPECT_NEAR(target_angle_for(make_cell(f.features, {"pl"}), f.features, "pl", "sg"), 0.0, 0.0);
  EXPECT_NEAR(target_angle_for(make_cell(f.features, {"sg"}), f.features, "pl", "sg"), kPi / 2, 1e-15);
}

TEST(LearnAngles, GermanPluralsSeedOne) {
  AngleLearnData data = angle_learn_data(load_input("german_plurals"));
  AngleLearnResult r = learn_angles(data, AngleLearnConfig{});
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 500u);
  for (const auto& t : data.targets) EXPECT_EQ(select_affix_for_stem(r.model, t.stem, t.target_angle).affix, t.affix);
  const double bound = kPi / 2 - 0.01 / 2;
  for (const auto& s : r.model.stems) EXPECT_LE(std::abs(s.radians), bound + 1e-12);
  for (const auto& a : r.model.affixes) EXPECT_LE(std::abs(a.radians), bound + 1e-12);
}

TEST(LearnAngles, SeedDeterminesResult) {
  AngleLearnData data = angle_learn_data(load_input("german_plurals"));
  AngleLearnConfig cfg;
  cfg.seed = 42;
  AngleLearnResult a = learn_angles(data, cfg);
  AngleLearnResult b = learn_angles(data, cfg);
  EXPECT_EQ(a.model.stems, b.model.stems);
  EXPECT_EQ(a.model.affixes, b.model.affixes);
  EXPECT_EQ(a.adjustments, b.adjustments);
  cfg.seed = 43;
  AngleLearnResult c = learn_angles(data, cfg);
  EXPECT_NE(a.model.stems, c.model.stems);
}

TEST(LearnAngles, ObserverSeesEveryAdjustment) {
  AngleLearnData data = angle_learn_data(load_input("german_plurals"));
  std::size_t calls = 0;
  AngleLearnResult r = learn_angles(data, AngleLearnConfig{},
                                    [&](std::size_t, std::size_t, std::size_t gold, std::size_t rival, double) {
                                      EXPECT_NE(gold, rival);
                                      ++calls;
                                    });
  EXPECT_EQ(calls, r.adjustments);
}

TEST(LearnAngles, PassLimitReportsNotConverged) {
  AngleLearnData data = angle_learn_data(load_input("german_plurals"));
  AngleLearnConfig cfg;
  cfg.max_iters = 1;
  AngleLearnResult r = learn_angles(data, cfg);
  EXPECT_FALSE(r.converged);
}

TEST(LearnAngles, BadInputs) {
  AngleLearnData data = angle_learn_data(load_input("german_plurals"));
  AngleLearnConfig cfg;
  cfg.stepsize = 0.0;
  EXPECT_THROW(learn_angles(data, cfg), Error);
  data.targets.push_back({"Haus", 0.0, "er"});
  EXPECT_THROW(learn_angles(data, AngleLearnConfig{}), Error);
}
