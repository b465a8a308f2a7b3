#pragma once

// Stem + affix selection by vector sum.
//
// The general rule picks the (stem, affix) pair whose sum lies nearest the
// target corner. In a two-value plane every morpheme is a unit vector given by
// one angle, and the learner and the angle-based selectors compare the angle
// of the sum against the target axis instead.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geomorph/error.hpp"
#include "geomorph/feature_core.hpp"
#include "geomorph/matrix.hpp"

namespace geomorph {

// Maps any angle into (-pi, pi].
inline double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(radians, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

inline double to_degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

struct SumAngle {
  double angle;      // direction of the sum, in (-pi, pi]
  double magnitude;  // length of the sum, 2 cos(half the separation)
};

// Angle and length of u(a) + u(b) for unit vectors u(t) = (cos t, sin t).
// Equals the bisector (a + b) / 2 whenever |a - b| < pi.
inline SumAngle angle_of_sum(double a, double b) {
  double separation = wrap_angle(b - a);
  if (std::abs(std::abs(separation) - std::numbers::pi) < 1e-15)
    throw Error(ErrorKind::DegenerateSum, "antipodal vectors have no sum direction");
  double half = separation / 2.0;
  return {wrap_angle(a + half), 2.0 * std::cos(half)};
}

struct LabeledAngle {
  std::string label;
  double radians = 0.0;

  friend bool operator==(const LabeledAngle&, const LabeledAngle&) = default;
};

// Unit vectors in the plane spanned by two feature values; x = cos, y = sin.
struct AngleModel {
  std::string x_value;
  std::string y_value;
  std::vector<LabeledAngle> stems;
  std::vector<LabeledAngle> affixes;

  const LabeledAngle& stem(const std::string& label) const {
    for (const auto& s : stems)
      if (s.label == label) return s;
    throw Error(ErrorKind::UnknownStem, "'" + label + "'");
  }
  const LabeledAngle& affix(const std::string& label) const {
    for (const auto& a : affixes)
      if (a.label == label) return a;
    throw Error(ErrorKind::UnknownValue, "no affix '" + label + "'");
  }
};

struct LabeledVector {
  std::string label;
  Vector coords;
};

struct GoldForm {
  std::string stem;
  ParadigmCell cell;
  std::string affix;
};

struct CompositionInventory {
  std::vector<LabeledVector> stems;
  std::vector<LabeledVector> affixes;
  std::vector<GoldForm> gold_forms;
};

// Embeds a planar model into feature-value space.
inline CompositionInventory to_inventory(const AngleModel& model, const FeatureSystem& fs) {
  std::size_t x = fs.index_of(model.x_value);
  std::size_t y = fs.index_of(model.y_value);
  auto embed = [&](const LabeledAngle& la) {
    Vector v(fs.num_values(), 0.0);
    v[x] = std::cos(la.radians);
    v[y] = std::sin(la.radians);
    return LabeledVector{la.label, v};
  };
  CompositionInventory inv;
  for (const auto& s : model.stems) inv.stems.push_back(embed(s));
  for (const auto& a : model.affixes) inv.affixes.push_back(embed(a));
  return inv;
}

struct PairSelection {
  std::optional<std::pair<std::string, std::string>> winner;  // empty on a tie
  double distance = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::string, std::string>> tied;
};

inline double sum_distance(const Vector& stem, const Vector& affix, std::span<const double> corner) {
  if (stem.size() != corner.size() || affix.size() != corner.size())
    throw Error(ErrorKind::ShapeMismatch, "vector length differs from corner length");
  double sq = 0.0;
  for (std::size_t k = 0; k < corner.size(); ++k) {
    double d = stem[k] + affix[k] - corner[k];
    sq += d * d;
  }
  return std::sqrt(sq);
}

inline PairSelection select_pair(const CompositionInventory& inv, std::span<const double> corner) {
  if (inv.stems.empty() || inv.affixes.empty()) throw Error(ErrorKind::EmptyInventory, "no stems or no affixes");
  PairSelection out;
  for (const auto& s : inv.stems)
    for (const auto& a : inv.affixes) {
      double d = sum_distance(s.coords, a.coords, corner);
      if (d < out.distance) {
        out.distance = d;
        out.tied = {{s.label, a.label}};
      } else if (d == out.distance) {
        out.tied.emplace_back(s.label, a.label);
      }
    }
  if (out.tied.size() == 1) out.winner = out.tied.front();
  return out;
}

struct AffixSelection {
  std::optional<std::string> affix;  // empty on a tie
  double score = std::numeric_limits<double>::infinity();  // distance, or angle gap in the planar case
  std::vector<std::string> tied;
};

namespace detail {

// Angle between stem+affix and the target axis; an antipodal pair has no sum
// direction and scores the worst possible gap.
inline double sum_gap(double stem, double affix, double target) {
  if (std::abs(std::abs(wrap_angle(affix - stem)) - std::numbers::pi) < 1e-15) return std::numbers::pi;
  return std::abs(wrap_angle(angle_of_sum(stem, affix).angle - target));
}

inline void keep_best(AffixSelection& out, const std::string& label, double score) {
  if (score < out.score) {
    out.score = score;
    out.tied = {label};
  } else if (score == out.score) {
    out.tied.push_back(label);
  }
}

}  // namespace detail

// The stem is fixed; only the affix competes.
inline AffixSelection select_affix_for_stem(const CompositionInventory& inv, const std::string& stem,
                                            std::span<const double> corner) {
  if (inv.affixes.empty()) throw Error(ErrorKind::EmptyInventory, "no affixes");
  const LabeledVector* s = nullptr;
  for (const auto& candidate : inv.stems)
    if (candidate.label == stem) s = &candidate;
  if (s == nullptr) throw Error(ErrorKind::UnknownStem, "'" + stem + "'");
  AffixSelection out;
  for (const auto& a : inv.affixes) detail::keep_best(out, a.label, sum_distance(s->coords, a.coords, corner));
  if (out.tied.size() == 1) out.affix = out.tied.front();
  return out;
}

// Planar version: the affix whose sum with the stem makes the smallest angle
// with the target axis.
inline AffixSelection select_affix_for_stem(const AngleModel& model, const std::string& stem, double target_angle) {
  if (model.affixes.empty()) throw Error(ErrorKind::EmptyInventory, "no affixes");
  const LabeledAngle& s = model.stem(stem);
  AffixSelection out;
  for (const auto& a : model.affixes) {
    detail::keep_best(out, a.label, detail::sum_gap(s.radians, a.radians, target_angle));
  }
  if (out.tied.size() == 1) out.affix = out.tied.front();
  return out;
}

// One gold observation for the planar learner: the stem takes `affix` when
// the requested corner points along `target_angle`.
struct AngleTarget {
  std::string stem;
  double target_angle = 0.0;
  std::string affix;
};

struct AngleLearnData {
  std::string x_value;
  std::string y_value;
  std::vector<std::string> stems;
  std::vector<std::string> affixes;
  std::vector<AngleTarget> targets;
};

struct AngleLearnConfig {
  double stepsize = 0.01;
  double margin = 0.05;
  std::size_t max_iters = 500;
  std::uint64_t seed = 1;
};

struct AngleLearnResult {
  AngleModel model;
  bool converged = false;
  std::size_t iterations = 0;  // passes that made at least one adjustment
  std::size_t adjustments = 0;
};

namespace detail {

// Learned angles stay within half a step of the half-plane (-pi/2, pi/2) they
// are drawn from. Any two of them are then strictly less than pi apart, so
// their vector sum is never zero, its direction is exactly the arithmetic mean,
// and the learner's comparisons agree with the geometric selectors above.
inline double clamp_half_plane(double radians, double stepsize) {
  double bound = std::numbers::pi / 2.0 - stepsize / 2.0;
  return std::clamp(radians, -bound, bound);
}

inline double mean_gap(double stem, double affix, double target) { return std::abs((stem + affix) / 2.0 - target); }

inline double toward(double stem, double affix, double target) {
  double diff = target - (stem + affix) / 2.0;
  return diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
}

inline std::size_t index_in(const std::vector<std::string>& labels, const std::string& label, ErrorKind kind) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  throw Error(kind, "'" + label + "'");
}

}  // namespace detail

// Angles start uniform in (-pi/2, pi/2). Each pass walks stems, then affixes,
// then that affix's gold targets for the stem. Whenever a rival affix puts the
// sum within `margin` of the gold pair's gap (or closer), the stem and the gold
// affix each turn by one step so their sum approaches the target axis, and the
// rival turns so its sum recedes. Learning stops after the first pass that
// changes nothing.
//
// Called once per adjustment with (pass, stem, gold affix, rival affix, target angle).
using AngleAdjustObserver = std::function<void(std::size_t, std::size_t, std::size_t, std::size_t, double)>;

inline AngleLearnResult learn_angles(const AngleLearnData& data, const AngleLearnConfig& cfg,
                                     const AngleAdjustObserver& trace = {}) {
  if (!(cfg.stepsize > 0.0)) throw Error(ErrorKind::InvalidArgument, "stepsize must be positive");
  if (!(cfg.margin >= 0.0)) throw Error(ErrorKind::InvalidArgument, "margin must be non-negative");
  if (data.stems.empty() || data.affixes.empty()) throw Error(ErrorKind::EmptyInventory, "no stems or no affixes");

  struct Target {
    std::size_t stem;
    std::size_t affix;
    double angle;
  };
  std::vector<Target> targets;
  for (const auto& t : data.targets)
    targets.push_back({detail::index_in(data.stems, t.stem, ErrorKind::UnknownStem),
                       detail::index_in(data.affixes, t.affix, ErrorKind::UnknownValue), t.target_angle});
  for (std::size_t s = 0; s < data.stems.size(); ++s) {
    bool has_target = false;
    for (const auto& t : targets) has_target = has_target || t.stem == s;
    if (!has_target) throw Error(ErrorKind::InvalidArgument, "stem '" + data.stems[s] + "' has no gold form");
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> initial(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  std::vector<double> stem_angle(data.stems.size());
  std::vector<double> affix_angle(data.affixes.size());
  for (double& a : stem_angle) a = initial(rng);
  for (double& a : affix_angle) a = initial(rng);

  AngleLearnResult result;
  for (std::size_t pass = 0; pass < cfg.max_iters; ++pass) {
    std::size_t adjusted = 0;
    for (std::size_t s = 0; s < data.stems.size(); ++s)
      for (std::size_t a = 0; a < data.affixes.size(); ++a)
        for (const auto& t : targets) {
          if (t.stem != s || t.affix != a) continue;
          for (std::size_t r = 0; r < data.affixes.size(); ++r) {
            if (r == a) continue;
            double gold_gap = detail::mean_gap(stem_angle[s], affix_angle[a], t.angle);
            double rival_gap = detail::mean_gap(stem_angle[s], affix_angle[r], t.angle);
            if (rival_gap >= gold_gap + cfg.margin) continue;
            double in = detail::toward(stem_angle[s], affix_angle[a], t.angle);
            double out = -detail::toward(stem_angle[s], affix_angle[r], t.angle);
            stem_angle[s] = detail::clamp_half_plane(stem_angle[s] + in * cfg.stepsize, cfg.stepsize);
            affix_angle[a] = detail::clamp_half_plane(affix_angle[a] + in * cfg.stepsize, cfg.stepsize);
            affix_angle[r] = detail::clamp_half_plane(affix_angle[r] + out * cfg.stepsize, cfg.stepsize);
            if (trace) trace(pass, s, a, r, t.angle);
            ++adjusted;
          }
        }
    if (adjusted == 0) {
      result.converged = true;
      break;
    }
    ++result.iterations;
    result.adjustments += adjusted;
  }

  result.model.x_value = data.x_value;
  result.model.y_value = data.y_value;
  for (std::size_t s = 0; s < data.stems.size(); ++s) result.model.stems.push_back({data.stems[s], stem_angle[s]});
  for (std::size_t a = 0; a < data.affixes.size(); ++a)
    result.model.affixes.push_back({data.affixes[a], affix_angle[a]});
  return result;
}

// Angle of a cell's corner projected into the model plane.
inline double target_angle_for(const ParadigmCell& cell, const FeatureSystem& fs, const std::string& x_value,
                               const std::string& y_value) {
  Vector corner = corner_vector(cell, fs);
  double x = corner[fs.index_of(x_value)];
  double y = corner[fs.index_of(y_value)];
  if (x == 0.0 && y == 0.0)
    throw Error(ErrorKind::InvalidArgument, "cell (" + cell_label(cell, fs) + ") does not touch the plane");
  return std::atan2(y, x);
}

}  // namespace geomorph
