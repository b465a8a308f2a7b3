#pragma once

// Inflection classes as rotations of one rigid base configuration.
//
// A plane rotation (i, j, theta) acts on every morpheme column alike, so
// lengths and pairwise angles of the configuration never change; only its
// orientation relative to the cell corners does.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "geomorph/error.hpp"
#include "geomorph/exponence.hpp"
#include "geomorph/feature_core.hpp"
#include "geomorph/matrix.hpp"

namespace geomorph {

struct PlaneRotation {
  std::size_t axis_i = 0;
  std::size_t axis_j = 1;
  double theta = 0.0;

  friend bool operator==(const PlaneRotation&, const PlaneRotation&) = default;
};

struct RotationPlan {
  std::string class_label;
  std::vector<PlaneRotation> rotations;
};

struct InflectionClass {
  std::string label;
  TotalParadigmMatrix tpm;
  std::size_t lexemes = 1;
};

// Classes share phi rows and morpheme labels; order follows declaration.
struct ClassInventory {
  FeatureSystem features;
  PhiMatrix phi;
  std::vector<std::string> morphemes;
  std::vector<InflectionClass> classes;

  const InflectionClass& find(const std::string& label) const {
    for (const auto& c : classes)
      if (c.label == label) return c;
    throw Error(ErrorKind::UnknownValue, "no class '" + label + "'");
  }
};

struct RotationLearnConfig {
  double base_increment = 0.1;
  std::size_t max_iters = 1000;
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  double margin_floor = 0.02;
};

// Full NumFeaVal x NumFeaVal matrix: identity except the (i, j) block
// [[c, -s], [s, c]].
inline Matrix rotation_matrix(std::size_t dim, const PlaneRotation& r) {
  if (r.axis_i >= dim || r.axis_j >= dim || r.axis_i == r.axis_j)
    throw Error(ErrorKind::BadAxis, "rotation axes (" + std::to_string(r.axis_i) + ", " + std::to_string(r.axis_j) +
                                        ") invalid for dimension " + std::to_string(dim));
  Matrix m(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) m(k, k) = 1.0;
  double c = std::cos(r.theta);
  double s = std::sin(r.theta);
  m(r.axis_i, r.axis_i) = c;
  m(r.axis_i, r.axis_j) = -s;
  m(r.axis_j, r.axis_i) = s;
  m(r.axis_j, r.axis_j) = c;
  return m;
}

namespace detail {

inline void rotate_in_place(Matrix& columns, const PlaneRotation& r) {
  const std::size_t dim = columns.rows();
  if (r.axis_i >= dim || r.axis_j >= dim || r.axis_i == r.axis_j)
    throw Error(ErrorKind::BadAxis, "rotation axes (" + std::to_string(r.axis_i) + ", " + std::to_string(r.axis_j) +
                                        ") invalid for dimension " + std::to_string(dim));
  double c = std::cos(r.theta);
  double s = std::sin(r.theta);
  for (std::size_t col = 0; col < columns.cols(); ++col) {
    double xi = columns(r.axis_i, col);
    double xj = columns(r.axis_j, col);
    columns(r.axis_i, col) = c * xi - s * xj;
    columns(r.axis_j, col) = s * xi + c * xj;
  }
}

}  // namespace detail

inline ExponentMatrix apply_rotation(const ExponentMatrix& b, const std::vector<PlaneRotation>& rotations) {
  ExponentMatrix out = b;
  for (const auto& r : rotations) detail::rotate_in_place(out.columns, r);
  return out;
}

inline ExponentMatrix apply_rotation(const ExponentMatrix& b, const RotationPlan& plan) {
  return apply_rotation(b, plan.rotations);
}

// Lexeme-weighted smart init over the classes with at least min_lexemes
// lexemes. Each kept class contributes every one of its cells once per lexeme.
inline CountArray weighted_counts(const ClassInventory& inv, std::size_t min_lexemes) {
  std::optional<CountArray> total;
  for (const auto& c : inv.classes) {
    if (c.lexemes < min_lexemes) continue;
    std::vector<double> weights(inv.phi.num_cells(), static_cast<double>(c.lexemes));
    CountArray counts = count_features(inv.phi, c.tpm, weights);
    if (!total) {
      total = std::move(counts);
      continue;
    }
    for (std::size_t v = 0; v < counts.entries.rows(); ++v)
      for (std::size_t j = 0; j < counts.entries.cols(); ++j) total->entries(v, j) += counts.entries(v, j);
  }
  if (!total)
    throw Error(ErrorKind::EmptyFilter, "no class has at least " + std::to_string(min_lexemes) + " lexemes");
  return *total;
}

inline ExponentMatrix base_configuration(const ClassInventory& inv, std::size_t min_lexemes) {
  return normalize_columns(weighted_counts(inv, min_lexemes));
}

inline TotalParadigmMatrix predicted_tpm(const ExponentMatrix& b, const PhiMatrix& phi) {
  return max_rows(competition(phi, b)).tpm;
}

// First class whose paradigm the configuration realizes outright.
inline std::optional<std::string> class_of_base(const ExponentMatrix& b, const ClassInventory& inv) {
  TotalParadigmMatrix predicted = predicted_tpm(b, inv.phi);
  for (const auto& c : inv.classes)
    if (mismatched_rows(predicted, c.tpm).empty()) return c.label;
  return std::nullopt;
}

// Number of cells where two paradigms choose different exponents.
inline std::size_t hamming_distance(const TotalParadigmMatrix& a, const TotalParadigmMatrix& b) {
  return mismatched_rows(a, b).size();
}

inline double sigmoid_gain(double a_winner, double a_intended) {
  double s = 1.0 / (1.0 + std::exp(-2.0 * (a_winner - a_intended)));
  return s * s;
}

struct RotationOutcome {
  RotationPlan plan;
  bool converged = false;
  std::size_t iterations = 0;  // full passes over the cells
  double min_margin = -std::numeric_limits<double>::infinity();
  ExponentMatrix rotated;
};

namespace detail {

// The configuration is accepted once every cell picks its intended morpheme
// by at least the margin floor.
inline bool realizes(const ExponentMatrix& b, const PhiMatrix& phi, const TotalParadigmMatrix& target, double floor,
                     double& min_margin) {
  Evaluation ev = evaluate(competition(phi, b), target);
  min_margin = ev.min_margin;
  return ev.all_correct() && ev.min_margin >= floor;
}

}  // namespace detail

// One pass visits every cell in phi order, correct ones included. At cell i
// with intended morpheme w and strongest rival r:
//   away   = coordinate where B(., w) - B(., r) is largest (lowest index on ties)
//   toward = one of the cell's own coordinates other than away, drawn at random
//   angle  = base_increment * sigmoid_gain(a_r, a_w)
// and the sign is whichever of +angle / -angle leaves w with the larger
// toward coordinate. The gain is small while w wins comfortably and
// approaches 1 as r pulls ahead.
inline RotationOutcome learn_class_rotation(const ExponentMatrix& b_base, const PhiMatrix& phi,
                                            const TotalParadigmMatrix& target, const RotationLearnConfig& cfg,
                                            const std::string& class_label = {}) {
  if (!(cfg.base_increment > 0.0)) throw Error(ErrorKind::InvalidArgument, "base_increment must be positive");
  if (phi.num_values() != b_base.num_values() || target.num_cells() != phi.num_cells() ||
      target.morphemes != b_base.morphemes)
    throw Error(ErrorKind::ShapeMismatch, "target does not share phi and morphemes with the base");
  if (b_base.num_morphemes() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two morphemes");

  RotationOutcome out;
  out.plan.class_label = class_label;
  out.rotated = b_base;
  std::mt19937_64 rng(cfg.seed);
  const std::size_t nv = b_base.num_values();
  const std::size_t nm = b_base.num_morphemes();

  out.converged = detail::realizes(out.rotated, phi, target, cfg.margin_floor, out.min_margin);
  while (!out.converged && out.iterations < cfg.max_iters) {
    for (std::size_t i = 0; i < phi.num_cells(); ++i) {
      auto corner = phi.entries.row(i);
      std::size_t w = *target.winner(i);
      std::vector<double> act(nm);
      for (std::size_t j = 0; j < nm; ++j) {
        double sum = 0.0;
        for (std::size_t v = 0; v < nv; ++v) sum += corner[v] * out.rotated.columns(v, j);
        act[j] = sum;
      }
      std::size_t r = w == 0 ? 1 : 0;
      for (std::size_t j = 0; j < nm; ++j)
        if (j != w && act[j] > act[r]) r = j;

      std::size_t away = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < nv; ++v) {
        double lead = out.rotated.columns(v, w) - out.rotated.columns(v, r);
        if (lead > best) {
          best = lead;
          away = v;
        }
      }
      std::vector<std::size_t> options;
      for (std::size_t v = 0; v < nv; ++v)
        if (corner[v] != 0.0 && v != away) options.push_back(v);
      if (options.empty()) continue;
      std::size_t toward = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];

      double angle = cfg.base_increment * sigmoid_gain(act[r], act[w]);
      // Rotating in (away, toward) by theta sends w's toward coordinate to
      // sin(theta) * away + cos(theta) * toward.
      double xa = out.rotated.columns(away, w);
      double xt = out.rotated.columns(toward, w);
      double plus = std::sin(angle) * xa + std::cos(angle) * xt;
      double minus = -std::sin(angle) * xa + std::cos(angle) * xt;
      PlaneRotation step{away, toward, plus >= minus ? angle : -angle};
      detail::rotate_in_place(out.rotated.columns, step);
      out.plan.rotations.push_back(step);
    }
    ++out.iterations;
    out.converged = detail::realizes(out.rotated, phi, target, cfg.margin_floor, out.min_margin);
  }
  return out;
}

// Per-run seeds are drawn from one generator seeded by cfg.seed, so a batch is
// reproducible and runs do not share streams.
inline std::vector<std::uint64_t> run_seeds(std::uint64_t seed, std::size_t runs) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 gen(seq);
  std::vector<std::uint64_t> out(runs);
  for (auto& s : out) s = gen();
  return out;
}

struct ClassBatchSummary {
  std::string class_label;
  std::size_t distance_from_base = 0;
  std::size_t runs = 0;
  std::size_t converged_runs = 0;
  double smallest_margin = std::numeric_limits<double>::infinity();  // over converged runs
  double mean_iterations = 0.0;  // over converged runs
  RotationPlan first_plan;       // from the first converged run
};

inline ClassBatchSummary learn_class_batch(const ExponentMatrix& base, const ClassInventory& inv,
                                           const InflectionClass& cls, const RotationLearnConfig& cfg) {
  if (cfg.runs < 1) throw Error(ErrorKind::InvalidArgument, "runs must be at least 1");
  ClassBatchSummary s;
  s.class_label = cls.label;
  s.runs = cfg.runs;
  s.distance_from_base = hamming_distance(predicted_tpm(base, inv.phi), cls.tpm);
  double total_iterations = 0.0;
  for (std::uint64_t seed : run_seeds(cfg.seed, cfg.runs)) {
    RotationLearnConfig one = cfg;
    one.seed = seed;
    RotationOutcome o = learn_class_rotation(base, inv.phi, cls.tpm, one, cls.label);
    if (!o.converged) continue;
    if (s.converged_runs == 0) s.first_plan = o.plan;
    ++s.converged_runs;
    total_iterations += static_cast<double>(o.iterations);
    s.smallest_margin = std::min(s.smallest_margin, o.min_margin);
  }
  if (s.converged_runs > 0) s.mean_iterations = total_iterations / static_cast<double>(s.converged_runs);
  return s;
}

// Three-quarter turn in the (active, passive) plane: active takes the old
// passive value and passive takes minus the old active value.
inline PlaneRotation deponent_rotation(std::size_t active_axis, std::size_t passive_axis) {
  return PlaneRotation{active_axis, passive_axis, 3.0 * std::numbers::pi / 2.0};
}

inline ExponentMatrix deponent_transform(const ExponentMatrix& b, std::size_t active_axis, std::size_t passive_axis) {
  return apply_rotation(b, std::vector<PlaneRotation>{deponent_rotation(active_axis, passive_axis)});
}

}  // namespace geomorph
