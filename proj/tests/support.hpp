#pragma once

// Shared by the unit, property and acceptance tests: fixture loading, small
// random generators and oracles that recompute results without going through
// the library's matrix code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "geomorph/commands.hpp"

namespace gmtest {

using namespace geomorph;

inline ParadigmData fixture_data(const std::string& name) { return paradigm_data(load_input(name)); }

// Row index of a cell given as "v1,v2,..".
inline std::size_t row_of(const ParadigmData& d, const std::string& label) {
  for (std::size_t i = 0; i < d.phi.num_cells(); ++i)
    if (cell_label(d.phi.row_labels[i], d.features) == label) return i;
  throw Error(ErrorKind::UnknownValue, "no cell " + label);
}

// ---- generators ----

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return pick(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

struct RandomParadigm {
  FeatureSystem fs;
  std::vector<ParadigmCell> cells;
  std::vector<std::string> morphemes;
  std::vector<std::string> gold;  // per cell
  PhiMatrix phi;
  TotalParadigmMatrix tpm;
};

// 1-4 features of 2-4 values, a random non-empty subset of the cross product,
// 2-4 morphemes each used at least once.
inline RandomParadigm random_paradigm(Gen& g) {
  RandomParadigm p;
  std::vector<std::pair<std::string, std::vector<std::string>>> decl;
  std::size_t nf = g.pick(1, 4);
  for (std::size_t f = 0; f < nf; ++f) {
    std::vector<std::string> values;
    std::size_t nv = g.pick(2, 4);
    for (std::size_t v = 0; v < nv; ++v) values.push_back("v" + std::to_string(f) + "_" + std::to_string(v));
    decl.emplace_back("f" + std::to_string(f), values);
  }
  p.fs = build_feature_system(decl);
  std::vector<ParadigmCell> all = full_cross_product(p.fs);
  std::shuffle(all.begin(), all.end(), g.engine());
  std::size_t nm = std::min<std::size_t>(g.pick(2, 4), all.size());
  std::size_t nc = g.pick(nm, all.size());
  p.cells.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(nc));
  for (std::size_t j = 0; j < nm; ++j) p.morphemes.push_back("m" + std::to_string(j));
  for (std::size_t i = 0; i < nc; ++i) p.gold.push_back(i < nm ? p.morphemes[i] : p.morphemes[g.pick(0, nm - 1)]);
  p.phi = build_phi(p.fs, p.cells);
  p.tpm = make_tpm(p.phi, p.fs, p.morphemes, p.gold);
  return p;
}

// Random unit columns.
inline ExponentMatrix random_b(Gen& g, std::size_t values, const std::vector<std::string>& morphemes) {
  ExponentMatrix b{Matrix(values, morphemes.size()), morphemes};
  for (std::size_t j = 0; j < morphemes.size(); ++j) {
    Vector col(values);
    double n = 0.0;
    while (n < 1e-3) {
      for (double& x : col) x = g.real(-1.0, 1.0);
      n = norm2(col);
    }
    for (double& x : col) x /= n;
    b.columns.set_column(j, col);
  }
  return b;
}

inline std::vector<PlaneRotation> random_plan(Gen& g, std::size_t dim, std::size_t steps) {
  std::vector<PlaneRotation> out;
  for (std::size_t k = 0; k < steps; ++k) {
    std::size_t i = g.pick(0, dim - 1);
    std::size_t j = g.pick(0, dim - 2);
    if (j >= i) ++j;
    out.push_back({i, j, g.real(-std::numbers::pi, std::numbers::pi)});
  }
  return out;
}

// ---- oracles ----

// Smart init by counting directly over cell assignments: for morpheme m and
// value v, the weighted number of gold cells of m whose assignment names v;
// then each column divided by its length.
inline std::map<std::string, std::map<std::string, double>> counting_oracle(
    const std::vector<ParadigmCell>& cells, const std::vector<std::string>& gold,
    const std::vector<double>& weights = {}) {
  std::map<std::string, std::map<std::string, double>> counts;  // morpheme -> value -> count
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double w = weights.empty() ? 1.0 : weights[i];
    for (const auto& kv : cells[i].assignment) counts[gold[i]][kv.second] += w;
  }
  for (auto& [m, col] : counts) {
    double sq = 0.0;
    for (const auto& kv : col) sq += kv.second * kv.second;
    for (auto& kv : col) kv.second /= std::sqrt(sq);
  }
  return counts;
}

// Activation of morpheme m at a cell under the counting oracle.
inline double oracle_activation(const std::map<std::string, std::map<std::string, double>>& b,
                                const ParadigmCell& cell, const std::string& m) {
  double a = 0.0;
  auto it = b.find(m);
  if (it == b.end()) return 0.0;
  for (const auto& kv : cell.assignment) {
    auto v = it->second.find(kv.second);
    if (v != it->second.end()) a += v->second;
  }
  return a;
}

// Exhaustive pair search with the distance expanded as
// |s|^2 + |a|^2 + |c|^2 + 2 s.a - 2 s.c - 2 a.c.
struct PairOracle {
  std::string stem;
  std::string affix;
  double distance;
  double runner_up;
};

inline PairOracle pair_oracle(const CompositionInventory& inv, const Vector& corner) {
  auto dot3 = [](const Vector& x, const Vector& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
  };
  std::vector<std::pair<double, std::pair<std::string, std::string>>> all;
  for (const auto& s : inv.stems)
    for (const auto& a : inv.affixes) {
      double sq = dot3(s.coords, s.coords) + dot3(a.coords, a.coords) + dot3(corner, corner) +
                  2 * dot3(s.coords, a.coords) - 2 * dot3(s.coords, corner) - 2 * dot3(a.coords, corner);
      all.push_back({std::sqrt(std::max(sq, 0.0)), {s.label, a.label}});
    }
  std::sort(all.begin(), all.end());
  double runner = all.size() > 1 ? all[1].first : std::numeric_limits<double>::infinity();
  return {all[0].second.first, all[0].second.second, all[0].first, runner};
}

// 1/2 sum_j (t_j - <corner, mu_j>)^2 for one cell.
inline double cell_loss(const ExponentMatrix& b, const Vector& corner, const Vector& targets) {
  double loss = 0.0;
  for (std::size_t j = 0; j < b.num_morphemes(); ++j) {
    double a = 0.0;
    for (std::size_t v = 0; v < corner.size(); ++v) a += corner[v] * b.columns(v, j);
    loss += 0.5 * (targets[j] - a) * (targets[j] - a);
  }
  return loss;
}

}  // namespace gmtest
