#pragma once

// Morpheme vectors (the exponent matrix), smart initialization by counting,
// the competition matrix and strict row-wise winner extraction.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "geomorph/error.hpp"
#include "geomorph/feature_core.hpp"
#include "geomorph/matrix.hpp"

namespace geomorph {

inline constexpr double kUnitNormTolerance = 1e-9;

// NumFeaVal x NumMorph; column j is the vector of morphemes[j].
struct ExponentMatrix {
  Matrix columns;
  std::vector<std::string> morphemes;

  std::size_t num_values() const noexcept { return columns.rows(); }
  std::size_t num_morphemes() const noexcept { return columns.cols(); }

  std::size_t morpheme_index(const std::string& label) const {
    for (std::size_t j = 0; j < morphemes.size(); ++j)
      if (morphemes[j] == label) return j;
    throw Error(ErrorKind::UnknownValue, "no morpheme '" + label + "'");
  }

  double max_norm_drift() const {
    double worst = 0.0;
    for (std::size_t j = 0; j < num_morphemes(); ++j)
      worst = std::max(worst, std::abs(norm2(columns.column(j)) - 1.0));
    return worst;
  }
};

// NumParaPos x NumMorph indicator matrix. Rows are one-hot for gold data; a
// predicted row is all zero when the row's maximum was tied.
struct TotalParadigmMatrix {
  Matrix entries;
  std::vector<std::string> row_labels;
  std::vector<std::string> morphemes;

  std::size_t num_cells() const noexcept { return entries.rows(); }

  std::optional<std::size_t> winner(std::size_t row) const {
    for (std::size_t j = 0; j < entries.cols(); ++j)
      if (entries(row, j) == 1.0) return j;
    return std::nullopt;
  }

  friend bool operator==(const TotalParadigmMatrix&, const TotalParadigmMatrix&) = default;
};

struct CompetitionMatrix {
  Matrix entries;  // (i, j) = <phi row i, morpheme j>
  std::vector<std::string> row_labels;
  std::vector<std::string> morphemes;
};

struct CountArray {
  Matrix entries;  // NumFeaVal x NumMorph
  std::vector<std::string> morphemes;
};

inline std::vector<std::string> row_label_strings(const PhiMatrix& phi, const FeatureSystem& fs) {
  std::vector<std::string> out;
  for (const auto& cell : phi.row_labels) out.push_back(cell_label(cell, fs));
  return out;
}

// Gold TPM from one morpheme label per cell (in phi row order).
inline TotalParadigmMatrix make_tpm(const PhiMatrix& phi, const FeatureSystem& fs,
                                    const std::vector<std::string>& morphemes,
                                    const std::vector<std::string>& gold_per_cell) {
  if (gold_per_cell.size() != phi.num_cells())
    throw Error(ErrorKind::ShapeMismatch, "one gold morpheme per cell expected");
  TotalParadigmMatrix tpm{Matrix(phi.num_cells(), morphemes.size()), row_label_strings(phi, fs), morphemes};
  for (std::size_t i = 0; i < gold_per_cell.size(); ++i) {
    std::size_t j = morphemes.size();
    for (std::size_t k = 0; k < morphemes.size(); ++k)
      if (morphemes[k] == gold_per_cell[i]) j = k;
    if (j == morphemes.size()) throw Error(ErrorKind::UnknownValue, "no morpheme '" + gold_per_cell[i] + "'");
    tpm.entries(i, j) = 1.0;
  }
  return tpm;
}

// Phi^T * diag(weights) * gold. With unit weights, entry (v, j) counts the gold
// cells of morpheme j whose corner includes value v.
inline CountArray count_features(const PhiMatrix& phi, const TotalParadigmMatrix& gold,
                                 const std::optional<std::vector<double>>& weights = std::nullopt) {
  if (gold.num_cells() != phi.num_cells())
    throw Error(ErrorKind::ShapeMismatch, "phi has " + std::to_string(phi.num_cells()) + " rows, gold has " +
                                              std::to_string(gold.num_cells()));
  if (weights && weights->size() != phi.num_cells())
    throw Error(ErrorKind::ShapeMismatch, "one weight per paradigm cell expected");
  Matrix weighted = gold.entries;
  if (weights) {
    for (std::size_t i = 0; i < weighted.rows(); ++i) {
      if (!((*weights)[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "weights must be positive");
      for (std::size_t j = 0; j < weighted.cols(); ++j) weighted(i, j) *= (*weights)[i];
    }
  }
  return CountArray{multiply(phi.entries.transpose(), weighted), gold.morphemes};
}

inline ExponentMatrix normalize_columns(const CountArray& counts) {
  ExponentMatrix b{counts.entries, counts.morphemes};
  for (std::size_t j = 0; j < b.num_morphemes(); ++j) {
    Vector col = b.columns.column(j);
    double n = norm2(col);
    if (n == 0.0) throw Error(ErrorKind::ZeroColumn, "morpheme '" + b.morphemes[j] + "' is never attested");
    for (double& x : col) x /= n;
    b.columns.set_column(j, col);
  }
  return b;
}

inline ExponentMatrix smart_init(const PhiMatrix& phi, const TotalParadigmMatrix& gold,
                                 const std::optional<std::vector<double>>& weights = std::nullopt) {
  return normalize_columns(count_features(phi, gold, weights));
}

inline CompetitionMatrix competition(const PhiMatrix& phi, const ExponentMatrix& b,
                                     std::vector<std::string> row_labels = {}) {
  if (phi.num_values() != b.num_values())
    throw Error(ErrorKind::ShapeMismatch, "phi has " + std::to_string(phi.num_values()) + " columns, B has " +
                                              std::to_string(b.num_values()) + " rows");
  return CompetitionMatrix{multiply(phi.entries, b.columns), std::move(row_labels), b.morphemes};
}

struct MaxRowsResult {
  TotalParadigmMatrix tpm;
  std::vector<std::size_t> tied_rows;
};

// Strict row maximum: entry (i, j) is 1 only if c(i, j) > c(i, k) for all k != j.
inline MaxRowsResult max_rows(const CompetitionMatrix& c) {
  const Matrix& m = c.entries;
  MaxRowsResult out{TotalParadigmMatrix{Matrix(m.rows(), m.cols()), c.row_labels, c.morphemes}, {}};
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.cols() == 0) continue;
    std::size_t best = 0;
    bool tied = false;
    for (std::size_t j = 1; j < m.cols(); ++j) {
      if (m(i, j) > m(i, best)) {
        best = j;
        tied = false;
      } else if (m(i, j) == m(i, best)) {
        tied = true;
      }
    }
    if (tied)
      out.tied_rows.push_back(i);
    else
      out.tpm.entries(i, best) = 1.0;
  }
  return out;
}

struct Evaluation {
  std::vector<std::size_t> mismatches;  // rows whose predicted winner differs from gold
  std::vector<std::size_t> tied_rows;
  std::vector<double> margins;  // gold activation minus best rival; negative when wrong
  double min_margin = std::numeric_limits<double>::infinity();

  bool all_correct() const noexcept { return mismatches.empty(); }
};

inline double gold_margin(const Matrix& activations, std::size_t row, std::size_t gold) {
  double rival = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < activations.cols(); ++k)
    if (k != gold) rival = std::max(rival, activations(row, k));
  return activations(row, gold) - rival;
}

inline Evaluation evaluate(const CompetitionMatrix& c, const TotalParadigmMatrix& gold) {
  if (c.entries.rows() != gold.num_cells() || c.entries.cols() != gold.entries.cols())
    throw Error(ErrorKind::ShapeMismatch, "competition and gold differ in shape");
  if (c.morphemes != gold.morphemes) throw Error(ErrorKind::ShapeMismatch, "morpheme labels differ");
  MaxRowsResult predicted = max_rows(c);
  Evaluation ev;
  ev.tied_rows = predicted.tied_rows;
  for (std::size_t i = 0; i < gold.num_cells(); ++i) {
    auto g = gold.winner(i);
    if (!g) throw Error(ErrorKind::InvalidArgument, "gold row " + std::to_string(i) + " has no morpheme");
    if (predicted.tpm.winner(i) != g) ev.mismatches.push_back(i);
    double margin = gold_margin(c.entries, i, *g);
    ev.margins.push_back(margin);
    ev.min_margin = std::min(ev.min_margin, margin);
  }
  return ev;
}

// Compares two indicator matrices cell by cell.
inline std::vector<std::size_t> mismatched_rows(const TotalParadigmMatrix& predicted, const TotalParadigmMatrix& gold) {
  if (predicted.entries.rows() != gold.entries.rows() || predicted.entries.cols() != gold.entries.cols())
    throw Error(ErrorKind::ShapeMismatch, "TPMs differ in shape");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < gold.num_cells(); ++i)
    if (predicted.winner(i) != gold.winner(i)) out.push_back(i);
  return out;
}

}  // namespace geomorph
