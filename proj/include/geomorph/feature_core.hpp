#pragma once

// Feature systems, paradigm cells and the cell-to-corner matrix.
//
// Feature-value space has one coordinate per feature value. Coordinates are
// laid out feature by feature in declaration order, and within a feature in
// the order its values were declared.

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "geomorph/error.hpp"
#include "geomorph/matrix.hpp"

namespace geomorph {

struct Feature {
  std::string name;
  std::vector<std::string> values;

  friend bool operator==(const Feature&, const Feature&) = default;
};

class FeatureSystem {
 public:
  FeatureSystem() = default;

  const std::vector<Feature>& features() const noexcept { return features_; }
  std::size_t num_features() const noexcept { return features_.size(); }
  std::size_t num_values() const noexcept { return value_names_.size(); }

  bool has_value(const std::string& value) const { return value_index_.contains(value); }

  std::size_t index_of(const std::string& value) const {
    auto it = value_index_.find(value);
    if (it == value_index_.end()) throw Error(ErrorKind::UnknownValue, "'" + value + "'");
    return it->second;
  }

  const std::string& value_name(std::size_t coord) const { return value_names_.at(coord); }
  const std::vector<std::string>& value_names() const noexcept { return value_names_; }

  // Index of the feature owning a coordinate.
  std::size_t feature_of(std::size_t coord) const { return owner_.at(coord); }

  // First coordinate of feature f's block.
  std::size_t block_begin(std::size_t f) const { return offsets_.at(f); }
  std::size_t block_end(std::size_t f) const { return offsets_.at(f) + features_.at(f).values.size(); }

  std::size_t feature_index(const std::string& name) const {
    for (std::size_t f = 0; f < features_.size(); ++f)
      if (features_[f].name == name) return f;
    throw Error(ErrorKind::UnknownValue, "no feature named '" + name + "'");
  }

  friend bool operator==(const FeatureSystem& a, const FeatureSystem& b) { return a.features_ == b.features_; }

 private:
  friend FeatureSystem build_feature_system(const std::vector<std::pair<std::string, std::vector<std::string>>>&);

  std::vector<Feature> features_;
  std::vector<std::string> value_names_;
  std::vector<std::size_t> owner_;
  std::vector<std::size_t> offsets_;
  std::map<std::string, std::size_t> value_index_;
};

inline FeatureSystem build_feature_system(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& declarations) {
  if (declarations.empty()) throw Error(ErrorKind::EmptyFeature, "no features declared");
  FeatureSystem fs;
  std::set<std::string> feature_names;
  for (const auto& [name, values] : declarations) {
    if (name.empty()) throw Error(ErrorKind::InvalidArgument, "empty feature name");
    if (!feature_names.insert(name).second)
      throw Error(ErrorKind::DuplicateValue, "feature '" + name + "' declared twice");
    if (values.size() < 2)
      throw Error(ErrorKind::EmptyFeature, "feature '" + name + "' needs at least two values");
    fs.offsets_.push_back(fs.value_names_.size());
    for (const auto& value : values) {
      if (value.empty()) throw Error(ErrorKind::InvalidArgument, "empty value in feature '" + name + "'");
      if (!fs.value_index_.emplace(value, fs.value_names_.size()).second)
        throw Error(ErrorKind::DuplicateValue, "value '" + value + "' appears twice");
      fs.value_names_.push_back(value);
      fs.owner_.push_back(fs.features_.size());
    }
    fs.features_.push_back(Feature{name, values});
  }
  return fs;
}

// One position in the paradigm: a value for every feature.
struct ParadigmCell {
  std::map<std::string, std::string> assignment;

  friend bool operator==(const ParadigmCell&, const ParadigmCell&) = default;
  friend auto operator<=>(const ParadigmCell&, const ParadigmCell&) = default;
};

// Builds a cell from one value per feature, given in declaration order.
inline ParadigmCell make_cell(const FeatureSystem& fs, const std::vector<std::string>& values) {
  if (values.size() != fs.num_features())
    throw Error(ErrorKind::InvalidArgument, "expected " + std::to_string(fs.num_features()) +
                                                " values, got " + std::to_string(values.size()));
  ParadigmCell cell;
  for (std::size_t f = 0; f < values.size(); ++f) cell.assignment[fs.features()[f].name] = values[f];
  return cell;
}

// Cell values in feature declaration order.
inline std::vector<std::string> cell_values(const ParadigmCell& cell, const FeatureSystem& fs) {
  std::vector<std::string> out;
  for (const auto& feature : fs.features()) {
    auto it = cell.assignment.find(feature.name);
    if (it == cell.assignment.end())
      throw Error(ErrorKind::InvalidArgument, "cell has no value for feature '" + feature.name + "'");
    out.push_back(it->second);
  }
  return out;
}

inline std::string cell_label(const ParadigmCell& cell, const FeatureSystem& fs) {
  std::string label;
  for (const auto& v : cell_values(cell, fs)) {
    if (!label.empty()) label += ',';
    label += v;
  }
  return label;
}

inline Vector corner_vector(const ParadigmCell& cell, const FeatureSystem& fs) {
  Vector corner(fs.num_values(), 0.0);
  for (std::size_t f = 0; f < fs.num_features(); ++f) {
    const auto& feature = fs.features()[f];
    auto it = cell.assignment.find(feature.name);
    if (it == cell.assignment.end())
      throw Error(ErrorKind::InvalidArgument, "cell has no value for feature '" + feature.name + "'");
    if (!fs.has_value(it->second)) throw Error(ErrorKind::UnknownValue, "'" + it->second + "'");
    std::size_t coord = fs.index_of(it->second);
    if (fs.feature_of(coord) != f)
      throw Error(ErrorKind::UnknownValue,
                  "'" + it->second + "' is not a value of feature '" + feature.name + "'");
    corner[coord] = 1.0;
  }
  for (const auto& [name, value] : cell.assignment) {
    bool known = false;
    for (const auto& feature : fs.features()) known = known || feature.name == name;
    if (!known) throw Error(ErrorKind::UnknownValue, "cell names unknown feature '" + name + "'");
  }
  return corner;
}

// Every combination of values, first feature outermost.
inline std::vector<ParadigmCell> full_cross_product(const FeatureSystem& fs) {
  std::vector<std::vector<std::string>> combos{{}};
  for (const auto& feature : fs.features()) {
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : combos)
      for (const auto& value : feature.values) {
        auto extended = prefix;
        extended.push_back(value);
        next.push_back(std::move(extended));
      }
    combos = std::move(next);
  }
  std::vector<ParadigmCell> cells;
  for (const auto& combo : combos) cells.push_back(make_cell(fs, combo));
  return cells;
}

struct PhiMatrix {
  Matrix entries;  // NumParaPos x NumFeaVal, 0/1
  std::vector<ParadigmCell> row_labels;

  std::size_t num_cells() const noexcept { return entries.rows(); }
  std::size_t num_values() const noexcept { return entries.cols(); }
};

inline PhiMatrix build_phi(const FeatureSystem& fs, const std::vector<ParadigmCell>& cells) {
  if (cells.empty()) throw Error(ErrorKind::InvalidArgument, "no paradigm cells");
  std::set<ParadigmCell> seen;
  PhiMatrix phi{Matrix(cells.size(), fs.num_values()), cells};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    Vector corner = corner_vector(cells[i], fs);
    if (!seen.insert(cells[i]).second)
      throw Error(ErrorKind::DuplicateCell, "(" + cell_label(cells[i], fs) + ") listed twice");
    for (std::size_t c = 0; c < corner.size(); ++c) phi.entries(i, c) = corner[c];
  }
  return phi;
}

struct BlockViolation {
  enum class Kind { NonOrthogonalColumns, BlockSumNotOnes };
  Kind kind;
  std::string feature;
  std::size_t column_a = 0;  // NonOrthogonalColumns: the column pair
  std::size_t column_b = 0;
  std::size_t row = 0;  // BlockSumNotOnes: first offending row

  std::string describe(const FeatureSystem& fs) const {
    if (kind == Kind::NonOrthogonalColumns)
      return "feature " + feature + ": columns " + fs.value_name(column_a) + " and " + fs.value_name(column_b) +
             " are not orthogonal";
    return "feature " + feature + ": block columns do not sum to ones at row " + std::to_string(row);
  }
};

// Checks that the columns of each feature block are pairwise orthogonal and sum
// to the all-ones vector. Returns one entry per violation; empty means valid.
inline std::vector<BlockViolation> validate_feature_blocks(const PhiMatrix& phi, const FeatureSystem& fs) {
  if (phi.num_values() != fs.num_values())
    throw Error(ErrorKind::ShapeMismatch, "phi has " + std::to_string(phi.num_values()) + " columns, feature system " +
                                              std::to_string(fs.num_values()) + " values");
  std::vector<BlockViolation> out;
  const Matrix& m = phi.entries;
  for (std::size_t f = 0; f < fs.num_features(); ++f) {
    const std::string& name = fs.features()[f].name;
    for (std::size_t a = fs.block_begin(f); a < fs.block_end(f); ++a)
      for (std::size_t b = a + 1; b < fs.block_end(f); ++b) {
        double ip = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) ip += m(r, a) * m(r, b);
        if (ip != 0.0) out.push_back({BlockViolation::Kind::NonOrthogonalColumns, name, a, b, 0});
      }
    for (std::size_t r = 0; r < m.rows(); ++r) {
      double sum = 0.0;
      for (std::size_t c = fs.block_begin(f); c < fs.block_end(f); ++c) sum += m(r, c);
      if (sum != 1.0) {
        out.push_back({BlockViolation::Kind::BlockSumNotOnes, name, 0, 0, r});
        break;
      }
    }
  }
  return out;
}

}  // namespace geomorph
