#pragma once

// Delta Rule training of morpheme vectors. For a visited cell i every
// morpheme column moves by
//   mu_j += eta * (t_ij - a_ij) * phi_i
// and is then rescaled to unit length. One step is one pass over the cells in
// phi row order.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "geomorph/error.hpp"
#include "geomorph/exponence.hpp"

namespace geomorph {

enum class UpdateSchedule {
  // Cells are visited in order; each error is judged against the current
  // vectors and its update is applied and renormalized before the next cell.
  Online,
  // Errors are judged once at the start of the step; all updates are summed,
  // applied together and renormalized once.
  Batch,
};

struct TrainConfig {
  double eta = 0.1;
  bool error_driven = true;
  std::size_t max_iters = 100;
  double tolerance = 0.0;  // reported against the final min margin; not a stopping rule
  UpdateSchedule schedule = UpdateSchedule::Online;
};

struct TrainRecord {
  std::size_t iteration = 0;
  std::size_t mismatches = 0;
  double min_margin = 0.0;
  std::vector<std::string> updated;  // morphemes whose column changed in this step
};

struct TrainTrace {
  std::vector<TrainRecord> records;  // records[0] describes the starting matrix
  bool converged = false;
  std::size_t iterations = 0;
  bool margin_within_tolerance = false;
};

struct TrainResult {
  ExponentMatrix b;
  TrainTrace trace;
};

inline void check_train_inputs(const ExponentMatrix& b, const PhiMatrix& phi, const TotalParadigmMatrix& gold) {
  if (phi.num_values() != b.num_values() || gold.num_cells() != phi.num_cells() ||
      gold.entries.cols() != b.num_morphemes())
    throw Error(ErrorKind::ShapeMismatch, "B, phi and gold are not conformable");
}

struct StepOutcome {
  ExponentMatrix b;
  std::vector<std::string> updated;
};

namespace detail {

inline void renormalize_column(ExponentMatrix& b, std::size_t j) {
  Vector col = b.columns.column(j);
  double n = norm2(col);
  if (n == 0.0) throw Error(ErrorKind::ZeroColumn, "update collapsed morpheme '" + b.morphemes[j] + "'");
  for (double& x : col) x /= n;
  b.columns.set_column(j, col);
}

// True unless the gold morpheme strictly beats every rival.
inline bool row_is_wrong(std::span<const double> activations, std::size_t gold) {
  for (std::size_t k = 0; k < activations.size(); ++k)
    if (k != gold && activations[k] >= activations[gold]) return true;
  return false;
}

inline double activation(const ExponentMatrix& b, std::span<const double> corner, std::size_t j) {
  double sum = 0.0;
  for (std::size_t v = 0; v < corner.size(); ++v) sum += corner[v] * b.columns(v, j);
  return sum;
}

}  // namespace detail

// Raw change for one visited cell, before renormalization: column j moves by
// eta * (t_j - a_j) * corner, with a_j taken from b.
inline Matrix delta_increment(const ExponentMatrix& b, std::span<const double> corner,
                              std::span<const double> targets, double eta) {
  if (corner.size() != b.num_values() || targets.size() != b.num_morphemes())
    throw Error(ErrorKind::ShapeMismatch, "corner or targets do not fit B");
  Matrix inc(b.num_values(), b.num_morphemes());
  for (std::size_t j = 0; j < b.num_morphemes(); ++j) {
    double scale = eta * (targets[j] - detail::activation(b, corner, j));
    for (std::size_t v = 0; v < corner.size(); ++v) inc(v, j) = scale * corner[v];
  }
  return inc;
}

inline StepOutcome delta_step_detailed(const ExponentMatrix& b, const PhiMatrix& phi, const TotalParadigmMatrix& gold,
                                       const TrainConfig& cfg) {
  if (!(cfg.eta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be non-negative");
  check_train_inputs(b, phi, gold);
  for (std::size_t i = 0; i < gold.num_cells(); ++i)
    if (!gold.winner(i)) throw Error(ErrorKind::InvalidArgument, "gold row " + std::to_string(i) + " is empty");

  const std::size_t nv = b.num_values();
  const std::size_t nm = b.num_morphemes();
  StepOutcome out{b, {}};
  std::vector<bool> touched(nm, false);

  if (cfg.schedule == UpdateSchedule::Online) {
    for (std::size_t i = 0; i < phi.num_cells(); ++i) {
      auto phi_i = phi.entries.row(i);
      std::vector<double> act(nm);
      for (std::size_t j = 0; j < nm; ++j) act[j] = detail::activation(out.b, phi_i, j);
      if (cfg.error_driven && !detail::row_is_wrong(act, *gold.winner(i))) continue;
      if (cfg.eta == 0.0) continue;
      Matrix inc = delta_increment(out.b, phi_i, gold.entries.row(i), cfg.eta);
      for (std::size_t j = 0; j < nm; ++j) {
        if (gold.entries(i, j) == act[j]) continue;
        for (std::size_t v = 0; v < nv; ++v) out.b.columns(v, j) += inc(v, j);
        detail::renormalize_column(out.b, j);
        touched[j] = true;
      }
    }
  } else {
    const CompetitionMatrix act = competition(phi, b);
    Matrix delta(nv, nm);
    for (std::size_t i = 0; i < phi.num_cells(); ++i) {
      if (cfg.error_driven && !detail::row_is_wrong(act.entries.row(i), *gold.winner(i))) continue;
      Matrix inc = delta_increment(b, phi.entries.row(i), gold.entries.row(i), cfg.eta);
      for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t j = 0; j < nm; ++j) delta(v, j) += inc(v, j);
    }
    for (std::size_t j = 0; j < nm; ++j) {
      for (std::size_t v = 0; v < nv; ++v) touched[j] = touched[j] || delta(v, j) != 0.0;
      if (!touched[j]) continue;
      for (std::size_t v = 0; v < nv; ++v) out.b.columns(v, j) += delta(v, j);
      detail::renormalize_column(out.b, j);
    }
  }

  for (std::size_t j = 0; j < nm; ++j)
    if (touched[j]) out.updated.push_back(b.morphemes[j]);
  return out;
}

inline ExponentMatrix delta_step(const ExponentMatrix& b, const PhiMatrix& phi, const TotalParadigmMatrix& gold,
                                 const TrainConfig& cfg) {
  return delta_step_detailed(b, phi, gold, cfg).b;
}

inline TrainResult train(const ExponentMatrix& b0, const PhiMatrix& phi, const TotalParadigmMatrix& gold,
                         const TrainConfig& cfg) {
  if (!(cfg.eta > 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be positive");
  if (cfg.max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be at least 1");
  check_train_inputs(b0, phi, gold);

  TrainResult result{b0, {}};
  auto record = [&](std::size_t iteration, std::vector<std::string> updated) {
    Evaluation ev = evaluate(competition(phi, result.b), gold);
    result.trace.records.push_back({iteration, ev.mismatches.size(), ev.min_margin, std::move(updated)});
    return ev.all_correct();
  };

  bool done = record(0, {});
  std::size_t iteration = 0;
  while (!done && iteration < cfg.max_iters) {
    StepOutcome step = delta_step_detailed(result.b, phi, gold, cfg);
    result.b = std::move(step.b);
    ++iteration;
    done = record(iteration, std::move(step.updated));
  }
  result.trace.converged = done;
  result.trace.iterations = iteration;
  result.trace.margin_within_tolerance = result.trace.records.back().min_margin >= cfg.tolerance;
  return result;
}

}  // namespace geomorph
