#pragma once

// The CLI pipelines. Each command takes a bundled fixture name or a file path
// and returns a RunReport whose exit_code is
//   0 success / converged, 1 input error, 2 not converged, 3 tie in evaluation.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "geomorph/bundled_fixtures.hpp"
#include "geomorph/composition.hpp"
#include "geomorph/delta_trainer.hpp"
#include "geomorph/error.hpp"
#include "geomorph/exponence.hpp"
#include "geomorph/paradigm_file.hpp"
#include "geomorph/report.hpp"
#include "geomorph/rotation_classes.hpp"

namespace geomorph {

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitNotConverged = 2, kExitTie = 3 };

// A class in a rotate batch counts as learned when this share of its runs
// converges.
inline constexpr double kBatchConvergenceShare = 0.95;

struct CommandOptions {
  std::string input;
  std::optional<double> eta;
  std::optional<std::size_t> max_iters;
  std::uint64_t seed = 1;
  std::optional<double> stepsize;
  std::optional<double> margin;
  std::optional<double> increment;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> min_lexemes;
  bool error_driven = true;
  bool batch = false;     // train: batch schedule instead of online
  bool deponent = false;  // select/train: rotate B by 3pi/2 in (active, passive) first
};

// --seed wins, then GEOMORPH_SEED, then 1.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const char* env_value) {
  if (flag) return *flag;
  if (env_value != nullptr && *env_value != '\0') {
    std::string s = env_value;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw Error(ErrorKind::InvalidArgument, "GEOMORPH_SEED must be an unsigned integer, got '" + s + "'");
    return v;
  }
  return 1;
}

inline std::optional<std::string_view> bundled_fixture(std::string_view name) {
  if (name.size() > 3 && name.substr(name.size() - 3) == ".gm") name.remove_suffix(3);
  if (name == "nuer") name = "nuer_classes";
  for (const auto& f : bundled::fixtures)
    if (f.name == name) return f.text;
  return std::nullopt;
}

inline std::vector<std::string> bundled_fixture_names() {
  std::vector<std::string> out;
  for (const auto& f : bundled::fixtures) out.emplace_back(f.name);
  return out;
}

// Existing paths take precedence over fixture names.
inline ParadigmFile load_input(const std::string& input) {
  if (std::filesystem::is_regular_file(input)) return parse_paradigm_file(input);
  if (auto text = bundled_fixture(input)) return parse_paradigm(*text);
  throw Error(ErrorKind::InvalidArgument, "'" + input + "' is neither a file nor a bundled fixture");
}

namespace detail {

inline RunReport new_report(const std::string& command, const CommandOptions& opt) {
  RunReport r;
  r.command = command;
  r.source = opt.input;
  return r;
}

inline std::vector<std::string> mismatch_labels(const Evaluation& ev, const TotalParadigmMatrix& gold) {
  std::vector<std::string> out;
  for (std::size_t i : ev.mismatches) out.push_back(gold.row_labels.at(i));
  return out;
}

inline ExponentMatrix maybe_deponent(const ExponentMatrix& b, const FeatureSystem& fs, bool deponent) {
  if (!deponent) return b;
  if (!fs.has_value("active") || !fs.has_value("passive"))
    throw Error(ErrorKind::BadAxis, "--deponent needs feature values 'active' and 'passive'");
  return deponent_transform(b, fs.index_of("active"), fs.index_of("passive"));
}

inline void add_evaluation(RunReport& r, const CompetitionMatrix& c, const TotalParadigmMatrix& gold) {
  Evaluation ev = evaluate(c, gold);
  r.winners = winner_rows(c, gold, ev);
  r.mismatches = mismatch_labels(ev, gold);
  r.summary["cells"] = gold.num_cells();
  r.summary["correct"] = gold.num_cells() - ev.mismatches.size();
  r.summary["ties"] = ev.tied_rows.size();
  r.summary["min_margin"] = number_or_null(ev.min_margin);
}

}  // namespace detail

inline RunReport cmd_init(const CommandOptions& opt) {
  ParadigmFile file = load_input(opt.input);
  RunReport r = detail::new_report("init", opt);
  if (file.kind() == FileKind::Classes) {
    std::size_t min_lexemes = opt.min_lexemes.value_or(3);
    r.config["min_lexemes"] = min_lexemes;
    ClassInventory inv = class_inventory(file);
    CountArray counts = weighted_counts(inv, min_lexemes);
    r.tables.push_back({"counts", "value", file.features.value_names(), counts.morphemes, counts.entries});
    r.tables.push_back(table_of("B", normalize_columns(counts), file.features.value_names()));
    return r;
  }
  ParadigmData data = paradigm_data(file);
  CountArray counts = count_features(data.phi, data.gold);
  r.tables.push_back({"counts", "value", file.features.value_names(), counts.morphemes, counts.entries});
  r.tables.push_back(table_of("B", normalize_columns(counts), file.features.value_names()));
  return r;
}

inline RunReport cmd_select(const CommandOptions& opt) {
  ParadigmFile file = load_input(opt.input);
  ParadigmData data = paradigm_data(file);
  RunReport r = detail::new_report("select", opt);
  r.config["deponent"] = opt.deponent;
  ExponentMatrix b = detail::maybe_deponent(smart_init(data.phi, data.gold), data.features, opt.deponent);
  CompetitionMatrix c = competition(data.phi, b, data.gold.row_labels);
  r.tables.push_back(table_of("B", b, data.features.value_names()));
  r.tables.push_back(table_of("competition", c));
  detail::add_evaluation(r, c, data.gold);
  if (r.summary["ties"].get<std::size_t>() > 0) {
    r.status = "tie";
    r.exit_code = kExitTie;
  }
  return r;
}

inline RunReport cmd_train(const CommandOptions& opt) {
  ParadigmFile file = load_input(opt.input);
  ParadigmData data = paradigm_data(file);
  RunReport r = detail::new_report("train", opt);
  TrainConfig cfg;
  cfg.eta = opt.eta.value_or(cfg.eta);
  cfg.max_iters = opt.max_iters.value_or(cfg.max_iters);
  cfg.error_driven = opt.error_driven;
  cfg.schedule = opt.batch ? UpdateSchedule::Batch : UpdateSchedule::Online;
  r.config["eta"] = cfg.eta;
  r.config["max_iters"] = cfg.max_iters;
  r.config["error_driven"] = cfg.error_driven;
  r.config["schedule"] = opt.batch ? "batch" : "online";
  r.config["deponent"] = opt.deponent;

  ExponentMatrix b0 = detail::maybe_deponent(smart_init(data.phi, data.gold), data.features, opt.deponent);
  TrainResult result = train(b0, data.phi, data.gold, cfg);
  CompetitionMatrix c = competition(data.phi, result.b, data.gold.row_labels);
  r.tables.push_back(table_of("B", result.b, data.features.value_names()));
  r.tables.push_back(table_of("competition", c));
  detail::add_evaluation(r, c, data.gold);
  r.summary["converged"] = result.trace.converged;
  r.summary["iterations"] = result.trace.iterations;
  for (const auto& rec : result.trace.records)
    r.trace.push_back(Json{{"iteration", rec.iteration},
                           {"mismatches", rec.mismatches},
                           {"min_margin", number_or_null(rec.min_margin)},
                           {"updated", rec.updated}});
  if (!result.trace.converged) {
    bool tie = r.summary["ties"].get<std::size_t>() > 0;
    r.status = tie ? "tie" : "not_converged";
    r.exit_code = tie ? kExitTie : kExitNotConverged;
  }
  return r;
}

inline RunReport cmd_compose(const CommandOptions& opt) {
  ParadigmFile file = load_input(opt.input);
  if (file.kind() != FileKind::Composition) throw Error(ErrorKind::InvalidArgument, "file has no STEM/AFFIX lines");
  RunReport r = detail::new_report("compose", opt);
  AngleModel model;
  bool converged = true;
  if (has_all_angles(file)) {
    model = angle_model(file);
    r.config["angles"] = "given";
  } else {
    AngleLearnConfig cfg;
    cfg.stepsize = opt.stepsize.value_or(cfg.stepsize);
    cfg.margin = opt.margin.value_or(cfg.margin);
    cfg.max_iters = opt.max_iters.value_or(cfg.max_iters);
    cfg.seed = opt.seed;
    r.config["angles"] = "learned";
    r.config["stepsize"] = cfg.stepsize;
    r.config["margin"] = cfg.margin;
    r.config["max_iters"] = cfg.max_iters;
    r.config["seed"] = cfg.seed;
    AngleLearnResult learned = learn_angles(angle_learn_data(file), cfg);
    model = learned.model;
    converged = learned.converged;
    r.summary["converged"] = learned.converged;
    r.summary["iterations"] = learned.iterations;
    r.summary["adjustments"] = learned.adjustments;
  }

  LabeledTable angles{"angles", "morpheme", {}, {"radians", "degrees", model.x_value, model.y_value}, {}};
  std::vector<LabeledAngle> all = model.stems;
  all.insert(all.end(), model.affixes.begin(), model.affixes.end());
  angles.entries = Matrix(all.size(), 4);
  for (std::size_t i = 0; i < all.size(); ++i) {
    angles.row_labels.push_back(all[i].label);
    angles.entries(i, 0) = all[i].radians;
    angles.entries(i, 1) = to_degrees(all[i].radians);
    angles.entries(i, 2) = std::cos(all[i].radians);
    angles.entries(i, 3) = std::sin(all[i].radians);
  }
  r.tables.push_back(std::move(angles));

  LabeledTable sums{"sums", "stem+affix", {}, {"degrees", "magnitude"}, {}};
  std::vector<double> flat;
  for (const auto& s : model.stems)
    for (const auto& a : model.affixes) {
      sums.row_labels.push_back(s.label + "+" + a.label);
      if (std::abs(std::abs(wrap_angle(a.radians - s.radians)) - std::numbers::pi) < 1e-15) {
        flat.insert(flat.end(), {std::nan(""), 0.0});
        continue;
      }
      SumAngle sa = angle_of_sum(s.radians, a.radians);
      flat.insert(flat.end(), {to_degrees(sa.angle), sa.magnitude});
    }
  sums.entries = Matrix(sums.row_labels.size(), 2);
  for (std::size_t i = 0; i < sums.row_labels.size(); ++i) {
    sums.entries(i, 0) = flat[2 * i];
    sums.entries(i, 1) = flat[2 * i + 1];
  }
  r.tables.push_back(std::move(sums));

  std::size_t ties = 0;
  for (const auto& f : file.forms) {
    ParadigmCell cell = make_cell(file.features, f.values);
    double target = target_angle_for(cell, file.features, model.x_value, model.y_value);
    AffixSelection sel = select_affix_for_stem(model, f.stem, target);
    WinnerRow w{f.stem + " " + cell_label(cell, file.features), sel.affix, f.affix, std::nullopt};
    // Margin: best rival's angle gap minus the gold pair's gap.
    double gold_gap = detail::sum_gap(model.stem(f.stem).radians, model.affix(f.affix).radians, target);
    double rival = std::numeric_limits<double>::infinity();
    for (const auto& a : model.affixes)
      if (a.label != f.affix) rival = std::min(rival, detail::sum_gap(model.stem(f.stem).radians, a.radians, target));
    if (std::isfinite(rival)) w.margin = rival - gold_gap;
    if (!sel.affix) ++ties;
    if (sel.affix != f.affix) r.mismatches.push_back(w.cell);
    r.winners.push_back(std::move(w));
  }
  r.summary["forms"] = file.forms.size();
  r.summary["correct"] = file.forms.size() - r.mismatches.size();
  r.summary["ties"] = ties;
  if (!converged) {
    r.status = "not_converged";
    r.exit_code = kExitNotConverged;
  } else if (ties > 0) {
    r.status = "tie";
    r.exit_code = kExitTie;
  }
  return r;
}

inline RunReport cmd_rotate(const CommandOptions& opt) {
  ParadigmFile file = load_input(opt.input);
  ClassInventory inv = class_inventory(file);
  RunReport r = detail::new_report("rotate", opt);
  RotationLearnConfig cfg;
  cfg.base_increment = opt.increment.value_or(cfg.base_increment);
  cfg.max_iters = opt.max_iters.value_or(cfg.max_iters);
  cfg.runs = opt.runs.value_or(cfg.runs);
  cfg.seed = opt.seed;
  cfg.margin_floor = opt.margin.value_or(cfg.margin_floor);
  std::size_t min_lexemes = opt.min_lexemes.value_or(3);
  r.config["increment"] = cfg.base_increment;
  r.config["max_iters"] = cfg.max_iters;
  r.config["runs"] = cfg.runs;
  r.config["seed"] = cfg.seed;
  r.config["margin_floor"] = cfg.margin_floor;
  r.config["min_lexemes"] = min_lexemes;

  ExponentMatrix base = base_configuration(inv, min_lexemes);
  r.tables.push_back(table_of("base", base, inv.features.value_names()));
  CompetitionMatrix c = competition(inv.phi, base, row_label_strings(inv.phi, inv.features));
  r.tables.push_back(table_of("base_competition", c));
  auto base_class = class_of_base(base, inv);
  r.summary["base_class"] = base_class ? Json(*base_class) : Json(nullptr);

  LabeledTable classes{"classes", "class", {}, {"lexemes", "distance", "smallest_margin", "iterations",
                                                 "converged_runs", "runs"}, Matrix(inv.classes.size(), 6)};
  Json plans = Json::array();
  std::size_t failed = 0;
  for (std::size_t k = 0; k < inv.classes.size(); ++k) {
    const InflectionClass& cls = inv.classes[k];
    ClassBatchSummary s = learn_class_batch(base, inv, cls, cfg);
    classes.row_labels.push_back(cls.label);
    classes.entries(k, 0) = static_cast<double>(cls.lexemes);
    classes.entries(k, 1) = static_cast<double>(s.distance_from_base);
    classes.entries(k, 2) = s.converged_runs > 0 ? s.smallest_margin : std::nan("");
    classes.entries(k, 3) = s.converged_runs > 0 ? s.mean_iterations : std::nan("");
    classes.entries(k, 4) = static_cast<double>(s.converged_runs);
    classes.entries(k, 5) = static_cast<double>(s.runs);
    bool learned = static_cast<double>(s.converged_runs) >= kBatchConvergenceShare * static_cast<double>(s.runs);
    if (!learned) {
      ++failed;
      r.mismatches.push_back(cls.label);
    }
    Json rotations = Json::array();
    for (const auto& rot : s.first_plan.rotations)
      rotations.push_back(Json{{"i", rot.axis_i}, {"j", rot.axis_j}, {"theta", rot.theta}});
    plans.push_back(Json{{"class", cls.label},
                         {"converged", learned},
                         {"converged_runs", s.converged_runs},
                         {"runs", s.runs},
                         {"rotations", std::move(rotations)}});
  }
  r.tables.push_back(std::move(classes));
  r.summary["classes"] = inv.classes.size();
  r.summary["classes_learned"] = inv.classes.size() - failed;
  r.summary["plans"] = std::move(plans);
  if (failed > 0) {
    r.status = "not_converged";
    r.exit_code = kExitNotConverged;
  }
  return r;
}

inline RunReport cmd_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SyntaxError, "'" + path + "' is not a JSON report: " + e.what());
  }
  try {
    return report_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SyntaxError, "'" + path + "' does not match report schema: " + e.what());
  }
}

}  // namespace geomorph
