#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geomorph/commands.hpp"

namespace {

using geomorph::CommandOptions;
using geomorph::RunReport;

struct Output {
  std::string format = "json";
  std::string out;
  std::string trace;
};

// Returns the report's exit code unless writing fails; a re-rendered report
// exits 0 whatever status it records.
int emit(const RunReport& report, const Output& o, bool propagate = true) {
  std::string text = o.format == "tsv" ? geomorph::render_tsv(report) : geomorph::to_json(report).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
      std::cerr << "geomorph: cannot write '" << o.out << "'\n";
      return geomorph::kExitInputError;
    }
    f << text;
  }
  if (!o.trace.empty()) {
    std::ofstream f(o.trace, std::ios::binary);
    if (!f) {
      std::cerr << "geomorph: cannot write '" << o.trace << "'\n";
      return geomorph::kExitInputError;
    }
    f << geomorph::render_jsonl(report.trace);
  }
  if (!propagate) return 0;
  if (report.exit_code != 0) std::cerr << "geomorph: " << report.command << ": " << report.status << "\n";
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric morphology: paradigms, exponent vectors, Delta Rule training, rotations"};
  app.require_subcommand(1);

  CommandOptions opt;
  Output out;
  std::optional<std::uint64_t> seed;
  std::string report_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("input", opt.input, "fixture name (see `geomorph fixtures`) or .gm file")->required();
    sub->add_option("--format", out.format, "output format")->check(CLI::IsMember({"json", "tsv"}));
    sub->add_option("--out", out.out, "write the report here instead of stdout");
  };

  auto* init = app.add_subcommand("init", "smart initialization of B (lexeme-weighted for class files)");
  common(init);
  init->add_option("--min-lexemes", opt.min_lexemes, "class files: smallest class kept in the base");

  auto* select = app.add_subcommand("select", "competition matrix and winners from smart-init B");
  common(select);
  select->add_flag("--deponent", opt.deponent, "rotate B a three-quarter turn in (active, passive) first");

  auto* train = app.add_subcommand("train", "Delta Rule training from smart-init B");
  common(train);
  train->add_option("--eta", opt.eta, "learning rate")->check(CLI::PositiveNumber);
  train->add_option("--max-iters", opt.max_iters, "step limit");
  train->add_flag("--error-driven,!--all-rows", opt.error_driven, "update only at mis-predicted cells (default)");
  train->add_flag("--batch", opt.batch, "sum one step's updates before renormalizing");
  train->add_flag("--deponent", opt.deponent, "rotate the starting B in (active, passive) first");
  train->add_option("--trace", out.trace, "write the per-iteration trace as JSON lines");

  auto* compose = app.add_subcommand("compose", "stem+affix selection; learns angles when none are given");
  common(compose);
  compose->add_option("--stepsize", opt.stepsize, "radians per adjustment")->check(CLI::PositiveNumber);
  compose->add_option("--margin", opt.margin, "required separation in radians")->check(CLI::NonNegativeNumber);
  compose->add_option("--max-iters", opt.max_iters, "pass limit");
  compose->add_option("--seed", seed, "RNG seed (falls back to GEOMORPH_SEED)");

  auto* rotate = app.add_subcommand("rotate", "learn each class as rotations of the weighted base");
  common(rotate);
  rotate->add_option("--increment", opt.increment, "base rotation increment in radians")->check(CLI::PositiveNumber);
  rotate->add_option("--runs", opt.runs, "seeded runs per class")->check(CLI::PositiveNumber);
  rotate->add_option("--max-iters", opt.max_iters, "pass limit per run");
  rotate->add_option("--margin", opt.margin, "smallest acceptable winning margin");
  rotate->add_option("--min-lexemes", opt.min_lexemes, "smallest class kept in the base");
  rotate->add_option("--seed", seed, "RNG seed (falls back to GEOMORPH_SEED)");

  auto* report = app.add_subcommand("report", "re-render a saved JSON report");
  report->add_option("report", report_path, "JSON report written by another command")->required();
  Output report_out;
  report_out.format = "tsv";
  report->add_option("--format", report_out.format, "output format")->check(CLI::IsMember({"json", "tsv"}));
  report->add_option("--out", report_out.out, "write here instead of stdout");

  auto* fixtures = app.add_subcommand("fixtures", "list bundled fixtures, or print one");
  std::string fixture_name;
  fixtures->add_option("name", fixture_name, "fixture to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : geomorph::kExitInputError;
  }
  try {
    opt.seed = geomorph::resolve_seed(seed, std::getenv("GEOMORPH_SEED"));
    if (fixtures->parsed()) {
      if (fixture_name.empty()) {
        for (const auto& n : geomorph::bundled_fixture_names()) std::cout << n << "\n";
        return 0;
      }
      auto text = geomorph::bundled_fixture(fixture_name);
      if (!text) {
        std::cerr << "geomorph: no bundled fixture '" << fixture_name << "'\n";
        return geomorph::kExitInputError;
      }
      std::cout << *text;
      return 0;
    }
    if (init->parsed()) return emit(geomorph::cmd_init(opt), out);
    if (select->parsed()) return emit(geomorph::cmd_select(opt), out);
    if (train->parsed()) return emit(geomorph::cmd_train(opt), out);
    if (compose->parsed()) return emit(geomorph::cmd_compose(opt), out);
    if (rotate->parsed()) return emit(geomorph::cmd_rotate(opt), out);
    if (report->parsed()) return emit(geomorph::cmd_report(report_path), report_out, false);
  } catch (const geomorph::ParseError& e) {
    std::cerr << "geomorph: " << opt.input << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return geomorph::kExitInputError;
  } catch (const geomorph::Error& e) {
    std::cerr << "geomorph: " << e.what() << "\n";
    return geomorph::kExitInputError;
  }
  return geomorph::kExitInputError;
}
