#pragma once

// Run reports: labeled tables plus per-cell winners, written as versioned JSON
// (full precision) or TSV (6 decimals).

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomorph/error.hpp"
#include "geomorph/exponence.hpp"
#include "geomorph/matrix.hpp"

namespace geomorph {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

struct LabeledTable {
  std::string name;
  std::string corner;  // header of the row-label column
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Matrix entries;

  friend bool operator==(const LabeledTable&, const LabeledTable&) = default;
};

struct WinnerRow {
  std::string cell;
  std::optional<std::string> predicted;  // empty on a tie
  std::optional<std::string> gold;
  std::optional<double> margin;

  friend bool operator==(const WinnerRow&, const WinnerRow&) = default;
};

struct RunReport {
  std::string command;
  std::string source;
  Json config = Json::object();
  std::vector<LabeledTable> tables;
  std::vector<WinnerRow> winners;
  std::vector<std::string> mismatches;
  Json summary = Json::object();
  Json trace = Json::array();
  std::string status = "ok";
  int exit_code = 0;

  const LabeledTable& table(const std::string& name) const {
    for (const auto& t : tables)
      if (t.name == name) return t;
    throw Error(ErrorKind::InvalidArgument, "report has no table '" + name + "'");
  }

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Non-finite numbers have no JSON spelling; they are written as null.
inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline LabeledTable table_of(const std::string& name, const ExponentMatrix& b, const std::vector<std::string>& rows) {
  return {name, "value", rows, b.morphemes, b.columns};
}

inline LabeledTable table_of(const std::string& name, const CompetitionMatrix& c) {
  return {name, "cell", c.row_labels, c.morphemes, c.entries};
}

inline std::vector<WinnerRow> winner_rows(const CompetitionMatrix& c, const TotalParadigmMatrix& gold,
                                          const Evaluation& ev) {
  MaxRowsResult predicted = max_rows(c);
  std::vector<WinnerRow> out;
  for (std::size_t i = 0; i < gold.num_cells(); ++i) {
    WinnerRow w{gold.row_labels.at(i), std::nullopt, std::nullopt, std::nullopt};
    if (auto p = predicted.tpm.winner(i)) w.predicted = c.morphemes[*p];
    if (auto g = gold.winner(i)) w.gold = gold.morphemes[*g];
    if (std::isfinite(ev.margins.at(i))) w.margin = ev.margins[i];
    out.push_back(std::move(w));
  }
  return out;
}

inline Json to_json(const LabeledTable& t) {
  Json entries = Json::array();
  for (std::size_t r = 0; r < t.entries.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < t.entries.cols(); ++c) row.push_back(number_or_null(t.entries(r, c)));
    entries.push_back(std::move(row));
  }
  return Json{{"name", t.name},
              {"corner", t.corner},
              {"row_labels", t.row_labels},
              {"col_labels", t.col_labels},
              {"entries", std::move(entries)}};
}

inline Json to_json(const RunReport& r) {
  Json tables = Json::array();
  for (const auto& t : r.tables) tables.push_back(to_json(t));
  Json winners = Json::array();
  for (const auto& w : r.winners) {
    winners.push_back(Json{{"cell", w.cell},
                           {"predicted", w.predicted ? Json(*w.predicted) : Json(nullptr)},
                           {"gold", w.gold ? Json(*w.gold) : Json(nullptr)},
                           {"margin", w.margin ? Json(*w.margin) : Json(nullptr)}});
  }
  return Json{{"schema", kReportSchema}, {"command", r.command},   {"source", r.source},
              {"config", r.config},      {"tables", tables},       {"winners", winners},
              {"mismatches", r.mismatches}, {"summary", r.summary}, {"trace", r.trace},
              {"status", r.status},      {"exit_code", r.exit_code}};
}

inline LabeledTable table_from_json(const Json& j) {
  LabeledTable t;
  t.name = j.at("name").get<std::string>();
  t.corner = j.at("corner").get<std::string>();
  t.row_labels = j.at("row_labels").get<std::vector<std::string>>();
  t.col_labels = j.at("col_labels").get<std::vector<std::string>>();
  const Json& e = j.at("entries");
  t.entries = Matrix(t.row_labels.size(), t.col_labels.size());
  if (e.size() != t.row_labels.size()) throw Error(ErrorKind::ShapeMismatch, "table '" + t.name + "' row count");
  for (std::size_t r = 0; r < e.size(); ++r) {
    if (e[r].size() != t.col_labels.size())
      throw Error(ErrorKind::ShapeMismatch, "table '" + t.name + "' column count");
    for (std::size_t c = 0; c < e[r].size(); ++c)
      t.entries(r, c) = e[r][c].is_null() ? std::nan("") : e[r][c].get<double>();
  }
  return t;
}

inline RunReport report_from_json(const Json& j) {
  int schema = j.at("schema").get<int>();
  if (schema != kReportSchema)
    throw Error(ErrorKind::InvalidArgument, "unsupported report schema " + std::to_string(schema));
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.source = j.at("source").get<std::string>();
  r.config = j.at("config");
  for (const auto& t : j.at("tables")) r.tables.push_back(table_from_json(t));
  for (const auto& w : j.at("winners")) {
    WinnerRow row{w.at("cell").get<std::string>(), std::nullopt, std::nullopt, std::nullopt};
    if (!w.at("predicted").is_null()) row.predicted = w.at("predicted").get<std::string>();
    if (!w.at("gold").is_null()) row.gold = w.at("gold").get<std::string>();
    if (!w.at("margin").is_null()) row.margin = w.at("margin").get<double>();
    r.winners.push_back(std::move(row));
  }
  r.mismatches = j.at("mismatches").get<std::vector<std::string>>();
  r.summary = j.at("summary");
  r.trace = j.at("trace");
  r.status = j.at("status").get<std::string>();
  r.exit_code = j.at("exit_code").get<int>();
  return r;
}

inline std::string fixed6(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

inline std::string scalar_text(const Json& v) {
  if (v.is_number_float()) return fixed6(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

inline std::string render_tsv(const LabeledTable& t) {
  std::string out = "# " + t.name + "\n" + t.corner;
  for (const auto& c : t.col_labels) out += "\t" + c;
  out += "\n";
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    out += t.row_labels[r];
    for (std::size_t c = 0; c < t.col_labels.size(); ++c) out += "\t" + fixed6(t.entries(r, c));
    out += "\n";
  }
  return out;
}

inline std::string render_tsv(const RunReport& r) {
  std::string out;
  for (const auto& t : r.tables) out += render_tsv(t) + "\n";
  if (!r.winners.empty()) {
    out += "# winners\ncell\tpredicted\tgold\tmargin\n";
    for (const auto& w : r.winners)
      out += w.cell + "\t" + w.predicted.value_or("-") + "\t" + w.gold.value_or("-") + "\t" +
             (w.margin ? fixed6(*w.margin) : "-") + "\n";
    out += "\n";
  }
  out += "# summary\n";
  out += "command\t" + r.command + "\n";
  out += "status\t" + r.status + "\n";
  for (const auto& [k, v] : r.summary.items())
    if (!v.is_structured()) out += k + "\t" + scalar_text(v) + "\n";
  out += "mismatches\t" + std::to_string(r.mismatches.size()) + "\n";
  for (const auto& m : r.mismatches) out += "mismatch\t" + m + "\n";
  return out;
}

// One JSON object per line.
inline std::string render_jsonl(const Json& records) {
  std::string out;
  for (const auto& rec : records) out += rec.dump() + "\n";
  return out;
}

}  // namespace geomorph
