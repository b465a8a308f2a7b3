#pragma once

// Line-oriented paradigm description files.
//
//   FEATURE <name>: <v1> <v2> ...
//   MORPHEMES: <m1> <m2> ...            token 0 is the null morpheme
//   CELL <value per feature> -> <morpheme>
//   CLASS <label> LEXEMES <count>       CELL lines up to END
//   END
//   PLANE <x-value> <y-value>
//   STEM <label> [@ <radians>]
//   AFFIX <label> [@ <radians>]
//   FORM <stem> <value per feature> -> <affix>
//
// '#' starts a comment. Names must be declared before use. A file describes
// one paradigm (top-level CELLs), a set of classes, or a composition
// (STEM/AFFIX/FORM); these do not mix.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geomorph/composition.hpp"
#include "geomorph/error.hpp"
#include "geomorph/exponence.hpp"
#include "geomorph/feature_core.hpp"
#include "geomorph/rotation_classes.hpp"

namespace geomorph {

struct CellLine {
  std::vector<std::string> values;
  std::string morpheme;

  friend bool operator==(const CellLine&, const CellLine&) = default;
};

struct ClassBlock {
  std::string label;
  std::size_t lexemes = 1;
  std::vector<CellLine> cells;

  friend bool operator==(const ClassBlock&, const ClassBlock&) = default;
};

struct AngleDecl {
  std::string label;
  std::optional<double> radians;

  friend bool operator==(const AngleDecl&, const AngleDecl&) = default;
};

struct FormLine {
  std::string stem;
  std::vector<std::string> values;
  std::string affix;

  friend bool operator==(const FormLine&, const FormLine&) = default;
};

enum class FileKind { Paradigm, Classes, Composition };

struct ParadigmFile {
  FeatureSystem features;
  std::vector<std::string> morphemes;
  std::vector<CellLine> cells;
  std::vector<ClassBlock> classes;
  std::optional<std::pair<std::string, std::string>> plane;
  std::vector<AngleDecl> stems;
  std::vector<AngleDecl> affixes;
  std::vector<FormLine> forms;

  FileKind kind() const {
    if (!classes.empty()) return FileKind::Classes;
    if (!stems.empty() || !affixes.empty() || !forms.empty()) return FileKind::Composition;
    return FileKind::Paradigm;
  }

  friend bool operator==(const ParadigmFile&, const ParadigmFile&) = default;
};

namespace detail {

struct Token {
  std::string text;
  std::size_t column;  // 1-based byte column
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') ++i;
    out.push_back({std::string(line.substr(start, i - start)), start + 1});
  }
  return out;
}

class Parser {
 public:
  ParadigmFile run(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no_;
      last_len_ = line.size();
      statement(tokenize(line));
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    if (open_class_) fail(ErrorKind::SyntaxError, last_len_ + 1, "expected END before end of file");
    if (declarations_.empty()) fail(ErrorKind::SyntaxError, 1, "expected at least one FEATURE line");
    out_.features = fs_ ? *fs_ : build_feature_system(declarations_);
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(ErrorKind kind, std::size_t column, const std::string& what) const {
    throw ParseError(kind, line_no_, column, what);
  }

  void statement(const std::vector<Token>& t) {
    if (t.empty()) return;
    const std::string& kw = t[0].text;
    if (kw == "FEATURE") return feature(t);
    if (kw == "MORPHEMES:" || kw == "MORPHEMES") return morphemes(t);
    if (kw == "CELL") return cell(t);
    if (kw == "CLASS") return class_open(t);
    if (kw == "END") return class_close(t);
    if (kw == "PLANE") return plane(t);
    if (kw == "STEM" || kw == "AFFIX") return angle_decl(t, kw == "STEM");
    if (kw == "FORM") return form(t);
    fail(ErrorKind::SyntaxError, t[0].column,
         "expected FEATURE, MORPHEMES, CELL, CLASS, END, PLANE, STEM, AFFIX or FORM, got '" + kw + "'");
  }

  void require_features(const Token& at) {
    if (declarations_.empty()) fail(ErrorKind::SyntaxError, at.column, "expected FEATURE lines first");
    if (!fs_) fs_ = build_feature_system(declarations_);
  }

  void feature(const std::vector<Token>& t) {
    if (fs_) fail(ErrorKind::SyntaxError, t[0].column, "FEATURE must precede every other declaration");
    if (t.size() < 2) fail(ErrorKind::SyntaxError, t[0].column + t[0].text.size(), "expected feature name");
    std::string name = t[1].text;
    std::size_t first_value = 2;
    if (name.size() > 1 && name.back() == ':') {
      name.pop_back();
    } else if (t.size() > 2 && t[2].text == ":") {
      first_value = 3;
    } else {
      fail(ErrorKind::SyntaxError, t[1].column + t[1].text.size(), "expected ':' after feature name");
    }
    if (!seen_features_.insert(name).second)
      fail(ErrorKind::DuplicateDeclaration, t[1].column, "feature '" + name + "' already declared");
    std::vector<std::string> values;
    for (std::size_t i = first_value; i < t.size(); ++i) {
      if (!seen_values_.insert(t[i].text).second)
        fail(ErrorKind::DuplicateDeclaration, t[i].column, "value '" + t[i].text + "' already declared");
      values.push_back(t[i].text);
    }
    if (values.size() < 2) {
      std::size_t col = t.back().column + t.back().text.size();
      fail(ErrorKind::SyntaxError, col, "expected at least two values for feature '" + name + "'");
    }
    declarations_.emplace_back(name, values);
  }

  void morphemes(const std::vector<Token>& t) {
    std::size_t first = 1;
    if (t[0].text == "MORPHEMES") {
      if (t.size() < 2 || t[1].text != ":")
        fail(ErrorKind::SyntaxError, t[0].column + t[0].text.size(), "expected ':' after MORPHEMES");
      first = 2;
    }
    if (morphemes_declared_) fail(ErrorKind::DuplicateDeclaration, t[0].column, "MORPHEMES already declared");
    morphemes_declared_ = true;
    if (t.size() <= first) fail(ErrorKind::SyntaxError, t.back().column + t.back().text.size(), "expected morphemes");
    std::set<std::string> seen;
    for (std::size_t i = first; i < t.size(); ++i) {
      if (!seen.insert(t[i].text).second)
        fail(ErrorKind::DuplicateDeclaration, t[i].column, "morpheme '" + t[i].text + "' already declared");
      out_.morphemes.push_back(t[i].text);
    }
  }

  // Reads one value per feature starting at t[from]; returns index after them.
  std::size_t cell_values(const std::vector<Token>& t, std::size_t from, std::vector<std::string>& values) {
    require_features(t[0]);
    for (std::size_t f = 0; f < fs_->num_features(); ++f) {
      std::size_t i = from + f;
      if (i >= t.size() || t[i].text == "->") {
        std::size_t col = i < t.size() ? t[i].column : t.back().column + t.back().text.size();
        fail(ErrorKind::SyntaxError, col, "expected a value for feature '" + fs_->features()[f].name + "'");
      }
      if (!fs_->has_value(t[i].text))
        fail(ErrorKind::UndeclaredName, t[i].column, "value '" + t[i].text + "' is not declared");
      if (fs_->feature_of(fs_->index_of(t[i].text)) != f)
        fail(ErrorKind::UndeclaredName, t[i].column,
             "'" + t[i].text + "' is not a value of feature '" + fs_->features()[f].name + "'");
      values.push_back(t[i].text);
    }
    return from + fs_->num_features();
  }

  // Expects "-> <name>" at t[i] and nothing after it.
  const Token& arrow_target(const std::vector<Token>& t, std::size_t i) {
    if (i >= t.size() || t[i].text != "->") {
      std::size_t col = i < t.size() ? t[i].column : t.back().column + t.back().text.size();
      fail(ErrorKind::SyntaxError, col, "expected '->'");
    }
    if (i + 1 >= t.size()) fail(ErrorKind::SyntaxError, t[i].column + 2, "expected a name after '->'");
    if (i + 2 < t.size()) fail(ErrorKind::SyntaxError, t[i + 2].column, "expected end of line");
    return t[i + 1];
  }

  void cell(const std::vector<Token>& t) {
    if (composition_line_) fail(ErrorKind::SyntaxError, t[0].column, "CELL cannot appear in a composition file");
    CellLine c;
    std::size_t i = cell_values(t, 1, c.values);
    const Token& m = arrow_target(t, i);
    if (!morphemes_declared_) fail(ErrorKind::UndeclaredName, m.column, "no MORPHEMES line before CELL");
    bool known = false;
    for (const auto& name : out_.morphemes) known = known || name == m.text;
    if (!known) fail(ErrorKind::UndeclaredName, m.column, "morpheme '" + m.text + "' is not declared");
    c.morpheme = m.text;
    auto& scope = open_class_ ? out_.classes.back().cells : out_.cells;
    if (!open_class_ && !out_.classes.empty())
      fail(ErrorKind::SyntaxError, t[0].column, "CELL outside a CLASS block in a file with classes");
    for (const auto& prior : scope)
      if (prior.values == c.values)
        fail(ErrorKind::DuplicateDeclaration, t[1].column, "cell listed twice");
    scope.push_back(std::move(c));
  }

  void class_open(const std::vector<Token>& t) {
    require_features(t[0]);
    if (open_class_) fail(ErrorKind::SyntaxError, t[0].column, "expected END before the next CLASS");
    if (!out_.cells.empty()) fail(ErrorKind::SyntaxError, t[0].column, "CLASS cannot follow top-level CELL lines");
    if (composition_line_) fail(ErrorKind::SyntaxError, t[0].column, "CLASS cannot appear in a composition file");
    if (t.size() < 2) fail(ErrorKind::SyntaxError, t[0].column + 5, "expected class label");
    if (t.size() < 3 || t[2].text != "LEXEMES")
      fail(ErrorKind::SyntaxError, t.size() < 3 ? t[1].column + t[1].text.size() : t[2].column, "expected LEXEMES");
    if (t.size() < 4) fail(ErrorKind::SyntaxError, t[2].column + 7, "expected lexeme count");
    if (t.size() > 4) fail(ErrorKind::SyntaxError, t[4].column, "expected end of line");
    std::size_t count = 0;
    const std::string& n = t[3].text;
    auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), count);
    if (ec != std::errc() || ptr != n.data() + n.size() || count == 0)
      fail(ErrorKind::SyntaxError, t[3].column, "expected a positive integer lexeme count");
    for (const auto& c : out_.classes)
      if (c.label == t[1].text)
        fail(ErrorKind::DuplicateDeclaration, t[1].column, "class '" + t[1].text + "' already declared");
    out_.classes.push_back({t[1].text, count, {}});
    open_class_ = true;
  }

  void class_close(const std::vector<Token>& t) {
    if (!open_class_) fail(ErrorKind::SyntaxError, t[0].column, "END without CLASS");
    if (t.size() > 1) fail(ErrorKind::SyntaxError, t[1].column, "expected end of line");
    open_class_ = false;
    const ClassBlock& cls = out_.classes.back();
    if (cls.cells.empty()) fail(ErrorKind::SyntaxError, t[0].column, "class '" + cls.label + "' has no cells");
    const ClassBlock& first = out_.classes.front();
    bool same = first.cells.size() == cls.cells.size();
    for (std::size_t i = 0; same && i < cls.cells.size(); ++i) same = first.cells[i].values == cls.cells[i].values;
    if (!same)
      fail(ErrorKind::SyntaxError, t[0].column,
           "class '" + cls.label + "' must list the same cells in the same order as class '" + first.label + "'");
  }

  void plane(const std::vector<Token>& t) {
    require_features(t[0]);
    if (out_.plane) fail(ErrorKind::DuplicateDeclaration, t[0].column, "PLANE already declared");
    if (t.size() != 3)
      fail(ErrorKind::SyntaxError, t.size() < 3 ? t.back().column + t.back().text.size() : t[3].column,
           "expected PLANE <x-value> <y-value>");
    for (std::size_t i = 1; i < 3; ++i)
      if (!fs_->has_value(t[i].text))
        fail(ErrorKind::UndeclaredName, t[i].column, "value '" + t[i].text + "' is not declared");
    if (t[1].text == t[2].text) fail(ErrorKind::SyntaxError, t[2].column, "expected two different values");
    out_.plane = std::make_pair(t[1].text, t[2].text);
  }

  void angle_decl(const std::vector<Token>& t, bool stem) {
    require_features(t[0]);
    if (!out_.cells.empty() || !out_.classes.empty())
      fail(ErrorKind::SyntaxError, t[0].column, t[0].text + " cannot appear in a paradigm or class file");
    composition_line_ = true;
    if (t.size() < 2) fail(ErrorKind::SyntaxError, t[0].column + t[0].text.size(), "expected label");
    AngleDecl d{t[1].text, std::nullopt};
    if (t.size() > 2) {
      if (t[2].text != "@") fail(ErrorKind::SyntaxError, t[2].column, "expected '@'");
      if (t.size() < 4) fail(ErrorKind::SyntaxError, t[2].column + 1, "expected an angle in radians");
      if (t.size() > 4) fail(ErrorKind::SyntaxError, t[4].column, "expected end of line");
      d.radians = parse_number(t[3]);
    }
    auto& list = stem ? out_.stems : out_.affixes;
    for (const auto& prior : list)
      if (prior.label == d.label)
        fail(ErrorKind::DuplicateDeclaration, t[1].column, t[0].text + " '" + d.label + "' already declared");
    list.push_back(std::move(d));
  }

  double parse_number(const Token& tok) const {
    double value = 0.0;
    const std::string& s = tok.text;
    const char* begin = s.data();
    if (!s.empty() && s[0] == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
      fail(ErrorKind::SyntaxError, tok.column, "expected a number, got '" + s + "'");
    return value;
  }

  void form(const std::vector<Token>& t) {
    require_features(t[0]);
    if (!out_.cells.empty() || !out_.classes.empty())
      fail(ErrorKind::SyntaxError, t[0].column, "FORM cannot appear in a paradigm or class file");
    composition_line_ = true;
    if (t.size() < 2) fail(ErrorKind::SyntaxError, t[0].column + 4, "expected stem label");
    FormLine f;
    f.stem = t[1].text;
    bool known = false;
    for (const auto& s : out_.stems) known = known || s.label == f.stem;
    if (!known) fail(ErrorKind::UndeclaredName, t[1].column, "stem '" + f.stem + "' is not declared");
    std::size_t i = cell_values(t, 2, f.values);
    const Token& a = arrow_target(t, i);
    known = false;
    for (const auto& x : out_.affixes) known = known || x.label == a.text;
    if (!known) fail(ErrorKind::UndeclaredName, a.column, "affix '" + a.text + "' is not declared");
    f.affix = a.text;
    for (const auto& prior : out_.forms)
      if (prior.stem == f.stem && prior.values == f.values)
        fail(ErrorKind::DuplicateDeclaration, t[1].column, "form listed twice");
    out_.forms.push_back(std::move(f));
  }

  ParadigmFile out_;
  std::vector<std::pair<std::string, std::vector<std::string>>> declarations_;
  std::optional<FeatureSystem> fs_;
  std::set<std::string> seen_features_;
  std::set<std::string> seen_values_;
  bool morphemes_declared_ = false;
  bool open_class_ = false;
  bool composition_line_ = false;
  std::size_t line_no_ = 0;
  std::size_t last_len_ = 0;
};

}  // namespace detail

inline ParadigmFile parse_paradigm(std::string_view text) {
  return detail::Parser().run(text);
}

inline ParadigmFile parse_paradigm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_paradigm(ss.str());
}

// Shortest text that reads back as the same double.
inline std::string format_exact(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline std::string serialize(const ParadigmFile& file) {
  std::string out;
  auto line = [&](const std::string& s) { out += s + "\n"; };
  auto values = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += " " + x;
    return s;
  };
  for (const auto& f : file.features.features()) line("FEATURE " + f.name + ":" + values(f.values));
  if (!file.morphemes.empty()) line("MORPHEMES:" + values(file.morphemes));
  if (file.plane) line("PLANE " + file.plane->first + " " + file.plane->second);
  auto angles = [&](const char* kw, const std::vector<AngleDecl>& list) {
    if (list.empty()) return;
    line("");
    for (const auto& d : list)
      line(std::string(kw) + " " + d.label + (d.radians ? " @ " + format_exact(*d.radians) : ""));
  };
  angles("STEM", file.stems);
  angles("AFFIX", file.affixes);
  if (!file.cells.empty()) line("");
  for (const auto& c : file.cells) line("CELL" + values(c.values) + " -> " + c.morpheme);
  for (const auto& cls : file.classes) {
    line("");
    line("CLASS " + cls.label + " LEXEMES " + std::to_string(cls.lexemes));
    for (const auto& c : cls.cells) line("CELL" + values(c.values) + " -> " + c.morpheme);
    line("END");
  }
  if (!file.forms.empty()) line("");
  for (const auto& f : file.forms) line("FORM " + f.stem + values(f.values) + " -> " + f.affix);
  return out;
}

// Single-paradigm view: phi rows in file order and the gold TPM.
struct ParadigmData {
  FeatureSystem features;
  PhiMatrix phi;
  TotalParadigmMatrix gold;
};

namespace detail {

inline PhiMatrix phi_of(const FeatureSystem& fs, const std::vector<CellLine>& cells) {
  std::vector<ParadigmCell> pc;
  for (const auto& c : cells) pc.push_back(make_cell(fs, c.values));
  return build_phi(fs, pc);
}

inline std::vector<std::string> gold_of(const std::vector<CellLine>& cells) {
  std::vector<std::string> out;
  for (const auto& c : cells) out.push_back(c.morpheme);
  return out;
}

}  // namespace detail

inline ParadigmData paradigm_data(const ParadigmFile& file) {
  if (file.kind() != FileKind::Paradigm || file.cells.empty())
    throw Error(ErrorKind::InvalidArgument, "file does not describe a single paradigm");
  PhiMatrix phi = detail::phi_of(file.features, file.cells);
  TotalParadigmMatrix gold = make_tpm(phi, file.features, file.morphemes, detail::gold_of(file.cells));
  return {file.features, std::move(phi), std::move(gold)};
}

inline ClassInventory class_inventory(const ParadigmFile& file) {
  if (file.kind() != FileKind::Classes) throw Error(ErrorKind::InvalidArgument, "file declares no classes");
  ClassInventory inv;
  inv.features = file.features;
  inv.morphemes = file.morphemes;
  inv.phi = detail::phi_of(file.features, file.classes.front().cells);
  for (const auto& cls : file.classes)
    inv.classes.push_back(
        {cls.label, make_tpm(inv.phi, file.features, file.morphemes, detail::gold_of(cls.cells)), cls.lexemes});
  return inv;
}

inline std::pair<std::string, std::string> require_plane(const ParadigmFile& file) {
  if (!file.plane) throw Error(ErrorKind::InvalidArgument, "file has no PLANE line");
  return *file.plane;
}

inline AngleLearnData angle_learn_data(const ParadigmFile& file) {
  auto [x, y] = require_plane(file);
  AngleLearnData data{x, y, {}, {}, {}};
  for (const auto& s : file.stems) data.stems.push_back(s.label);
  for (const auto& a : file.affixes) data.affixes.push_back(a.label);
  for (const auto& f : file.forms)
    data.targets.push_back({f.stem, target_angle_for(make_cell(file.features, f.values), file.features, x, y), f.affix});
  return data;
}

inline bool has_all_angles(const ParadigmFile& file) {
  if (file.stems.empty() || file.affixes.empty()) return false;
  for (const auto& s : file.stems)
    if (!s.radians) return false;
  for (const auto& a : file.affixes)
    if (!a.radians) return false;
  return true;
}

inline AngleModel angle_model(const ParadigmFile& file) {
  auto [x, y] = require_plane(file);
  if (!has_all_angles(file)) throw Error(ErrorKind::InvalidArgument, "every STEM and AFFIX needs an angle");
  AngleModel m{x, y, {}, {}};
  for (const auto& s : file.stems) m.stems.push_back({s.label, wrap_angle(*s.radians)});
  for (const auto& a : file.affixes) m.affixes.push_back({a.label, wrap_angle(*a.radians)});
  return m;
}

inline CompositionInventory composition_inventory(const ParadigmFile& file, const AngleModel& model) {
  CompositionInventory inv = to_inventory(model, file.features);
  for (const auto& f : file.forms) inv.gold_forms.push_back({f.stem, make_cell(file.features, f.values), f.affix});
  return inv;
}

}  // namespace geomorph
