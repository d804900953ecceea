#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "realmono/cftp.hpp"
#include "realmono/coupling.hpp"
#include "realmono/error.hpp"
#include "realmono/measure.hpp"
#include "realmono/poset.hpp"
#include "realmono/rational.hpp"
#include "realmono/synchronize.hpp"

// Line-based text formats. '#' starts a comment running to the end of the
// line; tokens are separated by whitespace.
//
//   poset:    element <name> | cover <lower> <upper> | leq <lower> <upper>
//   measures: measure <label> followed by mass <element> <p>/<q> lines
//   system:   index <poset file> | state <poset file> | measures <file> |
//             inline measure blocks | assign <alpha> <label>
//   kernel:   state <poset file> | measures <file> | inline measure blocks |
//             row <state> <label>
//   coupling: atom <s_1,...,s_k> <p>/<q>
//   cell map: cells <L> followed by map <i> <perm(i)> lines

namespace realmono::io {

namespace detail {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::istringstream in{std::string(raw)};
    Line line{number, {}};
    for (std::string tok; in >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

inline void expect_arity(const std::string& source, const Line& line, std::size_t n) {
  if (line.tokens.size() != n)
    throw ParseError(source, line.number,
                     "'" + line.tokens.front() + "' expects " + std::to_string(n - 1) + " argument(s)");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline Poset parse_poset(std::string_view text, const std::string& source = "<poset>") {
  std::vector<std::string> elements;
  std::vector<OrderPair> pairs;
  std::map<std::string, bool> known;
  for (const auto& line : detail::tokenize(text)) {
    const auto& kw = line.tokens.front();
    if (kw == "element") {
      detail::expect_arity(source, line, 2);
      if (known.count(line.tokens[1])) throw ParseError(source, line.number, "duplicate element '" + line.tokens[1] + "'");
      known[line.tokens[1]] = true;
      elements.push_back(line.tokens[1]);
    } else if (kw == "cover" || kw == "leq") {
      detail::expect_arity(source, line, 3);
      for (std::size_t i = 1; i < 3; ++i)
        if (!known.count(line.tokens[i]))
          throw ParseError(source, line.number, "unknown element '" + line.tokens[i] + "'");
      pairs.push_back({line.tokens[1], line.tokens[2]});
    } else {
      throw ParseError(source, line.number, "unknown directive '" + kw + "'");
    }
  }
  if (elements.empty()) throw ParseError(source, 1, "poset has no elements");
  try {
    return validate_poset(std::move(elements), std::span<const OrderPair>(pairs));
  } catch (const CycleError& e) {
    throw CycleError(source + ": " + e.what());
  }
}

/// Canonical text: elements in input order, then cover pairs sorted by
/// (lower name, upper name).
inline std::string serialize_poset(const Poset& p) {
  std::ostringstream out;
  for (const auto& n : p.names()) out << "element " << n << "\n";
  std::vector<std::pair<std::string, std::string>> covers;
  for (const auto& e : cover_graph(p).edges) covers.push_back({p.name(e.lower), p.name(e.upper)});
  std::sort(covers.begin(), covers.end());
  for (const auto& [lo, hi] : covers) out << "cover " << lo << " " << hi << "\n";
  return out.str();
}

struct NamedMeasure {
  std::string label;
  RationalMeasure measure;
};

namespace detail {

// Accumulates `measure`/`mass` blocks; other directives are handed back.
class MeasureBlockReader {
 public:
  MeasureBlockReader(const Poset& s, std::string source) : s_(s), source_(std::move(source)) {}

  bool consume(const Line& line) {
    const auto& kw = line.tokens.front();
    if (kw == "measure") {
      expect_arity(source_, line, 2);
      finish();
      for (const auto& m : done_)
        if (m.label == line.tokens[1]) throw ParseError(source_, line.number, "duplicate measure '" + m.label + "'");
      open_ = Open{line.tokens[1], line.number, std::vector<Rational>(s_.size(), Rational(0)),
                   std::vector<char>(s_.size(), 0)};
      return true;
    }
    if (kw == "mass") {
      expect_arity(source_, line, 3);
      if (!open_) throw ParseError(source_, line.number, "'mass' outside a measure block");
      auto e = s_.find(line.tokens[1]);
      if (!e) throw ParseError(source_, line.number, "unknown element '" + line.tokens[1] + "'");
      if (open_->seen[*e]) throw ParseError(source_, line.number, "repeated mass for '" + line.tokens[1] + "'");
      open_->seen[*e] = 1;
      try {
        open_->mass[*e] = parse_rational(line.tokens[2]);
      } catch (const InvalidInput& err) {
        throw ParseError(source_, line.number, err.what());
      }
      return true;
    }
    finish();
    return false;
  }

  std::vector<NamedMeasure> take() {
    finish();
    return std::move(done_);
  }

 private:
  struct Open {
    std::string label;
    std::size_t line;
    std::vector<Rational> mass;
    std::vector<char> seen;
  };

  void finish() {
    if (!open_) return;
    try {
      done_.push_back({open_->label, RationalMeasure(std::move(open_->mass))});
    } catch (const InvalidInput& err) {
      throw ParseError(source_, open_->line, "measure '" + open_->label + "': " + err.what());
    }
    open_.reset();
  }

  const Poset& s_;
  std::string source_;
  std::optional<Open> open_;
  std::vector<NamedMeasure> done_;
};

}  // namespace detail

inline std::vector<NamedMeasure> parse_measures(std::string_view text, const Poset& s,
                                                const std::string& source = "<measures>") {
  detail::MeasureBlockReader reader(s, source);
  for (const auto& line : detail::tokenize(text))
    if (!reader.consume(line)) throw ParseError(source, line.number, "unknown directive '" + line.tokens.front() + "'");
  return reader.take();
}

/// All masses, zeros included, in extension order when given, else input order.
inline std::string serialize_measure(const std::string& label, const RationalMeasure& m, const Poset& s,
                                     const LinearExtension* ext = nullptr) {
  std::ostringstream out;
  out << "measure " << label << "\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    Element e = ext ? ext->order[k] : k;
    out << "mass " << s.name(e) << " " << format_rational(m[e]) << "\n";
  }
  return out.str();
}

inline Poset load_poset(const std::filesystem::path& path) {
  return parse_poset(detail::read_file(path), path.string());
}

struct LoadedSystem {
  MeasureSystem system;
  /// Measure label bound to each index.
  std::vector<std::string> labels;
};

namespace detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

// Shared reader for system and kernel files. `bind_kw` names the directive
// binding an index (or state) to a measure label.
inline std::pair<std::optional<Poset>, std::optional<Poset>> read_bindings(
    std::string_view text, const std::string& source, const std::filesystem::path& base, bool want_index,
    const std::string& bind_kw, std::vector<std::pair<Line, std::string>>& binds,
    std::vector<NamedMeasure>& measures) {
  std::optional<Poset> index;
  std::optional<Poset> state;
  std::optional<MeasureBlockReader> reader;
  std::vector<std::pair<Line, std::filesystem::path>> measure_files;
  const auto lines = tokenize(text);
  for (const auto& line : lines) {
    const auto& kw = line.tokens.front();
    if (want_index && kw == "index") {
      expect_arity(source, line, 2);
      if (index) throw ParseError(source, line.number, "index poset given twice");
      index = load_poset(resolve(base, line.tokens[1]));
    } else if (kw == "state") {
      expect_arity(source, line, 2);
      if (state) throw ParseError(source, line.number, "state poset given twice");
      state = load_poset(resolve(base, line.tokens[1]));
    }
  }
  if (!state) throw ParseError(source, 1, "missing 'state' poset");
  if (want_index && !index) throw ParseError(source, 1, "missing 'index' poset");
  reader.emplace(*state, source);
  for (const auto& line : lines) {
    const auto& kw = line.tokens.front();
    if (reader->consume(line)) continue;
    if (kw == "index" || kw == "state") continue;
    if (kw == "measures") {
      expect_arity(source, line, 2);
      auto path = resolve(base, line.tokens[1]);
      for (auto& m : parse_measures(read_file(path), *state, path.string())) measures.push_back(std::move(m));
    } else if (kw == bind_kw) {
      expect_arity(source, line, 3);
      binds.push_back({line, line.tokens[2]});
    } else {
      throw ParseError(source, line.number, "unknown directive '" + kw + "'");
    }
  }
  for (auto& m : reader->take()) measures.push_back(std::move(m));
  return {std::move(index), std::move(state)};
}

// Resolves bindings of every element of `keys` to one of `measures`.
inline std::vector<std::size_t> bind(const Poset& keys, const std::vector<std::pair<Line, std::string>>& binds,
                                     const std::vector<NamedMeasure>& measures, const std::string& source,
                                     const std::string& what) {
  std::vector<std::size_t> chosen(keys.size(), measures.size());
  for (const auto& [line, label] : binds) {
    auto k = keys.find(line.tokens[1]);
    if (!k) throw ParseError(source, line.number, "unknown " + what + " '" + line.tokens[1] + "'");
    if (chosen[*k] != measures.size()) throw ParseError(source, line.number, what + " '" + line.tokens[1] + "' bound twice");
    auto it = std::find_if(measures.begin(), measures.end(), [&](const auto& m) { return m.label == label; });
    if (it == measures.end()) throw ParseError(source, line.number, "unknown measure '" + label + "'");
    chosen[*k] = static_cast<std::size_t>(it - measures.begin());
  }
  for (Element k = 0; k < keys.size(); ++k)
    if (chosen[k] == measures.size()) throw ParseError(source, 1, what + " '" + keys.name(k) + "' has no measure");
  return chosen;
}

}  // namespace detail

inline LoadedSystem parse_system(std::string_view text, const std::filesystem::path& base,
                                 const std::string& source = "<system>") {
  std::vector<std::pair<detail::Line, std::string>> binds;
  std::vector<NamedMeasure> measures;
  auto [index, state] = detail::read_bindings(text, source, base, true, "assign", binds, measures);
  auto chosen = detail::bind(*index, binds, measures, source, "index");
  LoadedSystem out;
  out.system.index = std::move(*index);
  out.system.state = std::move(*state);
  for (auto c : chosen) {
    out.system.measures.push_back(measures[c].measure);
    out.labels.push_back(measures[c].label);
  }
  return out;
}

inline LoadedSystem load_system(const std::filesystem::path& path) {
  return parse_system(detail::read_file(path), path.parent_path(), path.string());
}

inline Kernel parse_kernel(std::string_view text, const std::filesystem::path& base,
                           const std::string& source = "<kernel>") {
  std::vector<std::pair<detail::Line, std::string>> binds;
  std::vector<NamedMeasure> measures;
  auto [index, state] = detail::read_bindings(text, source, base, false, "row", binds, measures);
  auto chosen = detail::bind(*state, binds, measures, source, "state");
  Kernel k;
  k.states = std::move(*state);
  for (auto c : chosen) k.rows.push_back(measures[c].measure);
  return k;
}

inline Kernel load_kernel(const std::filesystem::path& path) {
  return parse_kernel(detail::read_file(path), path.parent_path(), path.string());
}

inline std::string serialize_coupling(const Coupling& c, const MeasureSystem& sys) {
  std::ostringstream out;
  out << "# index";
  for (const auto& n : sys.index.names()) out << " " << n;
  out << "\n";
  auto atoms = c.atoms;
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.tuple < b.tuple; });
  for (const auto& a : atoms) {
    out << "atom ";
    for (std::size_t i = 0; i < a.tuple.size(); ++i) out << (i ? "," : "") << sys.state.name(a.tuple[i]);
    out << " " << format_rational(a.weight) << "\n";
  }
  return out.str();
}

inline Coupling parse_coupling(std::string_view text, const MeasureSystem& sys,
                               const std::string& source = "<coupling>") {
  Coupling c;
  for (const auto& line : detail::tokenize(text)) {
    if (line.tokens.front() != "atom") throw ParseError(source, line.number, "unknown directive '" + line.tokens.front() + "'");
    detail::expect_arity(source, line, 3);
    auto names = detail::split(line.tokens[1], ',');
    if (names.size() != sys.index.size()) throw ParseError(source, line.number, "tuple length does not match index poset");
    MonotoneTuple t;
    for (const auto& n : names) {
      auto e = sys.state.find(n);
      if (!e) throw ParseError(source, line.number, "unknown element '" + n + "'");
      t.push_back(*e);
    }
    try {
      c.atoms.push_back({std::move(t), parse_rational(line.tokens[2])});
    } catch (const InvalidInput& err) {
      throw ParseError(source, line.number, err.what());
    }
  }
  return c;
}

inline std::string serialize_cell_permutation(const CellPermutation& phi) {
  std::ostringstream out;
  out << "cells " << phi.cells << "\n";
  for (std::size_t i = 0; i < phi.perm.size(); ++i) out << "map " << i << " " << phi.perm[i] << "\n";
  return out.str();
}

inline CellPermutation parse_cell_permutation(std::string_view text, const std::string& source = "<cells>") {
  CellPermutation phi;
  phi.perm.clear();
  bool have_header = false;
  std::vector<char> seen;
  auto number = [&](const detail::Line& line, const std::string& tok) -> std::size_t {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw ParseError(source, line.number, "expected a nonnegative integer, got '" + tok + "'");
    return std::stoull(tok);
  };
  for (const auto& line : detail::tokenize(text)) {
    const auto& kw = line.tokens.front();
    if (kw == "cells") {
      detail::expect_arity(source, line, 2);
      if (have_header) throw ParseError(source, line.number, "'cells' given twice");
      have_header = true;
      phi.cells = number(line, line.tokens[1]);
      phi.perm.assign(phi.cells, 0);
      seen.assign(phi.cells, 0);
    } else if (kw == "map") {
      detail::expect_arity(source, line, 3);
      if (!have_header) throw ParseError(source, line.number, "'map' before 'cells'");
      std::size_t i = number(line, line.tokens[1]);
      std::size_t j = number(line, line.tokens[2]);
      if (i >= phi.cells || j >= phi.cells) throw ParseError(source, line.number, "cell index out of range");
      if (seen[i]) throw ParseError(source, line.number, "cell mapped twice");
      seen[i] = 1;
      phi.perm[i] = j;
    } else {
      throw ParseError(source, line.number, "unknown directive '" + kw + "'");
    }
  }
  if (!have_header) throw ParseError(source, 1, "missing 'cells' header");
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw ParseError(source, 1, "some cells are unmapped");
  if (!phi.is_bijection()) throw ParseError(source, 1, "cell map is not a bijection");
  return phi;
}

}  // namespace realmono::io
