#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "realmono/measure.hpp"
#include "realmono/poset.hpp"
#include "realmono/rational.hpp"
#include "realmono/synchronize.hpp"

// Plain-text SVG plots. Every band is 1000 x 200 user units; bands stack
// vertically, one per index.

namespace realmono::svg {

inline constexpr int kBandWidth = 1000;
inline constexpr int kBandHeight = 200;
inline constexpr int kMargin = 60;

namespace detail {

inline std::string coord(const Rational& v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v.get_d());
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline void open(std::ostringstream& out, std::size_t bands) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kBandWidth + 2 * kMargin << "\" height=\""
      << bands * kBandHeight + 2 * kMargin << "\" viewBox=\"0 0 " << kBandWidth + 2 * kMargin << " "
      << bands * kBandHeight + 2 * kMargin << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline void grid(std::ostringstream& out, std::size_t band, std::size_t cells, const std::string& label) {
  const int top = kMargin + static_cast<int>(band) * kBandHeight;
  out << "<g class=\"band\" transform=\"translate(" << kMargin << "," << top << ")\">\n";
  out << "<text x=\"0\" y=\"-6\" font-family=\"monospace\" font-size=\"14\">" << escape(label) << "</text>\n";
  out << "<rect x=\"0\" y=\"10\" width=\"" << kBandWidth << "\" height=\"" << kBandHeight - 20
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (std::size_t i = 1; i < cells; ++i) {
    Rational x = Rational(static_cast<unsigned long>(i), static_cast<unsigned long>(cells)) * kBandWidth;
    out << "<line x1=\"" << coord(x) << "\" y1=\"10\" x2=\"" << coord(x) << "\" y2=\"" << kBandHeight - 10
        << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
  }
}

}  // namespace detail

/// One band per step function; elements sit on levels given by their rank
/// in `ext`, lowest at the bottom.
inline std::string step_functions(const std::vector<StepFunction>& fs, const std::vector<std::string>& labels,
                                  const Poset& s, const LinearExtension& ext, std::size_t cells) {
  std::ostringstream out;
  detail::open(out, fs.size());
  const Rational inner = kBandHeight - 40;
  const std::size_t levels = s.size();
  auto level_y = [&](Element e) -> Rational {
    Rational frac = levels > 1 ? Rational(static_cast<unsigned long>(ext.rank[e]),
                                          static_cast<unsigned long>(levels - 1))
                               : Rational(0);
    return Rational(kBandHeight - 20) - frac * inner;
  };
  for (std::size_t b = 0; b < fs.size(); ++b) {
    detail::grid(out, b, cells, b < labels.size() ? labels[b] : "");
    for (Element e : ext.order)
      out << "<text x=\"-8\" y=\"" << detail::coord(level_y(e) + 4)
          << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" << detail::escape(s.name(e))
          << "</text>\n";
    const auto& f = fs[b];
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      Rational x1 = f.breakpoints[k] * kBandWidth;
      Rational x2 = f.breakpoints[k + 1] * kBandWidth;
      std::string y = detail::coord(level_y(f.values[k]));
      out << "<line x1=\"" << detail::coord(x1) << "\" y1=\"" << y << "\" x2=\"" << detail::coord(x2)
          << "\" y2=\"" << y << "\" stroke=\"black\" stroke-width=\"3\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

/// Graphs of cell maps: each cell is a unit-slope segment.
inline std::string cell_maps(const std::vector<CellPermutation>& phis, const std::vector<std::string>& labels) {
  std::ostringstream out;
  detail::open(out, phis.size());
  const Rational inner = kBandHeight - 20;
  for (std::size_t b = 0; b < phis.size(); ++b) {
    const auto& phi = phis[b];
    detail::grid(out, b, phi.cells, b < labels.size() ? labels[b] : "");
    const Rational l(static_cast<unsigned long>(phi.cells));
    for (std::size_t i = 0; i < phi.cells; ++i) {
      Rational x1 = Rational(static_cast<unsigned long>(i)) / l * kBandWidth;
      Rational x2 = Rational(static_cast<unsigned long>(i + 1)) / l * kBandWidth;
      Rational y1 = Rational(kBandHeight - 10) - Rational(static_cast<unsigned long>(phi.perm[i])) / l * inner;
      Rational y2 = y1 - inner / l;
      out << "<line x1=\"" << detail::coord(x1) << "\" y1=\"" << detail::coord(y1) << "\" x2=\""
          << detail::coord(x2) << "\" y2=\"" << detail::coord(y2) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace realmono::svg
