#include "text_oracles.hpp"

#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace llbtest {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_number(const std::string& token, double& value) {
  if (token.empty()) return false;
  char* end = nullptr;
  value = std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size();
}

}  // namespace

ParsedCsv parse_csv(const std::string& text) {
  ParsedCsv csv;
  csv.final_newline = !text.empty() && text.back() == '\n';
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    ++csv.line_count;
    if (first) {
      csv.header = split(line, ',');
      first = false;
      continue;
    }
    std::vector<double> row;
    for (const auto& tok : split(line, ',')) {
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!tok.empty() && !parse_number(tok, v)) throw std::runtime_error("parse_csv: bad number '" + tok + "'");
      row.push_back(v);
    }
    csv.rows.push_back(row);
  }
  return csv;
}

VtkGrammar check_vtk_grammar(const std::string& text) {
  VtkGrammar g;
  std::istringstream in(text);
  std::string line;
  auto fail = [&](const std::string& why) {
    g.ok = false;
    g.error = why;
    return g;
  };
  if (!std::getline(in, line) || line != "# vtk DataFile Version 3.0") return fail("bad version header");
  if (!std::getline(in, line) || line.empty() || line.size() > 256) return fail("bad title line");
  if (!std::getline(in, line) || line != "ASCII") return fail("expected ASCII");

  std::string tok;
  auto expect = [&](const std::string& want) { return (in >> tok) && tok == want; };
  auto read_size = [&](std::size_t& n) {
    if (!(in >> tok)) return false;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size()) return false;
    n = static_cast<std::size_t>(v);
    return true;
  };
  auto read_real = [&](double& v) { return (in >> tok) && parse_number(tok, v); };

  if (!expect("DATASET") || !expect("UNSTRUCTURED_GRID")) return fail("expected DATASET UNSTRUCTURED_GRID");
  if (!expect("POINTS") || !read_size(g.points) || !expect("double")) return fail("bad POINTS line");
  g.coordinates.resize(3 * g.points);
  for (auto& c : g.coordinates) {
    if (!read_real(c)) return fail("bad point coordinate");
  }
  std::size_t total = 0;
  if (!expect("CELLS") || !read_size(g.cells) || !read_size(total)) return fail("bad CELLS line");
  std::size_t consumed = 0;
  for (std::size_t c = 0; c < g.cells; ++c) {
    std::size_t count = 0;
    if (!read_size(count)) return fail("bad cell size");
    std::vector<std::size_t> ids(count);
    for (auto& id : ids) {
      if (!read_size(id) || id >= g.points) return fail("bad cell index");
    }
    consumed += count + 1;
    g.connectivity.push_back(ids);
  }
  if (consumed != total) return fail("CELLS size field does not match the entries");
  std::size_t ntypes = 0;
  if (!expect("CELL_TYPES") || !read_size(ntypes) || ntypes != g.cells) return fail("bad CELL_TYPES line");
  for (std::size_t c = 0; c < ntypes; ++c) {
    std::size_t type = 0;
    if (!read_size(type)) return fail("bad cell type");
    g.cell_types.push_back(static_cast<int>(type));
  }
  std::size_t npd = 0;
  if (!expect("POINT_DATA") || !read_size(npd) || npd != g.points) return fail("bad POINT_DATA line");
  if (!expect("VECTORS") || !(in >> g.vectors_name) || !expect("double")) return fail("bad VECTORS line");
  g.vectors.resize(3 * g.points);
  for (auto& v : g.vectors) {
    if (!read_real(v)) return fail("bad vector value");
  }
  if (in >> tok) return fail("trailing tokens after VECTORS data");
  g.ok = true;
  return g;
}

double cubic_root(double k, double a, double b, double c) {
  auto f = [&](double s) { return (1.0 / k + a + b * s * s) * s - c / k; };
  double lo = 0.0;
  double hi = c;  // f(c) >= 0 because every coefficient is non-negative
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace llbtest
