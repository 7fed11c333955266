#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace llbtest {

/// CSV parsed back into a header and rows of numbers (strtod, so a value
/// written with 17 significant digits comes back bit-identical). Empty
/// fields become NaN.
struct ParsedCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  bool final_newline = false;
  std::size_t line_count = 0;
};
ParsedCsv parse_csv(const std::string& text);

/// Result of checking a legacy ASCII VTK unstructured grid token by token.
struct VtkGrammar {
  bool ok = false;
  std::string error;
  std::size_t points = 0;
  std::size_t cells = 0;
  std::vector<double> coordinates;
  std::vector<std::vector<std::size_t>> connectivity;
  std::vector<int> cell_types;
  std::string vectors_name;
  std::vector<double> vectors;
};
VtkGrammar check_vtk_grammar(const std::string& text);

/// Positive root s of (1/k + a + b s^2) s = c / k for a, b >= 0, c >= 0, by
/// bisection to the last representable bit.
double cubic_root(double k, double a, double b, double c);

}  // namespace llbtest
