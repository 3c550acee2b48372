#pragma once

#include <string>
#include <vector>

#include "hrstat/matrix.hpp"

namespace hrstat {

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

struct CsvData {
  Matrix X;
  std::vector<int> labels;  // empty unless a label column was requested
};

// Rectangular numeric CSV, '.' decimal, comma separated. With want_labels
// the final column must hold class labels in {1, 2}. ParseError carries the
// 1-based (row, col) of the offending cell, counting file rows so a header
// line shifts the data rows down by one.
CsvData load_csv(const std::string& path, bool has_header = false,
                 bool want_labels = false);

std::string matrix_to_csv(const Matrix& X);
void write_csv(const std::string& path, const Matrix& X);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

struct ScreenResult {
  std::vector<Index> kept;      // ascending indices with p < threshold
  std::vector<Index> excluded;  // zero variance in both classes
};

// Welch two-sample t-test per column; keeps columns whose p-value is below
// the threshold. Columns that are constant in both classes carry no signal
// for the test and land in `excluded`.
ScreenResult screen_genes(const Matrix& X1, const Matrix& X2,
                          double p_threshold);

}  // namespace hrstat
