#include "hrstat/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "hrstat/prob.hpp"

namespace hrstat {

std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_cell(std::string_view cell, int row, int col) {
  cell = trimmed(cell);
  if (cell.empty()) throw ParseError("empty cell", row, col);
  double value = 0.0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
    throw ParseError("not a number: '" + std::string(cell) + "'", row, col);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite value", row, col);
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

CsvData load_csv(const std::string& path, bool has_header, bool want_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<std::pair<int, std::string_view>> lines;  // (file row, content)
  {
    std::string_view rest = text;
    int file_row = 0;
    while (!rest.empty()) {
      ++file_row;
      std::size_t pos = rest.find('\n');
      std::string_view line =
          pos == std::string_view::npos ? rest : rest.substr(0, pos);
      rest = pos == std::string_view::npos ? std::string_view{}
                                           : rest.substr(pos + 1);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (trimmed(line).empty()) {
        if (!rest.empty()) throw ParseError("blank line", file_row, 0);
        continue;  // trailing newline
      }
      lines.emplace_back(file_row, line);
    }
  }
  if (has_header && !lines.empty()) lines.erase(lines.begin());
  if (lines.empty()) throw ParseError("no data rows in " + path);

  const std::size_t n_fields = split_fields(lines[0].second).size();
  const std::size_t label_cols = want_labels ? 1 : 0;
  if (n_fields < 1 + label_cols) {
    throw ParseError("too few columns", lines[0].first, 0);
  }
  const Index n = static_cast<Index>(lines.size());
  const Index p = static_cast<Index>(n_fields - label_cols);

  CsvData out;
  out.X.resize(n, p);
  if (want_labels) out.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const int file_row = lines[static_cast<std::size_t>(i)].first;
    auto fields = split_fields(lines[static_cast<std::size_t>(i)].second);
    if (fields.size() != n_fields) {
      throw ParseError("row has " + std::to_string(fields.size()) +
                           " fields, expected " + std::to_string(n_fields),
                       file_row, 0);
    }
    for (Index j = 0; j < p; ++j) {
      out.X(i, j) = parse_cell(fields[static_cast<std::size_t>(j)], file_row,
                               static_cast<int>(j) + 1);
    }
    if (want_labels) {
      const int col = static_cast<int>(n_fields);
      const double v = parse_cell(fields[n_fields - 1], file_row, col);
      if (v != 1.0 && v != 2.0) {
        throw ParseError("label must be 1 or 2", file_row, col);
      }
      out.labels[static_cast<std::size_t>(i)] = static_cast<int>(v);
    }
  }
  return out;
}

std::string matrix_to_csv(const Matrix& X) {
  std::string out;
  out.reserve(static_cast<std::size_t>(X.size()) * 12);
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) {
      if (j > 0) out.push_back(',');
      out += format_double(X(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const std::string& path, const Matrix& X) {
  write_text(path, matrix_to_csv(X));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

ScreenResult screen_genes(const Matrix& X1, const Matrix& X2,
                          double p_threshold) {
  if (X1.cols() != X2.cols()) {
    throw DimensionError("screen_genes: column counts differ");
  }
  const Index n1 = X1.rows(), n2 = X2.rows();
  if (n1 < 2 || n2 < 2) {
    throw ContractViolation("screen_genes: need n >= 2 per class");
  }
  const double n1d = static_cast<double>(n1), n2d = static_cast<double>(n2);
  ScreenResult res;
  for (Index j = 0; j < X1.cols(); ++j) {
    const double m1 = X1.col(j).mean();
    const double m2 = X2.col(j).mean();
    const double v1 =
        (X1.col(j).array() - m1).square().sum() / (n1d - 1.0);
    const double v2 =
        (X2.col(j).array() - m2).square().sum() / (n2d - 1.0);
    if (v1 == 0.0 && v2 == 0.0) {
      res.excluded.push_back(j);
      continue;
    }
    const double se_sq = v1 / n1d + v2 / n2d;
    const double t = (m1 - m2) / std::sqrt(se_sq);
    const double df =
        se_sq * se_sq / ((v1 / n1d) * (v1 / n1d) / (n1d - 1.0) +
                         (v2 / n2d) * (v2 / n2d) / (n2d - 1.0));
    const double p = 2.0 * (1.0 - student_t_cdf(std::abs(t), df));
    if (p < p_threshold) res.kept.push_back(j);
  }
  return res;
}

}  // namespace hrstat
