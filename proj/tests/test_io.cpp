#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "hrstat/io.hpp"

using hrstat::Index;
using hrstat::Matrix;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(std::string("/tmp/hrstat_io_test_") + name) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("format_double round-trips exactly") {
  for (double x : {0.0, 1.0, -1.5, 0.05, 1.0 / 3.0, 1e-300, 6.02214076e23,
                   -0.1234567890123456}) {
    const std::string s = hrstat::format_double(x);
    CHECK(std::stod(s) == x);
  }
  CHECK(hrstat::format_double(0.05) == "0.05");
  CHECK(hrstat::format_double(2.0) == "2");
  CHECK(hrstat::format_double(-3.25) == "-3.25");
}

TEST_CASE("load_csv reads a plain numeric file") {
  TempFile f("plain.csv", "1.5,2,-0.25\n0,1e2,3.125\n");
  hrstat::CsvData data = hrstat::load_csv(f.path);
  REQUIRE(data.X.rows() == 2);
  REQUIRE(data.X.cols() == 3);
  CHECK(data.X(0, 0) == 1.5);
  CHECK(data.X(0, 2) == -0.25);
  CHECK(data.X(1, 1) == 100.0);
  CHECK(data.labels.empty());
}

TEST_CASE("load_csv tolerates spaces, CRLF and a missing final newline") {
  TempFile f("messy.csv", " 1 , 2 \r\n 3,4");
  hrstat::CsvData data = hrstat::load_csv(f.path);
  REQUIRE(data.X.rows() == 2);
  CHECK(data.X(0, 1) == 2.0);
  CHECK(data.X(1, 0) == 3.0);
}

TEST_CASE("load_csv skips a header row when asked") {
  TempFile f("header.csv", "a,b\n1,2\n3,4\n");
  hrstat::CsvData data = hrstat::load_csv(f.path, true);
  REQUIRE(data.X.rows() == 2);
  CHECK(data.X(0, 0) == 1.0);
  // Without the flag the header is a parse failure on row 1.
  try {
    hrstat::load_csv(f.path);
    FAIL("expected ParseError");
  } catch (const hrstat::ParseError& e) {
    CHECK(e.row() == 1);
    CHECK(e.col() == 1);
  }
}

TEST_CASE("load_csv names the bad cell in row-col coordinates") {
  TempFile f("bad.csv", "1,2,3\n4,5,6\n7,oops,9\n");
  try {
    hrstat::load_csv(f.path);
    FAIL("expected ParseError");
  } catch (const hrstat::ParseError& e) {
    CHECK(e.row() == 3);
    CHECK(e.col() == 2);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    CHECK(std::string(e.what()).find("col 2") != std::string::npos);
  }
}

TEST_CASE("load_csv rejects ragged rows and interior blank lines") {
  TempFile ragged("ragged.csv", "1,2,3\n4,5\n");
  CHECK_THROWS_AS(hrstat::load_csv(ragged.path), hrstat::ParseError);

  TempFile blank("blank.csv", "1,2\n\n3,4\n");
  CHECK_THROWS_AS(hrstat::load_csv(blank.path), hrstat::ParseError);

  // A trailing newline is not an interior blank.
  TempFile trailing("trailing.csv", "1,2\n3,4\n");
  CHECK(hrstat::load_csv(trailing.path).X.rows() == 2);

  CHECK_THROWS_AS(hrstat::load_csv("/nonexistent/nope.csv"), hrstat::Error);
}

TEST_CASE("load_csv rejects non-finite values") {
  TempFile f("inf.csv", "1,2\ninf,4\n");
  CHECK_THROWS_AS(hrstat::load_csv(f.path), hrstat::ParseError);
  TempFile g("nan.csv", "1,nan\n");
  CHECK_THROWS_AS(hrstat::load_csv(g.path), hrstat::ParseError);
}

TEST_CASE("load_csv splits off a label column on request") {
  TempFile f("labeled.csv", "0.5,1.5,1\n0.25,-2,2\n0,0,1\n");
  hrstat::CsvData data = hrstat::load_csv(f.path, false, true);
  REQUIRE(data.X.cols() == 2);
  REQUIRE(data.labels.size() == 3);
  CHECK(data.labels[0] == 1);
  CHECK(data.labels[1] == 2);
  CHECK(data.X(1, 1) == -2.0);

  // Labels other than exactly 1 or 2 are rejected with coordinates.
  TempFile bad("badlabel.csv", "0.5,1.5,1\n0.25,-2,3\n");
  try {
    hrstat::load_csv(bad.path, false, true);
    FAIL("expected ParseError");
  } catch (const hrstat::ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.col() == 3);
  }

  TempFile frac("fraclabel.csv", "0.5,1.5,1.5\n");
  CHECK_THROWS_AS(hrstat::load_csv(frac.path, false, true), hrstat::ParseError);

  // A single column cannot hold both data and labels.
  TempFile thin("thin.csv", "1\n2\n");
  CHECK_THROWS_AS(hrstat::load_csv(thin.path, false, true), hrstat::ParseError);
}

TEST_CASE("matrix_to_csv and load_csv round-trip bit for bit") {
  Matrix X(2, 3);
  X << 0.1, -1.0 / 3.0, 5e-17,
       2.0, 1234.5678, -0.0625;
  TempFile f("roundtrip.csv", hrstat::matrix_to_csv(X));
  hrstat::CsvData back = hrstat::load_csv(f.path);
  REQUIRE(back.X.rows() == 2);
  REQUIRE(back.X.cols() == 3);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 3; ++j) CHECK(back.X(i, j) == X(i, j));
  }
}

TEST_CASE("write_text and read_text round-trip") {
  const std::string path = "/tmp/hrstat_io_test_text.txt";
  hrstat::write_text(path, "line1\nline2");
  CHECK(hrstat::read_text(path) == "line1\nline2");
  std::remove(path.c_str());
  CHECK_THROWS_AS(hrstat::read_text("/nonexistent/nope.txt"), hrstat::Error);
  CHECK_THROWS_AS(hrstat::write_text("/nonexistent/dir/file.txt", "x"),
                  hrstat::Error);
}

TEST_CASE("screen_genes matches Welch test p-values from scipy") {
  // Data and p-values frozen from scipy.stats.ttest_ind(equal_var=False):
  // p = [0.1538, 0.1674, 0.7289, 0.0578] per column.
  Matrix X1(6, 4);
  X1 << 0.305, -1.04, 0.75, 0.941,
        -1.951, -1.302, 0.128, -0.316,
        -0.017, -0.853, 0.879, 0.778,
        0.066, 1.127, 0.468, -0.859,
        0.369, -0.959, 0.878, -0.05,
        -0.185, -0.681, 1.223, -0.155;
  Matrix X2(5, 4);
  X2 << -0.1, 0.007, 1.245, 1.012,
        1.078, 1.103, 3.498, -0.069,
        -0.217, -0.639, 1.362, 2.081,
        0.34, -0.676, -0.654, 1.411,
        1.541, 1.26, -0.432, 0.825;

  hrstat::ScreenResult r1 = hrstat::screen_genes(X1, X2, 0.06);
  REQUIRE(r1.kept.size() == 1);
  CHECK(r1.kept[0] == 3);
  CHECK(r1.excluded.empty());

  hrstat::ScreenResult r2 = hrstat::screen_genes(X1, X2, 0.17);
  REQUIRE(r2.kept.size() == 3);
  CHECK(r2.kept[0] == 0);
  CHECK(r2.kept[1] == 1);
  CHECK(r2.kept[2] == 3);

  // Thresholds that bracket a frozen p-value pin it to 4 decimals.
  CHECK(hrstat::screen_genes(X1, X2, 0.0578).kept.size() == 0);
  CHECK(hrstat::screen_genes(X1, X2, 0.0579).kept.size() == 1);
}

TEST_CASE("screen_genes excludes doubly constant columns") {
  Matrix X1(4, 3);
  X1 << 1, 5, 0.1,
        2, 5, 0.2,
        3, 5, 0.3,
        4, 5, 0.4;
  Matrix X2(3, 3);
  X2 << 2, 5, 5.1,
        3, 5, 5.2,
        4, 5, 5.3;
  hrstat::ScreenResult r = hrstat::screen_genes(X1, X2, 0.5);
  REQUIRE(r.excluded.size() == 1);
  CHECK(r.excluded[0] == 1);
  // Column 2 separates the classes sharply, so it is kept.
  CHECK(std::count(r.kept.begin(), r.kept.end(), 2) == 1);
}

}  // TEST_SUITE
