#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "wsfit/errors.hpp"
#include "wsfit/zeros.hpp"

using namespace wsfit;

namespace {

const char* kZerosFile = WSFIT_ZEROS_FILE;

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = std::string("/tmp/wsfit_zeros_") + name + ".txt";
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("first zero and ascending order") {
  const ZeroTable table = load_zeros(kZerosFile, 25);
  CHECK(table.count() == 25);
  CHECK(table[0] == doctest::Approx(14.134725141734694).epsilon(1e-12));
  for (std::size_t k = 1; k < table.count(); ++k) CHECK(table[k] > table[k - 1]);
  CHECK(table.values.front() > 14.0);
}

TEST_CASE("shipped table matches the published sum-of-squares totals") {
  const ZeroTable table = load_zeros(kZerosFile, 75);
  CHECK(std::abs(sum_of_squares(table.prefix(25)) - 92569.63) <= 0.01);
  CHECK(std::abs(sum_of_squares(table.prefix(50)) - 448704.56) <= 0.01);
  CHECK(std::abs(sum_of_squares(table.prefix(75)) - 1.1658469e6) <= 10.0);
}

TEST_CASE("n = 0 gives an empty table") {
  const ZeroTable table = load_zeros(kZerosFile, 0);
  CHECK(table.count() == 0);
  CHECK(sum_of_squares(table) == 0.0);
}

TEST_CASE("loading is idempotent") {
  const ZeroTable a = load_zeros(kZerosFile, 60);
  const ZeroTable b = load_zeros(kZerosFile, 60);
  REQUIRE(a.count() == b.count());
  for (std::size_t k = 0; k < a.count(); ++k) CHECK(a[k] == b[k]);
}

TEST_CASE("prefix sums are monotone in prefix length") {
  const ZeroTable table = load_zeros(kZerosFile, 100);
  double previous = 0.0;
  for (std::size_t n = 0; n <= 100; n += 5) {
    const double total = sum_of_squares(table.prefix(n));
    CHECK(total >= previous);
    previous = total;
  }
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_zeros("/nonexistent/zeros.txt", 5), input_error);
}

TEST_CASE("too few values names the count") {
  const std::string path = write_temp("short", "14.1\n21.0\n");
  try {
    load_zeros(path, 5);
    FAIL("expected input_error");
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("2 values") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("non-monotone input reports the line") {
  const std::string path = write_temp("mono", "# header\n14.1\n21.0\n20.9\n25.0\n");
  try {
    load_zeros(path, 4);
    FAIL("expected input_error");
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("non-monotone at line 4") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("unparseable line reports the line") {
  const std::string path = write_temp("junk", "14.1\nnot-a-number\n25.0\n");
  try {
    load_zeros(path, 3);
    FAIL("expected input_error");
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("comments and blank lines are ignored") {
  const std::string path =
      write_temp("comments", "# table\n\n14.1  \n  21.0\n25.0 # trailing note\n");
  const ZeroTable table = load_zeros(path, 3);
  CHECK(table[2] == doctest::Approx(25.0));
  std::remove(path.c_str());
}

TEST_CASE("prefix beyond the table throws") {
  const ZeroTable table = load_zeros(kZerosFile, 10);
  CHECK_THROWS_AS(table.prefix(11), input_error);
}
