#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wsfit/fractal.hpp"

using namespace wsfit;

namespace {

FractalParams params(double gamma, double sigma = 1.0, double d = 1.5, int m = 30) {
  FractalParams p;
  p.gamma = gamma;
  p.sigma = sigma;
  p.d = d;
  p.m_lo = -m;
  p.m_hi = m;
  return p;
}

}  // namespace

TEST_CASE("A(0) vanishes term by term") {
  for (double gamma : {1.5, 3.0, 9.0}) CHECK(eval_A(0.0, params(gamma)) == 0.0);
}

TEST_CASE("oddness is exact") {
  const FractalParams p = params(2.7, 1.3);
  for (double x = 0.1; x < 40.0; x *= 1.7) CHECK(eval_A(-x, p) == -eval_A(x, p));
}

TEST_CASE("sigma scales linearly") {
  const FractalParams unit = params(1.9);
  for (double x : {0.3, 2.0, 17.0}) {
    CHECK(eval_A(x, params(1.9, 2.0)) == 2.0 * eval_A(x, unit));
    // generic product within rounding
    const double ab = eval_A(x, params(1.9, 0.7 * 3.1));
    CHECK(ab == doctest::Approx(0.7 * eval_A(x, params(1.9, 3.1))).epsilon(1e-14));
  }
  CHECK(eval_A(5.0, params(1.9, 0.0)) == 0.0);
}

TEST_CASE("single-term truncation reduces to a plain sine") {
  FractalParams p = params(4.0);
  p.m_lo = 0;
  p.m_hi = 0;
  for (double x : {0.2, 1.0, 3.7}) CHECK(eval_A(x, p) == doctest::Approx(std::sin(x)).epsilon(1e-15));
}

TEST_CASE("term count contract") {
  CHECK(params(2.0).term_count() == 61);
  FractalParams two = params(2.0);
  two.m_lo = -1;
  two.m_hi = 0;
  // -(-1)^0 bookkeeping: m=-1 term is -sin(x/g)*g^{1/2}, m=0 term is sin(x)
  const double g = two.gamma;
  for (double x : {0.4, 2.2}) {
    const double expected = -std::sin(x / g) * std::pow(g, 0.5) + std::sin(x);
    CHECK(eval_A(x, two) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("affine scaling law holds to the truncation bound") {
  // residual of A(gx) + g^(1/2) A(x) comes from the two boundary terms the
  // index shift pushes across the truncation window
  for (double gamma : {1.5, 3.0, 9.0}) {
    for (double x = 0.1; x <= 10.0; x += 0.37) {
      const double residual = affine_residual(x, gamma, 1.5, 30);
      const double bound = affine_residual_bound(x, gamma, 1.5, 30);
      CHECK(residual <= bound * (1.0 + 1e-9) + 1e-15);
    }
  }
}

TEST_CASE("affine residual is tiny for well-separated frequencies") {
  for (double gamma : {3.0, 9.0}) {
    for (double x = 0.1; x <= 10.0; x += 0.53) {
      const double scale = std::max(1.0, std::abs(eval_A(x, params(gamma))));
      CHECK(affine_residual(x, gamma, 1.5, 30) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("affine residual at x = 0 is zero") {
  CHECK(affine_residual(0.0, 1.5, 1.5, 30) == 0.0);
}

TEST_CASE("larger truncation shrinks the worst-case residual") {
  auto worst = [](int m) {
    double w = 0.0;
    for (double x = 0.1; x <= 10.0; x += 0.1) w = std::max(w, affine_residual(x, 1.5, 1.5, m));
    return w;
  };
  const double w10 = worst(10), w20 = worst(20), w30 = worst(30);
  CHECK(w20 < w10);
  CHECK(w30 < w20);
}

TEST_CASE("box-counting dimension near 3/2 for the default series") {
  const double estimate = box_counting_dimension(params(1.5), 0.0, 50.0);
  CHECK(estimate > 1.3);
  CHECK(estimate < 1.7);
}

TEST_CASE("flat graph counts as a line") {
  const double estimate = box_counting_dimension(params(1.5, 0.0), 0.0, 50.0);
  CHECK(estimate == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rougher series gives a larger estimate") {
  const double d15 = box_counting_dimension(params(1.5, 1.0, 1.5), 0.0, 50.0);
  const double d18 = box_counting_dimension(params(1.5, 1.0, 1.8), 0.0, 50.0);
  CHECK(d18 > d15);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(eval_A(1.0, params(1.0)), std::invalid_argument);   // gamma <= 1
  CHECK_THROWS_AS(eval_A(1.0, params(2.0, 1.0, 2.0)), std::invalid_argument);  // d = 2
  CHECK_THROWS_AS(eval_A(1.0, params(2.0, -1.0)), std::invalid_argument);      // sigma < 0
  FractalParams bad = params(2.0);
  bad.m_lo = 1;
  CHECK_THROWS_AS(eval_A(1.0, bad), std::invalid_argument);
  CHECK_THROWS_AS(eval_A(std::nan(""), params(2.0)), std::invalid_argument);
  CHECK_THROWS_AS(box_counting_dimension(params(1.5), 5.0, 5.0), std::invalid_argument);
}
