#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "wsfit/errors.hpp"
#include "wsfit/fitstats.hpp"

using namespace wsfit;

namespace {

// deterministic Box-Muller stream, independent of library distributions
std::vector<double> pseudo_normal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };
  std::vector<double> out;
  out.reserve(n + 1);
  while (out.size() < n) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    out.push_back(r * std::cos(2.0 * 3.14159265358979323846 * u2));
    out.push_back(r * std::sin(2.0 * 3.14159265358979323846 * u2));
  }
  out.resize(n);
  return out;
}

EigenResult fake_eigen(std::vector<double> values) {
  EigenResult r;
  r.eigenvalues = std::move(values);
  r.raw_eigenvalues = r.eigenvalues;
  r.error_estimate.assign(r.eigenvalues.size(), 0.0);
  return r;
}

ZeroTable fake_zeros(std::vector<double> values) {
  ZeroTable t;
  t.values = std::move(values);
  t.source = "synthetic";
  return t;
}

}  // namespace

TEST_CASE("fit: perfect agreement gives zero sse") {
  const auto zeros = fake_zeros({14.1, 21.0, 25.0});
  const FitReport r = fit(fake_eigen({14.1, 21.0, 25.0}), zeros);
  CHECK(r.sse == 0.0);
  CHECK(r.sse_fraction == 0.0);
  CHECK(r.n == 3);
}

TEST_CASE("fit: deviations, sse, and fraction") {
  const auto zeros = fake_zeros({10.0, 20.0});
  const FitReport r = fit(fake_eigen({10.5, 19.0}), zeros);
  CHECK(r.deviations[0] == doctest::Approx(0.5));
  CHECK(r.deviations[1] == doctest::Approx(-1.0));
  CHECK(r.sse == doctest::Approx(1.25));
  CHECK(r.sse_fraction == doctest::Approx(1.25 / 500.0));
}

TEST_CASE("fit: sse is a rank-pairing sum, invariant under pair permutation") {
  // the pairing is by sorted rank; summing the squared deviations in any
  // order reproduces the same sse
  const auto zeros = fake_zeros({10.0, 20.0, 30.0, 40.0});
  const FitReport r = fit(fake_eigen({10.1, 19.8, 30.3, 39.5}), zeros);
  double forward = 0.0, backward = 0.0;
  for (std::size_t k = 0; k < 4; ++k) forward += r.deviations[k] * r.deviations[k];
  for (std::size_t k = 4; k-- > 0;) backward += r.deviations[k] * r.deviations[k];
  CHECK(r.sse == doctest::Approx(forward));
  CHECK(forward == doctest::Approx(backward));
}

TEST_CASE("fit: length mismatch") {
  CHECK_THROWS_AS(fit(fake_eigen({1.0, 2.0}), fake_zeros({1.0})), std::invalid_argument);
}

TEST_CASE("fit: solver uncertainty propagates the error estimates") {
  EigenResult e = fake_eigen({10.5, 20.0});
  e.error_estimate = {0.01, 0.02};
  const FitReport r = fit(e, fake_zeros({10.0, 20.0}));
  CHECK(r.solver_sse_uncertainty ==
        doctest::Approx(2.0 * 0.5 * 0.01 + 0.01 * 0.01 + 0.02 * 0.02));
}

TEST_CASE("inverse normal cdf matches reference quantiles") {
  const std::pair<double, double> cases[] = {
      {0.001, -3.090232306167813},  {0.025, -1.9599639845400545},
      {0.1, -1.2815515655446004},   {0.3, -0.5244005127080409},
      {0.5, 0.0},                   {0.7, 0.5244005127080407},
      {0.9, 1.2815515655446004},    {0.975, 1.959963984540054},
      {0.999, 3.090232306167813},   {1e-09, -5.9978070150076865},
      {0.999999999, 5.997807019601637}};
  for (const auto& [p, expected] : cases)
    CHECK(inverse_normal_cdf(p) == doctest::Approx(expected).epsilon(1e-10));
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("rankit: seeded pseudo-normal sample is nearly linear") {
  const RankitResult r = rankit_points(pseudo_normal(1000, 20250811));
  CHECK(r.points.size() == 1000);
  CHECK(r.correlation >= 0.995);
  // order statistics ascend, scores ascend
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    CHECK(r.points[i].first > r.points[i - 1].first);
    CHECK(r.points[i].second >= r.points[i - 1].second);
  }
}

TEST_CASE("rankit: correlation is affine invariant") {
  const std::vector<double> base = pseudo_normal(500, 7);
  std::vector<double> scaled;
  scaled.reserve(base.size());
  for (double v : base) scaled.push_back(-3.7 * v + 11.0);
  const double r1 = rankit_points(base).correlation;
  const double r2 = rankit_points(scaled).correlation;
  // negative scale flips the order; the magnitude is what is invariant
  CHECK(std::abs(std::abs(r1) - std::abs(r2)) <= 1e-12);
  std::vector<double> shifted;
  for (double v : base) shifted.push_back(2.0 * v + 5.0);
  CHECK(rankit_points(shifted).correlation == doctest::Approx(r1).epsilon(1e-12));
}

TEST_CASE("rankit: symmetric samples give scores symmetric about zero") {
  const RankitResult r = rankit_points({-2.0, -2.0, 2.0, 2.0});
  REQUIRE(r.points.size() == 4);
  CHECK(r.points[0].first == doctest::Approx(-r.points[3].first).epsilon(1e-12));
  CHECK(r.points[1].first == doctest::Approx(-r.points[2].first).epsilon(1e-12));
}

TEST_CASE("rankit: heavy tails lower the correlation visibly") {
  const std::vector<double> normal = pseudo_normal(1000, 99);
  std::vector<double> heavy;
  heavy.reserve(normal.size());
  for (double v : normal) heavy.push_back(v * v * v);
  const double r_normal = rankit_points(normal).correlation;
  const double r_heavy = rankit_points(heavy).correlation;
  CHECK(r_normal >= 0.995);
  CHECK(r_heavy < r_normal - 0.02);
}

TEST_CASE("rankit: needs at least three values") {
  CHECK_THROWS_AS(rankit_points({-1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("histogram: direct count example") {
  const Histogram h = histogram({1.0, 1.4, 1.5}, 1.0, 9.5, 0.5);
  REQUIRE(h.counts.size() == 17);
  CHECK(h.counts[0] == 2);  // [1.0, 1.5)
  CHECK(h.counts[1] == 1);  // [1.5, 2.0)
  for (std::size_t b = 2; b < h.counts.size(); ++b) CHECK(h.counts[b] == 0);
  CHECK(h.out_of_range == 0);
}

TEST_CASE("histogram: empty input keeps the empty bins") {
  const Histogram h = histogram({}, 1.0, 9.5, 0.5);
  CHECK(h.counts.size() == 17);
  CHECK(h.total_in_bins() == 0);
}

TEST_CASE("histogram: totals reconcile with out-of-range") {
  std::mt19937_64 rng(5);
  std::vector<double> values;
  for (int i = 0; i < 1000; ++i)
    values.push_back(-2.0 + 14.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53);
  const Histogram h = histogram(values, 1.0, 9.5, 0.5);
  CHECK(h.total_in_bins() + h.out_of_range == values.size());
  CHECK(h.out_of_range > 0);
}

TEST_CASE("histogram: right edge is exclusive") {
  const Histogram h = histogram({9.5, 1.0}, 1.0, 9.5, 0.5);
  CHECK(h.total_in_bins() == 1);
  CHECK(h.out_of_range == 1);
}

TEST_CASE("refine_minimum: recovers an exact parabola minimum") {
  std::vector<std::pair<double, double>> samples;
  for (double g = 1.0; g <= 5.0 + 1e-9; g += 0.5)
    samples.emplace_back(g, (g - 3.0) * (g - 3.0) + 11.0);
  const auto [g, v] = refine_minimum(samples);
  CHECK(g == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(v == doctest::Approx(11.0).epsilon(1e-8));
}

TEST_CASE("refine_minimum: never above the best raw sample") {
  std::vector<std::pair<double, double>> samples;
  double best = 1e300;
  for (double g = 1.0; g <= 9.0 + 1e-9; g += 0.25) {
    const double v = std::sin(3.0 * g) + 0.05 * (g - 4.0) * (g - 4.0);
    samples.emplace_back(g, v);
    best = std::min(best, v);
  }
  const auto [g, v] = refine_minimum(samples);
  (void)g;
  CHECK(v <= best + 1e-9);
}

TEST_CASE("refine_minimum: monotone data reports a boundary minimum") {
  std::vector<std::pair<double, double>> samples;
  for (double g = 1.0; g <= 4.0 + 1e-9; g += 0.5) samples.emplace_back(g, 2.0 * g);
  CHECK_THROWS_AS(refine_minimum(samples), numerical_error);
}

TEST_CASE("refine_minimum: input validation") {
  CHECK_THROWS_AS(refine_minimum({{1.0, 2.0}, {2.0, 1.0}, {3.0, 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(refine_minimum({{1.0, 2.0}, {1.0, 1.0}, {3.0, 2.0}, {4.0, 5.0}}),
                  std::invalid_argument);
}

TEST_CASE("improvement_regions: all above baseline is empty") {
  std::vector<std::pair<double, double>> samples;
  for (double g = 1.0; g <= 5.0 + 1e-9; g += 0.5) samples.emplace_back(g, 10.0 + g);
  CHECK(improvement_regions(samples, 5.0).empty());
}

TEST_CASE("improvement_regions: recovers known crossing points") {
  // f dips below the baseline exactly on (2.9, 3.2)
  const double baseline = 11.0;
  std::vector<std::pair<double, double>> samples;
  for (double g = 1.0; g <= 5.0 + 1e-9; g += 0.05)
    samples.emplace_back(g, baseline + 8.0 * (g - 2.9) * (g - 3.2));
  const auto regions = improvement_regions(samples, baseline);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].first == doctest::Approx(2.9).epsilon(1e-3));
  CHECK(regions[0].second == doctest::Approx(3.2).epsilon(1e-3));
}

TEST_CASE("improvement_regions: clipped at the sampled range") {
  // dips below baseline from the left edge up to 1.8
  const double baseline = 4.0;
  std::vector<std::pair<double, double>> samples;
  for (double g = 1.0; g <= 5.0 + 1e-9; g += 0.1)
    samples.emplace_back(g, baseline + 3.0 * (g - 1.8));
  const auto regions = improvement_regions(samples, baseline);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].first == doctest::Approx(1.0));
  CHECK(regions[0].second == doctest::Approx(1.8).epsilon(1e-6));
}

TEST_CASE("cubic spline interpolates its knots and straight lines") {
  std::vector<double> xs, ys;
  for (double x = 0.0; x <= 4.0 + 1e-9; x += 0.5) {
    xs.push_back(x);
    ys.push_back(2.0 * x - 1.0);
  }
  const CubicSpline s(xs, ys);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(s(xs[i]) == doctest::Approx(ys[i]));
  for (double x = 0.1; x < 4.0; x += 0.3)
    CHECK(s(x) == doctest::Approx(2.0 * x - 1.0).epsilon(1e-12));
}
