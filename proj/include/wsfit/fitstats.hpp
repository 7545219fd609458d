#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "wsfit/eigensolver.hpp"
#include "wsfit/zeros.hpp"

namespace wsfit {

// Least-squares comparison of a computed spectrum against the zero table.
struct FitReport {
  std::size_t n = 0;
  std::vector<double> deviations;  // eigenvalue_k - t_k, paired by rank
  double sse = 0.0;
  double sse_fraction = 0.0;  // sse / sum of t_k^2
  std::optional<double> baseline_sse;  // smooth-well sse, when known to the caller
  // First-order bound on how much the solver's Richardson error estimates
  // could move the SSE: sum(2 |dev_k| delta_k + delta_k^2).
  double solver_sse_uncertainty = 0.0;
};

// Pairs the k-th eigenvalue with the k-th zero. Throws on length mismatch.
FitReport fit(const EigenResult& eigen, const ZeroTable& zeros);

// Inverse standard-normal CDF (rational approximation polished by one Halley
// step; good to machine precision on (0,1)).
double inverse_normal_cdf(double p);

struct RankitResult {
  // (expected normal order statistic, sorted sample value)
  std::vector<std::pair<double, double>> points;
  double correlation = 0.0;  // Pearson r of the pairs
};

// Blom rankit scores Phi^-1((i - 3/8)/(n + 1/4)) against the order
// statistics. Requires >= 3 values.
RankitResult rankit_points(const std::vector<double>& deviations);

// Fixed-width, left-closed right-open bins; empty bins retained.
struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<std::size_t> counts;
  std::size_t out_of_range = 0;

  std::size_t total_in_bins() const;
};

Histogram histogram(const std::vector<double>& values, double lo, double hi, double width);

// Natural cubic interpolating spline through strictly increasing knots.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

  // Global minimum over the knot range.
  std::pair<double, double> minimum() const;

  // All x where the spline crosses `level`, ascending.
  std::vector<double> crossings(double level) const;

 private:
  std::vector<double> x_, a_, b_, c_, d_;  // s = a + b t + c t^2 + d t^3 per piece
  std::size_t locate(double x) const;
};

// Piecewise-cubic refinement of a sampled minimum: interpolates the sorted
// (gamma, sse) samples and returns the interior minimizer. Throws
// numerical_error when the minimum sits on the range boundary and
// invalid_argument on fewer than 4 samples or duplicate abscissae.
std::pair<double, double> refine_minimum(const std::vector<std::pair<double, double>>& samples);

// Maximal gamma-intervals on which the interpolant lies strictly below
// `baseline`. Same sampling requirements as refine_minimum.
std::vector<std::pair<double, double>> improvement_regions(
    const std::vector<std::pair<double, double>>& samples, double baseline);

}  // namespace wsfit
