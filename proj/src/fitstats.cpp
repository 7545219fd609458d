#include "wsfit/fitstats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wsfit/errors.hpp"

namespace wsfit {

FitReport fit(const EigenResult& eigen, const ZeroTable& zeros) {
  if (eigen.eigenvalues.size() != zeros.count())
    throw std::invalid_argument("fit: " + std::to_string(eigen.eigenvalues.size()) +
                                " eigenvalues vs " + std::to_string(zeros.count()) +
                                " zeros");
  FitReport report;
  report.n = zeros.count();
  report.deviations.resize(report.n);
  double sse = 0.0, uncertainty = 0.0;
  for (std::size_t k = 0; k < report.n; ++k) {
    const double dev = eigen.eigenvalues[k] - zeros[k];
    report.deviations[k] = dev;
    sse += dev * dev;
    if (k < eigen.error_estimate.size()) {
      const double delta = eigen.error_estimate[k];
      uncertainty += 2.0 * std::abs(dev) * delta + delta * delta;
    }
  }
  report.sse = sse;
  const double total = sum_of_squares(zeros);
  report.sse_fraction = (total > 0.0) ? sse / total : 0.0;
  report.solver_sse_uncertainty = uncertainty;
  return report;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("inverse_normal_cdf: p must lie in (0,1)");

  // Acklam's rational approximation, then one Halley step.
  static const double A[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double B[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double C[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double D[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q /
        (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  }

  // Halley refinement against the exact CDF.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

RankitResult rankit_points(const std::vector<double>& deviations) {
  const std::size_t n = deviations.size();
  if (n < 3) throw std::invalid_argument("rankit: need at least 3 values");

  std::vector<double> sorted = deviations;
  std::sort(sorted.begin(), sorted.end());

  RankitResult result;
  result.points.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double p = (static_cast<double>(i) - 0.375) / (static_cast<double>(n) + 0.25);
    result.points.emplace_back(inverse_normal_cdf(p), sorted[i - 1]);
  }

  double sx = 0, sy = 0;
  for (const auto& [score, value] : result.points) {
    sx += score;
    sy += value;
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (const auto& [score, value] : result.points) {
    sxy += (score - mx) * (value - my);
    sxx += (score - mx) * (score - mx);
    syy += (value - my) * (value - my);
  }
  result.correlation = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
  return result;
}

std::size_t Histogram::total_in_bins() const {
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  return total;
}

Histogram histogram(const std::vector<double>& values, double lo, double hi, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("histogram: width must be positive");
  if (!(hi > lo)) throw std::invalid_argument("histogram: hi must exceed lo");
  Histogram h;
  h.lo = lo;
  h.width = width;
  const auto nbins = static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9));
  h.counts.assign(std::max<std::size_t>(nbins, 1), 0);
  for (double v : values) {
    const double offset = (v - lo) / width;
    if (offset < 0.0 || offset >= static_cast<double>(h.counts.size())) {
      ++h.out_of_range;
      continue;
    }
    ++h.counts[static_cast<std::size_t>(offset)];
  }
  return h;
}

// ---------------------------------------------------------------------------
// Natural cubic spline
// ---------------------------------------------------------------------------

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys) : x_(std::move(xs)) {
  const std::size_t n = x_.size();
  if (n < 3 || ys.size() != n)
    throw std::invalid_argument("spline: need >= 3 matching knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw std::invalid_argument("spline: knots must be strictly increasing");

  // second-derivative solve, natural boundary (s'' = 0 at both ends)
  std::vector<double> hseg(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) hseg[i] = x_[i + 1] - x_[i];

  std::vector<double> mu(n, 0.0), z(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double alpha =
        3.0 * ((ys[i + 1] - ys[i]) / hseg[i] - (ys[i] - ys[i - 1]) / hseg[i - 1]);
    const double ell = 2.0 * (x_[i + 1] - x_[i - 1]) - hseg[i - 1] * mu[i - 1];
    mu[i] = hseg[i] / ell;
    z[i] = (alpha - hseg[i - 1] * z[i - 1]) / ell;
  }
  std::vector<double> c(n, 0.0);
  for (std::size_t i = n - 1; i-- > 1;) c[i] = z[i] - mu[i] * c[i + 1];

  a_.resize(n - 1);
  b_.resize(n - 1);
  c_.resize(n - 1);
  d_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a_[i] = ys[i];
    c_[i] = c[i];
    b_[i] = (ys[i + 1] - ys[i]) / hseg[i] - hseg[i] * (c[i + 1] + 2.0 * c[i]) / 3.0;
    d_[i] = (c[i + 1] - c[i]) / (3.0 * hseg[i]);
  }
}

std::size_t CubicSpline::locate(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return x_.size() - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double CubicSpline::operator()(double x) const {
  const std::size_t i = locate(x);
  const double t = x - x_[i];
  return a_[i] + t * (b_[i] + t * (c_[i] + t * d_[i]));
}

std::pair<double, double> CubicSpline::minimum() const {
  double best_x = x_.front();
  double best_v = (*this)(best_x);
  auto consider = [&](double x) {
    const double v = (*this)(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  };
  consider(x_.back());
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    consider(x_[i + 1]);
    // interior critical points of the cubic piece: b + 2c t + 3d t^2 = 0
    const double h = x_[i + 1] - x_[i];
    const double b = b_[i], c2 = 2.0 * c_[i], d3 = 3.0 * d_[i];
    if (std::abs(d3) < 1e-300) {
      if (std::abs(c2) > 0.0) {
        const double t = -b / c2;
        if (t > 0.0 && t < h) consider(x_[i] + t);
      }
      continue;
    }
    const double disc = c2 * c2 - 4.0 * d3 * b;
    if (disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    for (double t : {(-c2 + sq) / (2.0 * d3), (-c2 - sq) / (2.0 * d3)})
      if (t > 0.0 && t < h) consider(x_[i] + t);
  }
  return {best_x, best_v};
}

std::vector<double> CubicSpline::crossings(double level) const {
  std::vector<double> roots;
  auto value = [&](double x) { return (*this)(x) - level; };

  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    // split the piece at the cubic's critical points so each part is monotone
    std::vector<double> knots = {x_[i], x_[i + 1]};
    const double h = x_[i + 1] - x_[i];
    const double b = b_[i], c2 = 2.0 * c_[i], d3 = 3.0 * d_[i];
    if (std::abs(d3) >= 1e-300) {
      const double disc = c2 * c2 - 4.0 * d3 * b;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        for (double t : {(-c2 + sq) / (2.0 * d3), (-c2 - sq) / (2.0 * d3)})
          if (t > 0.0 && t < h) knots.push_back(x_[i] + t);
      }
    } else if (std::abs(c2) > 0.0) {
      const double t = -b / c2;
      if (t > 0.0 && t < h) knots.push_back(x_[i] + t);
    }
    std::sort(knots.begin(), knots.end());

    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
      double lo = knots[j], hi = knots[j + 1];
      double flo = value(lo);
      const double fhi = value(hi);
      if (flo == 0.0) roots.push_back(lo);
      if (fhi == 0.0) roots.push_back(hi);
      if (flo * fhi < 0.0) {
        for (int it = 0; it < 90; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = value(mid);
          if (fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if (flo * fm < 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              roots.end());
  return roots;
}

namespace {

CubicSpline spline_from_samples(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 4)
    throw std::invalid_argument("interpolation: need at least 4 samples");
  std::vector<std::pair<double, double>> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> xs, ys;
  xs.reserve(sorted.size());
  ys.reserve(sorted.size());
  for (const auto& [x, y] : sorted) {
    if (!xs.empty() && !(x > xs.back()))
      throw std::invalid_argument("interpolation: duplicate abscissa " + std::to_string(x));
    xs.push_back(x);
    ys.push_back(y);
  }
  return CubicSpline(std::move(xs), std::move(ys));
}

}  // namespace

std::pair<double, double> refine_minimum(const std::vector<std::pair<double, double>>& samples) {
  const CubicSpline s = spline_from_samples(samples);
  const auto [x, v] = s.minimum();
  const double span = s.x_back() - s.x_front();
  if (x <= s.x_front() + 1e-12 * span || x >= s.x_back() - 1e-12 * span)
    throw numerical_error("refine_minimum: minimum at range boundary (x=" +
                          std::to_string(x) + ")");
  return {x, v};
}

std::vector<std::pair<double, double>> improvement_regions(
    const std::vector<std::pair<double, double>>& samples, double baseline) {
  const CubicSpline s = spline_from_samples(samples);
  std::vector<double> cuts = s.crossings(baseline);

  std::vector<double> edges;
  edges.push_back(s.x_front());
  for (double c : cuts) edges.push_back(c);
  edges.push_back(s.x_back());

  std::vector<std::pair<double, double>> regions;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    if (!(hi > lo)) continue;
    if (s(0.5 * (lo + hi)) < baseline) {
      if (!regions.empty() && std::abs(regions.back().second - lo) < 1e-12)
        regions.back().second = hi;  // merge across a tangency
      else
        regions.emplace_back(lo, hi);
    }
  }
  return regions;
}

}  // namespace wsfit
