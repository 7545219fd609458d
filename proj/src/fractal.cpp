#include "wsfit/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsfit {

void FractalParams::validate() const {
  if (!(gamma > 1.0))
    throw std::invalid_argument("fractal: gamma must be > 1, got " + std::to_string(gamma));
  if (!(d > 1.0 && d < 2.0))
    throw std::invalid_argument("fractal: d must lie in (1,2), got " + std::to_string(d));
  if (!(sigma >= 0.0))
    throw std::invalid_argument("fractal: sigma must be >= 0, got " + std::to_string(sigma));
  if (m_lo > 0 || m_hi < 0)
    throw std::invalid_argument("fractal: truncation window must contain m = 0");
}

namespace {

// Per-term frequency gamma^m and signed amplitude (-1)^m gamma^(-(2-d)m),
// precomputed once so grid sampling pays one sin() per term.
struct SeriesTerms {
  std::vector<double> freq;
  std::vector<double> amp;

  explicit SeriesTerms(const FractalParams& p) {
    const double log_gamma = std::log(p.gamma);
    freq.reserve(p.term_count());
    amp.reserve(p.term_count());
    for (int m = p.m_lo; m <= p.m_hi; ++m) {
      freq.push_back(std::exp(static_cast<double>(m) * log_gamma));
      double a = std::exp(-(2.0 - p.d) * static_cast<double>(m) * log_gamma);
      if (m & 1) a = -a;
      amp.push_back(a);
    }
  }

  double eval(double x) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < freq.size(); ++i) sum += amp[i] * std::sin(freq[i] * x);
    return sum;
  }
};

}  // namespace

double eval_A(double x, const FractalParams& params) {
  params.validate();
  if (!std::isfinite(x)) throw std::invalid_argument("fractal: non-finite x");
  if (params.sigma == 0.0) return 0.0;
  // Summation runs from m_lo upward; both tails decay geometrically
  // (~gamma^(-(d-1)|m|)|x| on the left, gamma^(-(2-d)m) on the right).
  return params.sigma * SeriesTerms(params).eval(x);
}

std::vector<double> sample_A(const std::vector<double>& xs, const FractalParams& params) {
  params.validate();
  std::vector<double> out(xs.size(), 0.0);
  if (params.sigma == 0.0) return out;
  const SeriesTerms terms(params);
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = params.sigma * terms.eval(xs[i]);
  return out;
}

double affine_residual(double x, double gamma, double d, int m_cutoff) {
  FractalParams p;
  p.gamma = gamma;
  p.sigma = 1.0;
  p.d = d;
  p.m_lo = -m_cutoff;
  p.m_hi = m_cutoff;
  const double scale = std::pow(gamma, 2.0 - d);
  return std::abs(eval_A(gamma * x, p) + scale * eval_A(x, p));
}

double affine_residual_bound(double x, double gamma, double d, int m_cutoff) {
  const int M = m_cutoff;
  // |term(m)| <= gamma^(-(2-d) m) * min(1, gamma^m |x|)
  auto term_bound = [&](int m) {
    const double amp = std::pow(gamma, -(2.0 - d) * m);
    const double arg = std::pow(gamma, m) * std::abs(x);
    return amp * std::min(1.0, arg);
  };
  const double truncation =
      std::pow(gamma, 2.0 - d) * (term_bound(M + 1) + term_bound(-M));

  // Finite-precision part: the two routes compute the phase gamma^(m+1) x
  // through differently rounded products, so each term carries a phase error
  // of order |arg| * (|m| log gamma) * eps. Once that reaches O(1) the sine
  // values decorrelate entirely and the term contributes up to 2 * amp.
  constexpr double eps = 2.220446049250313e-16;
  const double log_gamma = std::log(gamma);
  double rounding = 0.0;
  for (int m = -M; m <= M; ++m) {
    const double amp = std::pow(gamma, -(2.0 - d) * m);
    const double arg = std::pow(gamma, m + 1) * std::abs(x);
    const double phase_err = 2.0 * arg * ((std::abs(m) + 2) * log_gamma + 2.0) * eps;
    rounding += amp * std::min(2.0, phase_err);
  }
  return truncation + rounding;
}

double box_counting_dimension(const FractalParams& params, double window_lo,
                              double window_hi, const BoxCountSchedule& schedule) {
  params.validate();
  if (!(window_hi > window_lo))
    throw std::invalid_argument("box count: degenerate window");
  if (schedule.finest_level <= schedule.coarsest_level)
    throw std::invalid_argument("box count: schedule must span at least one level");

  // Dense samples of the graph, then normalize to a unit square so the
  // estimate does not depend on the window's aspect ratio. Keep several
  // samples per finest column.
  const std::size_t finest_columns = std::size_t{1} << schedule.finest_level;
  const std::size_t n = std::max(schedule.samples, finest_columns * 8);
  std::vector<double> y(n);
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  {
    const SeriesTerms terms(params);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = window_lo + (window_hi - window_lo) * static_cast<double>(i) /
                                       static_cast<double>(n - 1);
      y[i] = params.sigma * terms.eval(x);
      y_min = std::min(y_min, y[i]);
      y_max = std::max(y_max, y[i]);
    }
  }
  const double y_range = y_max - y_min;

  std::vector<double> log_inv_eps, log_count;
  for (int level = schedule.coarsest_level; level <= schedule.finest_level; ++level) {
    const std::size_t columns = std::size_t{1} << level;
    const double eps = 1.0 / static_cast<double>(columns);
    // Per x-column of width eps, count the eps-boxes spanned by [min y, max y].
    std::size_t boxes = 0;
    std::size_t i = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      const std::size_t i_end = (c + 1 == columns) ? n : ((c + 1) * n) / columns;
      if (y_range <= 0.0) {
        i = i_end;
        ++boxes;  // flat graph: one box per column, slope comes out exactly 1
        continue;
      }
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (; i < i_end; ++i) {
        lo = std::min(lo, y[i]);
        hi = std::max(hi, y[i]);
      }
      const double lo_n = (lo - y_min) / y_range;
      const double hi_n = (hi - y_min) / y_range;
      const auto k_lo = static_cast<long>(std::floor(lo_n / eps));
      const auto k_hi = static_cast<long>(std::floor(std::min(hi_n, 1.0 - 1e-15) / eps));
      boxes += static_cast<std::size_t>(k_hi - k_lo + 1);
    }
    log_inv_eps.push_back(std::log(1.0 / eps));
    log_count.push_back(std::log(static_cast<double>(boxes)));
  }

  // least-squares slope of log N vs log(1/eps)
  const auto m = static_cast<double>(log_inv_eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_inv_eps.size(); ++i) {
    sx += log_inv_eps[i];
    sy += log_count[i];
    sxx += log_inv_eps[i] * log_inv_eps[i];
    sxy += log_inv_eps[i] * log_count[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace wsfit
