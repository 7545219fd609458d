#pragma once

#include <cstddef>
#include <vector>

namespace wsfit {

// Parameters of the scaled alternating-sign sine series of Berry and Lewis,
//
//   sigma * sum_{m=m_lo}^{m_hi} (-1)^m sin(gamma^m x) / gamma^((2-d) m).
//
// gamma > 1 is the frequency ratio, d in (1,2) the fractal dimension of the
// graph, sigma >= 0 an overall scale. sigma = 0 degenerates to the zero
// function; the default truncation is m in [-30, 30].
struct FractalParams {
  double gamma = 3.0;
  double sigma = 1.0;
  double d = 1.5;
  int m_lo = -30;
  int m_hi = 30;

  // Throws std::invalid_argument on gamma <= 1, d outside (1,2), sigma < 0
  // or a truncation window not containing m = 0.
  void validate() const;

  int term_count() const { return m_hi - m_lo + 1; }
};

// Evaluates the truncated series at x. Exactly odd in x; linear in sigma.
// Summation runs from m_lo upward. Throws on non-finite x or invalid params.
double eval_A(double x, const FractalParams& params);

// Bulk evaluation with the per-term coefficients computed once.
std::vector<double> sample_A(const std::vector<double>& xs, const FractalParams& params);

// |A(gamma x) + gamma^(2-d) A(x)| for the truncated series with sigma = 1.
// Zero for the infinite series (index shift); for the truncation the residual
// equals the two shifted boundary terms, see affine_residual_bound.
double affine_residual(double x, double gamma, double d, int m_cutoff);

// Bound on affine_residual: the analytic part covers the two boundary terms
// the index shift moves across the truncation window,
//   gamma^(2-d) * (|term(m_hi+1)| + |term(m_lo)|),
// with |sin(y)| <= min(1, |y|); a second part covers double-precision phase
// rounding of the high-frequency arguments, which dominates for large gamma
// where the analytic tail is below machine noise.
double affine_residual_bound(double x, double gamma, double d, int m_cutoff);

// Box-count schedule: box sizes epsilon (relative to a unit square) at which
// the graph of A is covered.
struct BoxCountSchedule {
  int coarsest_level = 2;    // epsilon = 2^-coarsest_level
  int finest_level = 11;     // epsilon = 2^-finest_level
  std::size_t samples = 200000;
};

// Least-squares slope of log N(eps) vs log(1/eps) for the graph of A over
// [window_lo, window_hi], after normalizing the window to a unit square
// (equal-aspect convention). Flat input (zero y-range) gives exactly 1.
// Throws on a degenerate window.
double box_counting_dimension(const FractalParams& params, double window_lo,
                              double window_hi,
                              const BoxCountSchedule& schedule = {});

}  // namespace wsfit
