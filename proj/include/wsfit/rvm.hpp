#pragma once

#include <cstddef>
#include <functional>

namespace wsfit {

// Smooth leading term of the zero-counting function,
//   N(E) = (E/2pi) log(E/(2 pi e)) + 7/8,  E > 0.
double n_smooth(double e);

// Leading term plus the two higher-order non-oscillatory corrections,
//   N(E) + (E/4) log(1 + 1/(4E^2)) + (1/4) arctan(1/(2E)).
// Both corrections are positive and monotonically decreasing.
double n_corrected(double e);

// Cutoff-dependent counting form,
//   (E/2pi) log Lambda^2 - (E/2pi)(log(E/2pi) - 1).
double n_connes(double e, double lambda);

// Sawtooth rho(u) = 1/2 - {u}.
double rho_sawtooth(double u);

// Settings for the sawtooth integral inside delta_term: composite Simpson
// per unit segment, segment count driven by a tail bound.
struct QuadratureSettings {
  int subdivisions = 32;          // Simpson panels per unit segment
  double tail_tol = 1e-10;        // absolute tolerance for the truncated tail
  std::size_t max_segments = 5'000'000;
  double max_error = 1e-6;        // error estimate above this is non-convergence
};

struct DeltaResult {
  double value = 0.0;
  double error_estimate = 0.0;  // Simpson Richardson estimate plus tail bound
  std::size_t segments = 0;
};

// delta(E) = (E/4) log(1 + 1/(4E^2)) + (1/4) arctan(1/(2E))
//            - (E/2) Integral_0^inf rho(u) du / ((u+1/4)^2 + (E/2)^2).
// The improper integral is integrated segment by unit segment (rho is
// piecewise linear there); the tail beyond an integer cutoff T is reduced by
// parts against the periodic antiderivatives of rho, which leaves an
// explicit f(T)/12 correction and a remainder bounded by 0.00802 |f'(T)|.
// Throws numerical_error when the tolerance cannot be met.
DeltaResult delta_term(double e, const QuadratureSettings& settings = {});

// Integral over [k, k+1) of rho(u) * w(u) by composite Simpson with the
// given panel count; err (optional) receives the |S_2m - S_m|/15 estimate.
// Exposed for the quadrature tests.
double rho_segment_integral(double k, const std::function<double(double)>& weight,
                            int subdivisions, double* err = nullptr);

}  // namespace wsfit
