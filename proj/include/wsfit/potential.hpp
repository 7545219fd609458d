#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wsfit/fractal.hpp"

namespace wsfit {

// Well-bottom value of the smooth potential, V0 = 3.10073 pi.
inline constexpr double kDefaultV0 = 3.10073 * 3.14159265358979323846;

enum class PotentialVariant { leading, higher_order, asymptotic };

std::string to_string(PotentialVariant v);
PotentialVariant potential_variant_from_string(const std::string& name);

// The smooth half-well in implicit form: x as a function of V for V >= v0,
//
//   x(V) = (1/pi) [ sqrt(V-v0) ln(v0/(2 pi e^2))
//                   + sqrt(V) ln((sqrt(V)+sqrt(V-v0))/(sqrt(V)-sqrt(V-v0))) ].
//
// Evaluated in the cancellation-free form 2 ln(sqrt(V)+sqrt(V-v0)) - ln(v0)
// for the second log. Strictly increasing from x(v0) = 0. Throws on V < v0.
double x_ws(double V, double v0 = kDefaultV0);

// Inverse of x_ws by bracketed root finding on the monotone implicit form:
// returns V with |x_ws(V) - x| <= tol. invert_potential(0) = v0 exactly.
// Throws numerical_error if bracket expansion fails (malformed v0).
double invert_potential(double x, double v0 = kDefaultV0, double tol = 1e-10);

// The implicit form with the two higher-order non-oscillatory counting
// corrections folded in. The printed expression mixes complex terms in
// conjugate pairs; evaluated with complex arithmetic, the imaginary parts
// cancel. Returns the real part; *imag_residual (optional) receives the
// magnitude of the leftover imaginary part relative to the real part.
// Throws numerical_error if that residual exceeds 1e-8 (transcription guard)
// and std::domain_error on V < v0.
double x_ws_higher(double V, double v0 = kDefaultV0, double* imag_residual = nullptr);

// Principal-branch Lambert W: returns w with w e^w = z for z >= -1/e,
// |w e^w - z| <= 1e-12 max(1,|z|). Halley iteration from an asymptotic or
// series initial guess. Throws std::domain_error below -1/e.
double lambert_w(double z);

// Large-|x| closed form of the smooth well:
//   (pi^2 x^2 / 4) [ LW( sqrt(pi/2) |x| / e ) ]^-2,
// even in x, with the x -> 0 limit pi e^2 / 2 filled in.
double v_asymptotic(double x);

// Construction recipe for a solver grid.
struct PotentialSpec {
  PotentialVariant variant = PotentialVariant::leading;
  double v0 = kDefaultV0;
  std::optional<FractalParams> fractal;  // sigma-scaled supplement, odd in x
  bool symmetric_extension = true;

  void validate() const;
};

// Uniform samples of the total potential on [-L, L]. Immutable once built.
struct PotentialGrid {
  std::vector<double> x;  // size N+1, x[0] = -L, x[N] = +L, step h
  std::vector<double> v;
  double half_width = 0.0;
  double step = 0.0;
  PotentialSpec spec;

  std::size_t points() const { return x.size(); }
  double v_min() const;
  double wall_height() const;  // min(v.front(), v.back())
};

// Samples v(x) = v_smooth(|x|) + A_supplement(x) on x in [-L, L]; L/h must be
// integral. The higher_order variant has no numerical inverse and is
// rejected here. Inversion failures propagate as numerical_error.
PotentialGrid build_grid(const PotentialSpec& spec, double half_width, double step);

// Smallest integral half-width L with v_smooth(L) >= margin * e_max
// (hard-wall truncation rule; margin defaults to 1.5).
double default_half_width(double e_max, double v0 = kDefaultV0, double margin = 1.5);

}  // namespace wsfit
