#include "wsfit/rvm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wsfit/errors.hpp"

namespace wsfit {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
// max |integral of (P(u) - 1/12)| over a period, P the antiderivative of rho
constexpr double kQTildeMax = 0.008018864;
}  // namespace

double n_smooth(double e) {
  if (!(e > 0.0)) throw std::domain_error("n_smooth: E must be positive");
  return (e / kTwoPi) * std::log(e / (kTwoPi * std::exp(1.0))) + 7.0 / 8.0;
}

double n_corrected(double e) {
  if (!(e > 0.0)) throw std::domain_error("n_corrected: E must be positive");
  const double correction =
      (e / 4.0) * std::log1p(1.0 / (4.0 * e * e)) + 0.25 * std::atan(1.0 / (2.0 * e));
  return n_smooth(e) + correction;
}

double n_connes(double e, double lambda) {
  if (!(e > 0.0)) throw std::domain_error("n_connes: E must be positive");
  if (!(lambda > 0.0)) throw std::domain_error("n_connes: Lambda must be positive");
  return (e / kTwoPi) * std::log(lambda * lambda) -
         (e / kTwoPi) * (std::log(e / kTwoPi) - 1.0);
}

double rho_sawtooth(double u) {
  return 0.5 - (u - std::floor(u));
}

namespace {

// Composite Simpson of g over [k, k+1] with m panels.
template <typename G>
double simpson_unit(double k, const G& g, int m) {
  const double h = 1.0 / m;
  double sum = g(k) + g(k + 1.0);
  for (int j = 1; j < m; ++j) sum += 2.0 * (1.0 + (j & 1)) * g(k + j * h);
  return sum * h / 3.0;
}

template <typename W>
double segment_with_estimate(double k, const W& weight, int m, double* err) {
  auto g = [&](double u) {
    // rho is linear inside the segment; evaluate it directly to dodge the
    // floor() jitter exactly at the right endpoint
    double frac = u - k;
    if (frac > 1.0) frac = 1.0;
    return (0.5 - frac) * weight(u);
  };
  const double coarse = simpson_unit(k, g, m);
  const double fine = simpson_unit(k, g, 2 * m);
  if (err) *err = std::abs(fine - coarse) / 15.0;
  return fine;
}

}  // namespace

double rho_segment_integral(double k, const std::function<double(double)>& weight,
                            int subdivisions, double* err) {
  if (subdivisions < 1) throw std::invalid_argument("rho_segment_integral: subdivisions >= 1");
  return segment_with_estimate(k, weight, subdivisions, err);
}

DeltaResult delta_term(double e, const QuadratureSettings& settings) {
  if (!(e > 0.0)) throw std::domain_error("delta_term: E must be positive");
  if (settings.subdivisions < 1)
    throw std::invalid_argument("delta_term: subdivisions must be >= 1");

  const double b = e / 2.0;
  auto f = [&](double u) {
    const double s = u + 0.25;
    return 1.0 / (s * s + b * b);
  };
  auto f_prime_mag = [&](double u) {
    const double s = u + 0.25;
    const double denom = s * s + b * b;
    return 2.0 * s / (denom * denom);
  };

  // Integer segment count T: past the |f'| maximum, and far enough that the
  // tail remainder (E/2) * 0.00802 |f'(T)| is below tolerance.
  std::size_t segments = static_cast<std::size_t>(std::ceil(4.0 * b)) + 4;
  while (segments < settings.max_segments &&
         b * kQTildeMax * f_prime_mag(static_cast<double>(segments)) > settings.tail_tol)
    segments += 1 + segments / 4;
  const auto T = static_cast<double>(segments);
  const double tail_remainder_bound = b * kQTildeMax * f_prime_mag(T);
  if (tail_remainder_bound > settings.tail_tol)
    throw numerical_error("delta_term: tail bound not met after " +
                          std::to_string(segments) + " segments");

  double integral = 0.0;
  double simpson_err = 0.0;
  for (std::size_t k = 0; k < segments; ++k) {
    double seg_err = 0.0;
    integral += segment_with_estimate(static_cast<double>(k), f, settings.subdivisions, &seg_err);
    simpson_err += seg_err;
  }
  // Reduction by parts of the tail: integral_T^inf rho f = f(T)/12 + bounded
  integral += f(T) / 12.0;

  DeltaResult result;
  result.segments = segments;
  result.error_estimate = b * simpson_err + tail_remainder_bound;
  result.value = (e / 4.0) * std::log1p(1.0 / (4.0 * e * e)) +
                 0.25 * std::atan(1.0 / (2.0 * e)) - b * integral;
  if (result.error_estimate > settings.max_error)
    throw numerical_error("delta_term: quadrature non-convergence, estimate " +
                          std::to_string(result.error_estimate));
  return result;
}

}  // namespace wsfit
