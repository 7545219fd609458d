#include "wsfit/potential.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "wsfit/errors.hpp"

namespace wsfit {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(PotentialVariant v) {
  switch (v) {
    case PotentialVariant::leading: return "leading";
    case PotentialVariant::higher_order: return "higher_order";
    case PotentialVariant::asymptotic: return "asymptotic";
  }
  return "?";
}

PotentialVariant potential_variant_from_string(const std::string& name) {
  if (name == "leading") return PotentialVariant::leading;
  if (name == "higher_order") return PotentialVariant::higher_order;
  if (name == "asymptotic") return PotentialVariant::asymptotic;
  throw input_error("unknown potential variant: " + name);
}

double x_ws(double V, double v0) {
  if (!(v0 > 0.0)) throw std::invalid_argument("x_ws: v0 must be positive");
  if (V < v0) throw std::domain_error("x_ws: V < v0");
  if (V == v0) return 0.0;
  const double rt_diff = std::sqrt(V - v0);
  const double rt_v = std::sqrt(V);
  // ln(v0 / (2 pi e^2)) and the cancellation-free rewrite
  // ln((rt_v+rt_diff)/(rt_v-rt_diff)) = 2 ln(rt_v+rt_diff) - ln(v0).
  const double lead_log = std::log(v0) - std::log(2.0 * kPi) - 2.0;
  const double well_log = 2.0 * std::log(rt_v + rt_diff) - std::log(v0);
  return (rt_diff * lead_log + rt_v * well_log) / kPi;
}

double invert_potential(double x, double v0, double tol) {
  if (x < 0.0) throw std::domain_error("invert_potential: x must be >= 0");
  if (x == 0.0) return v0;

  // Expand the upper bracket on the strictly increasing x_ws.
  double offset = 1.0;
  int expansions = 0;
  while (x_ws(v0 + offset, v0) < x) {
    offset *= 2.0;
    if (++expansions > 200)
      throw numerical_error("invert_potential: bracket expansion failed (v0=" +
                            std::to_string(v0) + ", x=" + std::to_string(x) + ")");
  }
  double lo = v0;
  double hi = v0 + offset;

  // Bisection; the target function is monotone and cheap.
  double mid = hi;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = x_ws(mid, v0) - x;
    if (std::abs(f) <= tol) return mid;
    (f < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  const double f = x_ws(mid, v0) - x;
  if (std::abs(f) > tol)
    throw numerical_error("invert_potential: no convergence at x=" + std::to_string(x));
  return mid;
}

double x_ws_higher(double V, double v0, double* imag_residual) {
  if (!(v0 > 0.0)) throw std::invalid_argument("x_ws_higher: v0 must be positive");
  if (V < v0) throw std::domain_error("x_ws_higher: V < v0");

  using C = std::complex<double>;
  const C i(0.0, 1.0);
  const double pi2 = kPi * kPi;
  const double rt_d = std::sqrt(V - v0);  // sqrt(V - V0)
  const double rt_v = std::sqrt(V);
  const double rt2 = std::sqrt(2.0);

  // Principal-branch complex radicals; each appears with its conjugate.
  const C s_vm = std::sqrt(C(V, -0.5));      // sqrt(V - i/2)
  const C s_vp = std::sqrt(C(V, +0.5));      // sqrt(V + i/2)
  const C s_2m = std::sqrt(C(-4.0 * v0, 2.0));   // sqrt(2i - 4 V0)
  const C s_2p = std::sqrt(C(-4.0 * v0, -2.0));  // sqrt(-4 V0 - 2i)
  const C r_m = std::sqrt(C(2.0 * v0, -1.0));    // sqrt(2 V0 - i)
  const C r_p = std::sqrt(C(2.0 * v0, 1.0));     // sqrt(2 V0 + i)
  const C q_m = std::sqrt(C(-2.0 * v0, 1.0));    // sqrt(i - 2 V0)

  C terms[11];
  terms[0] = 2.0 * (1.0 + kPi) * rt_v * std::atanh(rt_d / rt_v) / pi2;
  terms[1] = -2.0 * (1.0 + kPi) * rt_d / pi2;
  terms[2] = 2.0 * rt_d / pi2;
  terms[3] = -V * std::atanh(rt_d / s_vm) / (pi2 * s_vm);
  terms[4] = -V * std::atanh(rt_d / s_vp) / (pi2 * s_vp);
  terms[5] = -i *
             (std::atan(rt2 * rt_d / r_m) / r_m - std::atan(rt2 * rt_d / r_p) / r_p) /
             (rt2 * pi2);
  terms[6] = -(std::log1p(1.0 / (4.0 * v0 * v0)) +
               kPi * (std::log(4.0 * pi2) - 2.0 * std::log(v0))) *
             rt_d / (2.0 * pi2);
  terms[7] = -i *
             std::log(((1.0 - i) * v0 + rt_v) / (((1.0 + i) * rt_v + i) * s_2m) +
                      2.0 * i * rt_d / (4.0 * rt_v + (2.0 + 2.0 * i))) /
             (2.0 * pi2 * s_2m);
  terms[8] = i *
             std::log(((-1.0 + i) * v0 - i * rt_v) / (((1.0 + i) * rt_v - 1.0) * s_2p) -
                      2.0 * i * rt_d / (4.0 * rt_v - (2.0 - 2.0 * i))) /
             (2.0 * pi2 * s_2p);
  terms[9] = -i *
             std::log(((1.0 - i) * (q_m * rt_d - rt2 * v0) + rt2 * rt_v) /
                      ((2.0 * i - (2.0 + 2.0 * i) * rt_v) * q_m)) /
             (2.0 * pi2 * s_2m);
  terms[10] = i *
              std::log(i * ((1.0 + i) * v0 + rt_v) / (((1.0 + i) * rt_v + 1.0) * s_2p) +
                       (1.0 - i) * rt_d / ((2.0 + 2.0 * i) * rt_v + 2.0)) /
              (2.0 * pi2 * s_2p);

  C total(0.0, 0.0);
  double scale = 0.0;
  for (const C& t : terms) {
    total += t;
    scale = std::max(scale, std::abs(t));
  }

  // The conjugate pairs cancel analytically; leftover imaginary mass is a
  // transcription or branch error. Measured against the term scale so the
  // check stays meaningful at V -> v0 where the real part itself vanishes.
  const double residual =
      std::abs(total.imag()) / std::max({std::abs(total.real()), scale, 1e-300});
  if (imag_residual) *imag_residual = residual;
  if (residual > 1e-8)
    throw numerical_error("x_ws_higher: imaginary residual " + std::to_string(residual) +
                          " at V=" + std::to_string(V));
  return total.real();
}

double lambert_w(double z) {
  constexpr double kInvE = 0.36787944117144232160;  // 1/e
  if (z < -kInvE) throw std::domain_error("lambert_w: z < -1/e (principal branch)");
  if (z == 0.0) return 0.0;

  // Initial guess: branch-point series near -1/e, Taylor near 0, two-log
  // asymptotic for large z.
  double w;
  if (z < -0.25) {
    const double p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
  } else if (z < 1.0) {
    w = z * (1.0 - z + 1.5 * z * z);
  } else {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  const double tol = 1e-13 * std::max(1.0, std::abs(z));
  for (int it = 0; it < 60; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    if (std::abs(f) <= tol) return w;
    // Halley step
    const double fp = ew * (w + 1.0);
    const double denom = fp - (w + 2.0) * f / (2.0 * w + 2.0);
    const double step = (denom != 0.0) ? f / denom : f / fp;
    w -= step;
    if (w < -1.0) w = -1.0 + 1e-16;  // stay on the principal branch
  }
  const double resid = std::abs(w * std::exp(w) - z);
  if (resid > 1e-12 * std::max(1.0, std::abs(z)))
    throw numerical_error("lambert_w: no convergence at z=" + std::to_string(z));
  return w;
}

double v_asymptotic(double x) {
  const double ax = std::abs(x);
  // Limit x -> 0: LW(c x) ~ c x with c = sqrt(pi/2)/e, so V -> pi e^2 / 2.
  if (ax < 1e-9) return kPi * std::exp(2.0) / 2.0;
  const double w = lambert_w(std::sqrt(kPi / 2.0) * ax / std::exp(1.0));
  return kPi * kPi * x * x / (4.0 * w * w);
}

void PotentialSpec::validate() const {
  if (!(v0 > 0.0)) throw std::invalid_argument("potential: v0 must be positive");
  if (fractal) {
    fractal->validate();
    if (variant == PotentialVariant::higher_order)
      throw std::invalid_argument(
          "potential: the higher_order variant does not take a fractal supplement");
  }
}

double PotentialGrid::v_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double value : v) m = std::min(m, value);
  return m;
}

double PotentialGrid::wall_height() const {
  return std::min(v.front(), v.back());
}

PotentialGrid build_grid(const PotentialSpec& spec, double half_width, double step) {
  spec.validate();
  if (!(half_width > 0.0) || !(step > 0.0))
    throw std::invalid_argument("build_grid: half_width and step must be positive");
  const double ratio = half_width / step;
  const auto half_points = static_cast<long>(std::llround(ratio));
  if (half_points < 2 || std::abs(ratio - static_cast<double>(half_points)) > 1e-9)
    throw std::invalid_argument("build_grid: L/h must be integral and >= 2");
  if (spec.variant == PotentialVariant::higher_order)
    throw std::invalid_argument(
        "build_grid: the higher_order implicit form has no numerical inverse; "
        "use the leading or asymptotic variant");

  PotentialGrid grid;
  grid.spec = spec;
  grid.half_width = half_width;
  grid.step = step;
  const long n = 2 * half_points;
  grid.x.resize(n + 1);
  grid.v.resize(n + 1);
  for (long k = 0; k <= n; ++k) grid.x[k] = static_cast<double>(k - half_points) * step;

  // Smooth part, even in x: fill the right half and mirror so symmetry is
  // exact in floating point.
  for (long k = half_points; k <= n; ++k) {
    const double ax = grid.x[k];
    const double v_smooth = (spec.variant == PotentialVariant::asymptotic)
                                ? v_asymptotic(ax)
                                : invert_potential(ax, spec.v0);
    grid.v[k] = v_smooth;
    grid.v[2 * half_points - k] = v_smooth;
  }

  if (spec.fractal && spec.fractal->sigma != 0.0) {
    const std::vector<double> supplement = sample_A(grid.x, *spec.fractal);
    for (long k = 0; k <= n; ++k) grid.v[k] += supplement[k];
  }
  return grid;
}

double default_half_width(double e_max, double v0, double margin) {
  const double target = margin * e_max;
  if (target <= v0 * (1.0 + 1e-12)) return 1.0;
  return std::ceil(x_ws(target, v0));
}

}  // namespace wsfit
