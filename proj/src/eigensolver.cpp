#include "wsfit/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wsfit/errors.hpp"

namespace wsfit {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(SolveMethod m) {
  return m == SolveMethod::finite_difference ? "finite_difference" : "shooting";
}

SolveMethod solve_method_from_string(const std::string& name) {
  if (name == "finite_difference" || name == "fd") return SolveMethod::finite_difference;
  if (name == "shooting") return SolveMethod::shooting;
  throw input_error("unknown solve method: " + name);
}

void SolverSettings::validate() const {
  if (n < 1) throw std::invalid_argument("solver: n must be >= 1");
  if (!(points_per_wavelength > 0.0) || !(scan_step > 0.0))
    throw std::invalid_argument("solver: resolution and scan parameters must be positive");
}

namespace {

// ---------------------------------------------------------------------------
// Finite differences: -psi'' + V psi on the interior points of [-L, L] is the
// symmetric tridiagonal matrix diag(2/h^2 + v_i) with off-diagonal -1/h^2.
// ---------------------------------------------------------------------------

struct Tridiag {
  std::vector<double> diag;  // interior only
  double off = 0.0;

  Tridiag(const std::vector<double>& v, double h) {
    const double inv_h2 = 1.0 / (h * h);
    off = -inv_h2;
    diag.resize(v.size() - 2);
    for (std::size_t i = 1; i + 1 < v.size(); ++i) diag[i - 1] = 2.0 * inv_h2 + v[i];
  }

  // Number of eigenvalues strictly below lambda (Sturm sequence / LDL^T).
  std::size_t count_below(double lambda) const {
    const double off2 = off * off;
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    std::size_t count = 0;
    double q = diag[0] - lambda;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
      if (q == 0.0) q = tiny;
      q = (diag[i] - lambda) - off2 / q;
      if (q < 0.0) ++count;
    }
    return count;
  }

  double gersh_max() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double d : diag) m = std::max(m, d);
    return m + 2.0 * std::abs(off);
  }
};

std::vector<double> sturm_lowest(const Tridiag& T, std::size_t n, double lower_bound) {
  std::vector<double> eigs(n);
  double lo_base = lower_bound - 1.0;
  const double hi_base = T.gersh_max() + 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double lo = lo_base;
    double hi = hi_base;
    // invariant: count(lo) < k <= count(hi)
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (T.count_below(mid) >= k)
        hi = mid;
      else
        lo = mid;
      if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi)) ||
          hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi))
        break;
    }
    eigs[k - 1] = 0.5 * (lo + hi);
    lo_base = lo;  // eigenvalues are ordered; warm-start the next bisection
  }
  return eigs;
}

// Inverse iteration for the eigenvector of the interior tridiagonal problem.
std::vector<double> inverse_iteration(const Tridiag& T, double lambda, double h) {
  const std::size_t m = T.diag.size();
  const double shift = lambda * (1.0 + 1e-12) + 1e-12;
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i)
    x[i] = std::sin(kPi * static_cast<double>(i + 1) / static_cast<double>(m + 1));

  std::vector<double> c(m), dvec(m);
  for (int sweep = 0; sweep < 3; ++sweep) {
    // Thomas solve (T - shift) y = x
    double d0 = T.diag[0] - shift;
    if (std::abs(d0) < 1e-300) d0 = 1e-300;
    c[0] = T.off / d0;
    dvec[0] = x[0] / d0;
    for (std::size_t i = 1; i < m; ++i) {
      double denom = (T.diag[i] - shift) - T.off * c[i - 1];
      if (std::abs(denom) < 1e-300) denom = 1e-300;
      c[i] = T.off / denom;
      dvec[i] = (x[i] - T.off * dvec[i - 1]) / denom;
    }
    x[m - 1] = dvec[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) x[i] = dvec[i] - c[i] * x[i + 1];
    double norm = 0.0;
    for (double xi : x) norm += xi * xi;
    norm = std::sqrt(norm * h);
    for (double& xi : x) xi /= norm;
  }
  // fix overall sign: first prominent lobe positive
  for (double xi : x) {
    if (std::abs(xi) > 1e-3) {
      if (xi < 0.0)
        for (double& xj : x) xj = -xj;
      break;
    }
  }
  std::vector<double> full(m + 2, 0.0);
  std::copy(x.begin(), x.end(), full.begin() + 1);
  return full;
}

// ---------------------------------------------------------------------------
// Shooting: Numerov integration from both walls, matched at the outer
// classical turning point. The defect is the Wronskian of the two pieces; it
// vanishes exactly at eigenvalues.
// ---------------------------------------------------------------------------

struct ShootEval {
  double defect = 0.0;
  std::size_t nodes = 0;
};

class NumerovShooter {
 public:
  NumerovShooter(const std::vector<double>& v, double h) : v_(v), h_(h), h2_12_(h * h / 12.0) {
    left_.resize(v.size());
    right_.resize(v.size());
  }

  std::size_t last_index() const { return v_.size() - 1; }

  // Outer (rightmost) classical turning point as a grid index, clamped away
  // from the walls so the matching stencil fits.
  std::size_t match_index(double energy) const {
    const std::size_t n = last_index();
    std::size_t m = n / 2;
    for (std::size_t i = n; i-- > 0;) {
      if (v_[i] <= energy) {
        m = i;
        break;
      }
    }
    m = std::max<std::size_t>(4, std::min(m, n - 4));
    return m;
  }

  ShootEval eval(double energy, std::size_t m) {
    integrate_left(energy, m + 2);
    integrate_right(energy, m - 2);

    // Scale both pieces to O(1) around the junction.
    double s_left = 0.0, s_right = 0.0;
    for (std::size_t i = m - 2; i <= m + 2; ++i) {
      s_left = std::max(s_left, std::abs(left_[i]));
      s_right = std::max(s_right, std::abs(right_[i]));
    }
    if (s_left == 0.0 || s_right == 0.0)
      throw numerical_error("shooting: vanishing solution at match point");
    double l[5], r[5];
    for (int j = 0; j < 5; ++j) {
      l[j] = left_[m - 2 + j] / s_left;
      r[j] = right_[m - 2 + j] / s_right;
    }
    // five-point derivatives (the common 1/(12h) factor drops out of the sign
    // structure of the Wronskian)
    const double dl = -l[4] + 8.0 * l[3] - 8.0 * l[1] + l[0];
    const double dr = -r[4] + 8.0 * r[3] - 8.0 * r[1] + r[0];

    ShootEval out;
    out.defect = dl * r[2] - dr * l[2];
    out.nodes = count_nodes(m);
    return out;
  }

  // Matched, normalized eigenfunction at (approximately) an eigenvalue.
  std::vector<double> assemble(double energy) {
    const std::size_t m = match_index(energy);
    integrate_left(energy, m + 2);
    integrate_right(energy, m - 2);
    std::vector<double> psi(v_.size(), 0.0);
    const double scale =
        (std::abs(right_[m]) > 1e-300) ? left_[m] / right_[m] : 1.0;
    for (std::size_t i = 0; i <= m; ++i) psi[i] = left_[i];
    for (std::size_t i = m + 1; i < v_.size(); ++i) psi[i] = scale * right_[i];
    double norm = 0.0;
    for (double p : psi) norm += p * p;
    norm = std::sqrt(norm * h_);
    if (norm > 0.0)
      for (double& p : psi) p /= norm;
    for (double p : psi) {
      if (std::abs(p) > 1e-3) {
        if (p < 0.0)
          for (double& q : psi) q = -q;
        break;
      }
    }
    return psi;
  }

 private:
  double f_coeff(double energy, std::size_t i) const { return 1.0 + h2_12_ * (energy - v_[i]); }

  void integrate_left(double energy, std::size_t stop) {
    left_[0] = 0.0;
    left_[1] = 1e-6;
    for (std::size_t i = 1; i < stop; ++i) {
      const double fn = f_coeff(energy, i + 1);
      const double fc = f_coeff(energy, i);
      const double fp = f_coeff(energy, i - 1);
      left_[i + 1] = ((12.0 - 10.0 * fc) * left_[i] - fp * left_[i - 1]) / fn;
      if (std::abs(left_[i + 1]) > 1e140) {
        const double s = 1.0 / std::abs(left_[i + 1]);
        for (std::size_t j = (i >= 1 ? i - 1 : 0); j <= i + 1; ++j) left_[j] *= s;
      }
    }
  }

  void integrate_right(double energy, std::size_t stop) {
    const std::size_t n = last_index();
    right_[n] = 0.0;
    right_[n - 1] = 1e-6;
    for (std::size_t i = n - 1; i > stop; --i) {
      const double fn = f_coeff(energy, i - 1);
      const double fc = f_coeff(energy, i);
      const double fp = f_coeff(energy, i + 1);
      right_[i - 1] = ((12.0 - 10.0 * fc) * right_[i] - fp * right_[i + 1]) / fn;
      if (std::abs(right_[i - 1]) > 1e140) {
        const double s = 1.0 / std::abs(right_[i - 1]);
        for (std::size_t j = i - 1; j <= std::min(n, i + 1); ++j) right_[j] *= s;
      }
    }
  }

  // Sign changes of the two pieces on their own subintervals; the Numerov
  // rescaling preserves signs, and sign products within a piece are scale
  // invariant.
  std::size_t count_nodes(std::size_t m) const {
    std::size_t nodes = 0;
    for (std::size_t i = 1; i + 1 <= m; ++i)
      if (left_[i] * left_[i + 1] < 0.0) ++nodes;
    const std::size_t n = last_index();
    for (std::size_t i = m; i + 1 <= n - 1; ++i)
      if (right_[i] * right_[i + 1] < 0.0) ++nodes;
    return nodes;
  }

  const std::vector<double>& v_;
  double h_;
  double h2_12_;
  std::vector<double> left_, right_;
};

std::vector<double> shooting_lowest(const std::vector<double>& v, double h, std::size_t n,
                                    double scan_step, double e_ceiling) {
  NumerovShooter shooter(v, h);
  double v_min = *std::min_element(v.begin(), v.end());
  const double e_floor = v_min + 1e-9 * std::max(1.0, std::abs(v_min));

  std::vector<double> roots;

  // Refine one bracket with the match index frozen: the defect is then a
  // continuous function of E and plain bisection applies.
  auto refine = [&](double a, double b) -> bool {
    const std::size_t m = shooter.match_index(0.5 * (a + b));
    double fa = shooter.eval(a, m).defect;
    double fb = shooter.eval(b, m).defect;
    if (fa == 0.0) {
      roots.push_back(a);
      return true;
    }
    if (fb == 0.0) {
      roots.push_back(b);
      return true;
    }
    if (fa * fb > 0.0) return false;  // sign change was a match-index artifact
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = shooter.eval(mid, m).defect;
      if (fm == 0.0 || b - a <= 1e-13 * std::max(1.0, std::abs(b))) {
        a = b = mid;
        break;
      }
      if (fa * fm < 0.0) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
    }
    roots.push_back(0.5 * (a + b));
    return true;
  };

  auto scan_range = [&](double from, double to, double step) {
    double e_prev = from;
    ShootEval prev = shooter.eval(e_prev, shooter.match_index(e_prev));
    while (e_prev < to && roots.size() < n + 2) {
      const double e_next = std::min(to, e_prev + step);
      const ShootEval cur = shooter.eval(e_next, shooter.match_index(e_next));
      if (prev.defect == 0.0) roots.push_back(e_prev);
      else if (prev.defect * cur.defect < 0.0) refine(e_prev, e_next);
      e_prev = e_next;
      prev = cur;
      if (e_next >= to) break;
    }
  };

  scan_range(e_floor, e_ceiling, scan_step);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(b)); }),
              roots.end());

  // Verify by node count that no level was skipped; rescan gaps finer where
  // the count disagrees.
  for (int attempt = 0; attempt < 3; ++attempt) {
    bool consistent = true;
    double gap_lo = 0.0, gap_hi = 0.0;
    const std::size_t have = std::min(roots.size(), n);
    for (std::size_t k = 0; k <= have && consistent; ++k) {
      const double below = (k == 0) ? e_floor : roots[k - 1];
      const double above = (k == roots.size()) ? e_ceiling : roots[k];
      if (above <= below) continue;
      const double probe = 0.5 * (below + above);
      const std::size_t nodes = shooter.eval(probe, shooter.match_index(probe)).nodes;
      if (nodes > k) {  // at least one root missed in (below, probe)
        consistent = false;
        gap_lo = below;
        gap_hi = above;
      }
    }
    if (consistent) break;
    const double fine = std::max((gap_hi - gap_lo) / 64.0, 1e-9);
    scan_range(gap_lo + fine * 0.5, gap_hi, fine);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(b)); }),
                roots.end());
  }

  if (roots.size() < n)
    throw numerical_error("shooting: found " + std::to_string(roots.size()) +
                          " states below the wall, " + std::to_string(n) + " requested");
  roots.resize(n);
  return roots;
}

std::vector<double> coarsen(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size() / 2 + 1);
  for (std::size_t i = 0; i < v.size(); i += 2) out.push_back(v[i]);
  return out;
}

std::vector<double> fd_lowest(const std::vector<double>& v, double h, std::size_t n,
                              double wall, double v_min) {
  Tridiag T(v, h);
  // Barrier rule: when the walls rise above the well bottom, demand that the
  // requested states all sit below the truncation barrier. A flat grid (pure
  // particle-in-a-box) has no barrier to respect.
  if (wall > v_min + 1e-12 * std::max(1.0, std::abs(wall))) {
    if (T.count_below(wall) < n)
      throw numerical_error("finite_difference: only " + std::to_string(T.count_below(wall)) +
                            " bound states below the wall, " + std::to_string(n) + " requested");
  } else if (v.size() - 2 < n) {
    throw numerical_error("finite_difference: grid too small for requested n");
  }
  return sturm_lowest(T, n, v_min);
}

}  // namespace

EigenResult solve(const PotentialGrid& grid, const SolverSettings& settings) {
  settings.validate();
  if (grid.points() < 16) throw std::invalid_argument("solve: grid too small");
  const std::size_t n = settings.n;
  const double h = grid.step;
  const double wall = grid.wall_height();
  const double v_min = grid.v_min();

  EigenResult result;
  result.h_used = h;
  result.L_used = grid.half_width;

  const bool barrier = wall > v_min + 1e-12 * std::max(1.0, std::abs(wall));
  const double ceiling = barrier ? wall : std::numeric_limits<double>::infinity();

  if (settings.method == SolveMethod::finite_difference) {
    result.raw_eigenvalues = fd_lowest(grid.v, h, n, wall, v_min);
  } else {
    if (!barrier)
      throw numerical_error("shooting: needs a confining potential (flat grid given)");
    result.raw_eigenvalues = shooting_lowest(grid.v, h, n, settings.scan_step, ceiling);
  }

  result.eigenvalues = result.raw_eigenvalues;
  result.error_estimate.assign(n, 0.0);

  if (settings.refine) {
    const std::vector<double> v_coarse = coarsen(grid.v);
    std::vector<double> coarse;
    if (settings.method == SolveMethod::finite_difference) {
      coarse = fd_lowest(v_coarse, 2.0 * h, n, wall, v_min);
    } else {
      coarse = shooting_lowest(v_coarse, 2.0 * h, n, settings.scan_step, ceiling);
    }
    // Richardson: the second-difference operator is O(h^2) accurate, Numerov
    // O(h^4); combine fine (h) and coarse (2h) accordingly.
    const double order = (settings.method == SolveMethod::finite_difference) ? 2.0 : 4.0;
    const double weight = std::pow(2.0, order);
    for (std::size_t k = 0; k < n; ++k) {
      const double refined =
          (weight * result.raw_eigenvalues[k] - coarse[k]) / (weight - 1.0);
      result.error_estimate[k] = std::abs(refined - result.raw_eigenvalues[k]);
      result.eigenvalues[k] = refined;
    }
  }

  // non-degeneracy sanity
  for (std::size_t k = 1; k < n; ++k)
    if (!(result.eigenvalues[k] > result.eigenvalues[k - 1]))
      throw numerical_error("solve: eigenvalues not strictly increasing at k=" +
                            std::to_string(k));

  // Wavelength-resolution check at the top of the spectrum (checked, not
  // assumed): >= points_per_wavelength grid points per de Broglie wavelength.
  const double e_top = result.raw_eigenvalues.back();
  const double p_max = std::sqrt(std::max(e_top - v_min, 0.0));
  if (p_max > 0.0) {
    const double wavelength = 2.0 * kPi / p_max;
    if (h > wavelength / settings.points_per_wavelength) {
      result.converged = false;
      result.message = "resolution check failed: h=" + std::to_string(h) +
                       " exceeds wavelength/" +
                       std::to_string(settings.points_per_wavelength);
    }
  }
  if (barrier && result.eigenvalues.back() >= wall) {
    result.converged = false;
    result.message += std::string(result.message.empty() ? "" : "; ") +
                      "top eigenvalue reaches the truncation barrier";
  }

  if (settings.eigenfunctions) {
    result.eigenfunctions.reserve(n);
    if (settings.method == SolveMethod::finite_difference) {
      Tridiag T(grid.v, h);
      for (std::size_t k = 0; k < n; ++k)
        result.eigenfunctions.push_back(inverse_iteration(T, result.raw_eigenvalues[k], h));
    } else {
      NumerovShooter shooter(grid.v, h);
      for (std::size_t k = 0; k < n; ++k)
        result.eigenfunctions.push_back(shooter.assemble(result.raw_eigenvalues[k]));
    }
  }
  return result;
}

EigenResult solve_refined(const PotentialGrid& grid, const SolverSettings& settings,
                          bool accuracy_rule, int max_rounds) {
  EigenResult result = solve(grid, settings);
  if (!accuracy_rule || !settings.refine) return result;
  double h = grid.step;
  for (int round = 0; round < max_rounds; ++round) {
    double worst = 0.0;
    for (double est : result.error_estimate) worst = std::max(worst, est);
    if (worst <= 1e-3 && result.converged) break;
    h *= 0.5;
    const PotentialGrid finer = build_grid(grid.spec, grid.half_width, h);
    result = solve(finer, settings);
  }
  return result;
}

CrossValidation cross_validate(const PotentialGrid& grid, SolverSettings settings) {
  CrossValidation report;
  settings.method = SolveMethod::finite_difference;
  report.finite_difference = solve(grid, settings);
  settings.method = SolveMethod::shooting;
  report.shooting = solve(grid, settings);
  double worst = 0.0;
  for (std::size_t k = 0; k < settings.n; ++k) {
    const double a = report.finite_difference.eigenvalues[k];
    const double b = report.shooting.eigenvalues[k];
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
  }
  report.max_rel_discrepancy = worst;
  report.converged = report.finite_difference.converged && report.shooting.converged;
  return report;
}

}  // namespace wsfit
