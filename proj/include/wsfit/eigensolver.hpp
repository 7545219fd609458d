#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wsfit/potential.hpp"

namespace wsfit {

enum class SolveMethod { finite_difference, shooting };

std::string to_string(SolveMethod m);
SolveMethod solve_method_from_string(const std::string& name);

// Settings for one spectrum computation. Grid geometry (h, L) lives on the
// PotentialGrid; the result records what was used.
struct SolverSettings {
  std::size_t n = 25;  // number of lowest eigenvalues
  SolveMethod method = SolveMethod::finite_difference;
  bool refine = true;           // Richardson pair (h, 2h) with error estimate
  bool eigenfunctions = false;  // also return sampled eigenvectors
  double points_per_wavelength = 20.0;  // resolution check at E_max
  double scan_step = 0.3;               // shooting: energy pre-scan step

  void validate() const;
};

// Lowest-n spectrum of -psi'' + V psi = E psi with Dirichlet walls at +-L.
struct EigenResult {
  std::vector<double> eigenvalues;      // best available (refined if enabled)
  std::vector<double> raw_eigenvalues;  // plain fine-grid values
  std::vector<double> error_estimate;   // |refined - fine| per eigenvalue
  bool converged = true;                // false on resolution-check failure
  std::string message;
  double h_used = 0.0;
  double L_used = 0.0;
  std::vector<std::vector<double>> eigenfunctions;  // grid-sampled, if requested
};

// Finite-difference route: symmetric tridiagonal second-difference operator,
// lowest n eigenvalues by Sturm-sequence bisection. Shooting route: Numerov
// integration from both walls, log-derivative matching at the outer turning
// point, node-count verification. Throws numerical_error when fewer than n
// bound states fit below the walls or the matching fails to converge; a
// failed wavelength-resolution check only clears `converged`.
EigenResult solve(const PotentialGrid& grid, const SolverSettings& settings);

struct CrossValidation {
  EigenResult finite_difference;
  EigenResult shooting;
  double max_rel_discrepancy = 0.0;
  bool converged = true;  // both methods passed their internal checks
};

// Runs both methods on the same grid and reports the worst relative
// eigenvalue disagreement.
CrossValidation cross_validate(const PotentialGrid& grid, SolverSettings settings);

// Accuracy rule shared by the CLI and sweep pipelines: solve, then halve the
// step (resampling the potential from grid.spec) until every Richardson
// estimate is <= 1e-3 and the resolution check passes, at most max_rounds
// times. With accuracy_rule = false this is a plain solve.
EigenResult solve_refined(const PotentialGrid& grid, const SolverSettings& settings,
                          bool accuracy_rule, int max_rounds = 3);

}  // namespace wsfit
