#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "wsfit/eigensolver.hpp"
#include "wsfit/fitstats.hpp"
#include "wsfit/potential.hpp"
#include "wsfit/zeros.hpp"

namespace wsfit {

// One random-search campaign over (gamma, sigma). All randomness comes from
// a single mt19937_64 stream: the full parameter list is drawn in one pass
// before any evaluation, so results do not depend on the worker count.
struct SweepConfig {
  std::size_t n = 25;            // zeros to fit
  double gamma_lo = 1.0, gamma_hi = 10.0;
  double sigma_lo = 0.0, sigma_hi = 10.0;
  bool sigma_fixed = false;      // true: every sample uses sigma_value
  double sigma_value = 1.0;
  std::size_t samples = 100;
  std::uint64_t seed = 1;

  double fractal_d = 1.5;
  int m_cutoff = 30;

  double grid_step = 0.002;
  double half_width = 0.0;  // 0: derive from the target zeros (1.5x margin rule)
  SolverSettings solver;    // solver.n is overwritten with n
  bool auto_refine = true;  // halve h until every Richardson estimate <= 1e-3

  void validate() const;
  double resolved_half_width(const ZeroTable& zeros) const;
};

enum class RecordStatus { ok = 0, unconverged = 1, failed = 2 };

std::string to_string(RecordStatus s);
RecordStatus record_status_from_string(const std::string& name);

struct SweepRecord {
  std::size_t index = 0;
  double gamma = 0.0;
  double sigma = 0.0;
  double sse = std::numeric_limits<double>::quiet_NaN();
  RecordStatus status = RecordStatus::failed;
  double millis = 0.0;  // wall time; telemetry, excluded from determinism
};

// The deterministic (gamma, sigma) draw: one mt19937_64(seed), per sample
// gamma then (unless fixed) sigma, each mapped to a uniform double via
// (x >> 11) * 2^-53.
std::vector<std::pair<double, double>> draw_parameters(const SweepConfig& config);

// Campaign-scoped evaluation state: the smooth grid and baseline are built
// once and shared by all workers (read-only).
class SweepContext {
 public:
  SweepContext(const SweepConfig& config, const ZeroTable& zeros);

  const SweepConfig& config() const { return config_; }
  const ZeroTable& zeros() const { return zeros_; }
  double baseline_sse() const { return baseline_sse_; }

  // One full pipeline evaluation (grid -> solve -> fit) at exact parameters.
  SweepRecord evaluate(std::size_t index, double gamma, double sigma) const;

 private:
  SweepConfig config_;
  ZeroTable zeros_;
  PotentialGrid smooth_;
  double baseline_sse_ = 0.0;
};

// Runs the whole campaign; per-record solver failures are recorded, never
// fatal. Identical (seed, config) give identical records for any `threads`.
std::vector<SweepRecord> run_sweep(const SweepConfig& config, const ZeroTable& zeros,
                                   unsigned threads = 1);

// Single-point probe with the same pipeline and defaults as a campaign.
SweepRecord evaluate_point(double gamma, double sigma, const SweepConfig& config,
                           const ZeroTable& zeros);

// Top-k by ascending sse; failed records sort last, ties break on index.
std::vector<SweepRecord> best_records(std::vector<SweepRecord> records, std::size_t k);

// CSV round trip (columns: index,gamma,sigma,sse,status,millis).
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

}  // namespace wsfit
