#include "wsfit/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wsfit/errors.hpp"

namespace wsfit {

void SweepConfig::validate() const {
  if (n < 1) throw std::invalid_argument("sweep: n must be >= 1");
  if (!(gamma_hi >= gamma_lo) || !(gamma_lo > 1.0 - 1e-12))
    throw std::invalid_argument("sweep: gamma range must be nonempty with lo > 1");
  if (!sigma_fixed && !(sigma_hi >= sigma_lo))
    throw std::invalid_argument("sweep: sigma range must be nonempty");
  if (samples < 1) throw std::invalid_argument("sweep: samples must be >= 1");
  if (!(grid_step > 0.0)) throw std::invalid_argument("sweep: grid step must be positive");
  if (!(fractal_d > 1.0 && fractal_d < 2.0))
    throw std::invalid_argument("sweep: fractal dimension must lie in (1,2)");
  if (m_cutoff < 0) throw std::invalid_argument("sweep: m cutoff must be >= 0");
}

double SweepConfig::resolved_half_width(const ZeroTable& zeros) const {
  if (half_width > 0.0) return half_width;
  return default_half_width(zeros.values.at(n - 1));
}

std::string to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::ok: return "ok";
    case RecordStatus::unconverged: return "unconverged";
    case RecordStatus::failed: return "failed";
  }
  return "?";
}

RecordStatus record_status_from_string(const std::string& name) {
  if (name == "ok") return RecordStatus::ok;
  if (name == "unconverged") return RecordStatus::unconverged;
  if (name == "failed") return RecordStatus::failed;
  throw input_error("unknown record status: " + name);
}

std::vector<std::pair<double, double>> draw_parameters(const SweepConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  auto uniform = [&rng](double lo, double hi) {
    // fixed 64 -> 53 bit mapping; no library distribution, so the stream is
    // reproducible across standard libraries
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  };
  std::vector<std::pair<double, double>> params;
  params.reserve(config.samples);
  for (std::size_t i = 0; i < config.samples; ++i) {
    const double gamma = uniform(config.gamma_lo, config.gamma_hi);
    const double sigma =
        config.sigma_fixed ? config.sigma_value : uniform(config.sigma_lo, config.sigma_hi);
    params.emplace_back(gamma, sigma);
  }
  return params;
}

SweepContext::SweepContext(const SweepConfig& config, const ZeroTable& zeros)
    : config_(config), zeros_(zeros.prefix(config.n)) {
  config_.validate();
  config_.solver.n = config_.n;
  if (zeros.count() < config_.n)
    throw input_error("sweep: zero table holds fewer than n values");

  PotentialSpec spec;  // leading variant, no fractal
  smooth_ = build_grid(spec, config_.resolved_half_width(zeros_), config_.grid_step);

  const SweepRecord baseline = evaluate(0, config_.gamma_lo, 0.0);
  if (baseline.status == RecordStatus::failed)
    throw numerical_error("sweep: smooth baseline solve failed");
  baseline_sse_ = baseline.sse;
}

SweepRecord SweepContext::evaluate(std::size_t index, double gamma, double sigma) const {
  SweepRecord record;
  record.index = index;
  record.gamma = gamma;
  record.sigma = sigma;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    PotentialGrid grid = smooth_;  // copy; the fractal supplement is additive
    if (sigma != 0.0) {
      FractalParams fractal;
      fractal.gamma = gamma;
      fractal.sigma = sigma;
      fractal.d = config_.fractal_d;
      fractal.m_lo = -config_.m_cutoff;
      fractal.m_hi = config_.m_cutoff;
      grid.spec.fractal = fractal;
      const std::vector<double> supplement = sample_A(grid.x, fractal);
      for (std::size_t i = 0; i < grid.v.size(); ++i) grid.v[i] += supplement[i];
    }

    SolverSettings settings = config_.solver;
    settings.n = config_.n;
    const EigenResult eigen = solve_refined(grid, settings, config_.auto_refine);

    const FitReport report = fit(eigen, zeros_);
    record.sse = report.sse;
    record.status = eigen.converged ? RecordStatus::ok : RecordStatus::unconverged;
  } catch (const std::exception&) {
    record.status = RecordStatus::failed;
    record.sse = std::numeric_limits<double>::quiet_NaN();
  }
  record.millis = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  return record;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, const ZeroTable& zeros,
                                   unsigned threads) {
  const SweepContext context(config, zeros);
  const std::vector<std::pair<double, double>> params = draw_parameters(config);

  std::vector<SweepRecord> records(params.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < params.size(); ++i)
      records[i] = context.evaluate(i, params[i].first, params[i].second);
    return records;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= params.size()) break;
      records[i] = context.evaluate(i, params[i].first, params[i].second);
    }
  };
  std::vector<std::thread> pool;
  const auto count = static_cast<unsigned>(
      std::min<std::size_t>(threads, params.size()));
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return records;
}

SweepRecord evaluate_point(double gamma, double sigma, const SweepConfig& config,
                           const ZeroTable& zeros) {
  const SweepContext context(config, zeros);
  return context.evaluate(0, gamma, sigma);
}

std::vector<SweepRecord> best_records(std::vector<SweepRecord> records, std::size_t k) {
  auto better = [](const SweepRecord& a, const SweepRecord& b) {
    const bool a_ok = std::isfinite(a.sse);
    const bool b_ok = std::isfinite(b.sse);
    if (a_ok != b_ok) return a_ok;
    if (a_ok && a.sse != b.sse) return a.sse < b.sse;
    return a.index < b.index;
  };
  std::sort(records.begin(), records.end(), better);
  if (records.size() > k) records.resize(k);
  return records;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "index,gamma,sigma,sse,status,millis\n";
  char buffer[160];
  for (const auto& r : records) {
    std::snprintf(buffer, sizeof buffer, "%zu,%.17g,%.17g,%.17g,%s,%.3f\n", r.index,
                  r.gamma, r.sigma, r.sse, to_string(r.status).c_str(), r.millis);
    out << buffer;
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::vector<SweepRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (lineno == 1 && line.rfind("index,", 0) == 0) continue;
    std::stringstream row(line);
    std::string field;
    SweepRecord r;
    try {
      std::getline(row, field, ',');
      r.index = std::stoull(field);
      std::getline(row, field, ',');
      r.gamma = std::stod(field);
      std::getline(row, field, ',');
      r.sigma = std::stod(field);
      std::getline(row, field, ',');
      r.sse = std::stod(field);
      std::getline(row, field, ',');
      r.status = record_status_from_string(field);
      std::getline(row, field, ',');
      r.millis = std::stod(field);
    } catch (const std::exception& e) {
      throw input_error("sweep csv: bad row at line " + std::to_string(lineno) + ": " +
                        e.what());
    }
    records.push_back(r);
  }
  return records;
}

}  // namespace wsfit
