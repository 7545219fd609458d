#include "wsfit/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsfit/eigensolver.hpp"
#include "wsfit/errors.hpp"
#include "wsfit/fitstats.hpp"
#include "wsfit/fractal.hpp"
#include "wsfit/potential.hpp"
#include "wsfit/rvm.hpp"
#include "wsfit/sweep.hpp"
#include "wsfit/version.hpp"
#include "wsfit/zeros.hpp"

namespace wsfit::cli {
namespace {

using nlohmann::json;

std::string default_zeros_path() {
  if (const char* env = std::getenv("WSFIT_ZEROS"); env && *env) return env;
#ifdef WSFIT_DEFAULT_ZEROS
  return WSFIT_DEFAULT_ZEROS;
#else
  return "data/riemann_zeros_100.txt";
#endif
}

std::string fnv1a64_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "unreadable";
  std::uint64_t hash = 1469598103934665603ULL;
  char buffer[4096];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char out[20];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(hash));
  return out;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string fmt(double value, const char* spec = "%.17g") {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, spec, value);
  return buffer;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot open output file: " + path);
  return out;
}

// One manifest per run, written next to the first emitted artifact.
class Manifest {
 public:
  Manifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  void add_input(const std::string& path) {
    inputs_.push_back({{"path", path}, {"fnv1a64", fnv1a64_hex(path)}});
  }
  void add_output(const std::string& path) { outputs_.push_back(path); }
  void set_config(json config) { config_ = std::move(config); }
  void set_results(json results) { results_ = std::move(results); }

  void write() const {
    if (outputs_.empty()) return;
    json m;
    m["tool"] = "wsfit";
    m["version"] = kVersion;
    m["subcommand"] = subcommand_;
    m["timestamp_utc"] = timestamp_utc();
    m["config"] = config_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    if (!results_.is_null()) m["results"] = results_;
    const std::string path = outputs_.front() + ".manifest.json";
    std::ofstream out = open_output(path);
    out << m.dump(2) << "\n";
  }

 private:
  std::string subcommand_;
  json config_ = json::object();
  json inputs_ = json::array();
  std::vector<std::string> outputs_;
  json results_;
};

// Optional JSON config file: {"global": {...}, "<subcommand>": {...}}.
// Precedence is flags > config file > built-in defaults, realized by using
// the config values as the defaults CLI11 starts from.
class FileConfig {
 public:
  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file: " + path);
    try {
      in >> data_;
    } catch (const json::exception& e) {
      throw input_error("config file " + path + ": " + e.what());
    }
  }

  template <typename T>
  T get(const std::string& section, const std::string& key, T fallback) const {
    if (!data_.is_object()) return fallback;
    for (const std::string& s : {section, std::string("global")}) {
      const auto sec = data_.find(s);
      if (sec != data_.end() && sec->is_object()) {
        const auto it = sec->find(key);
        if (it != sec->end()) {
          try {
            return it->get<T>();
          } catch (const json::exception& e) {
            throw input_error("config key " + s + "." + key + ": " + e.what());
          }
        }
      }
    }
    return fallback;
  }

 private:
  json data_;
};

struct RangeSpec {
  double lo = 0.0, hi = 0.0;
  bool fixed = false;
  double fixed_value = 0.0;
};

RangeSpec parse_range(const std::string& text) {
  RangeSpec range;
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw input_error("range must be lo:hi or fixed:value, got '" + text + "'");
  const std::string head = text.substr(0, colon);
  const std::string tail = text.substr(colon + 1);
  try {
    if (head == "fixed") {
      range.fixed = true;
      range.fixed_value = std::stod(tail);
    } else {
      range.lo = std::stod(head);
      range.hi = std::stod(tail);
    }
  } catch (const std::exception&) {
    throw input_error("bad range '" + text + "'");
  }
  return range;
}

ZeroTable load_table(const std::string& path, std::size_t n, Manifest& manifest) {
  ZeroTable table = load_zeros(path, n);
  manifest.add_input(path);
  return table;
}

// ---------------------------------------------------------------------------
// zeros
// ---------------------------------------------------------------------------

struct ZerosOptions {
  std::string file;
  std::size_t n = 100;
  std::string emit;
};

int run_zeros(const ZerosOptions& opt) {
  Manifest manifest("zeros");
  const ZeroTable table = load_table(opt.file, opt.n, manifest);

  std::cout << "zeros: " << table.count() << " values from " << table.source << "\n";
  if (table.count() > 0)
    std::cout << "  first " << fmt(table.values.front(), "%.9f") << ", last "
              << fmt(table.values.back(), "%.9f") << "\n";
  json checks = json::object();
  for (std::size_t n : {std::size_t{25}, std::size_t{50}, std::size_t{75}}) {
    if (table.count() < n) continue;
    const double total = sum_of_squares(table.prefix(n));
    std::cout << "  sum of squares, first " << n << ": " << fmt(total, "%.4f") << "\n";
    checks["sum_sq_" + std::to_string(n)] = total;
  }
  std::cout << "  sum of squares, all " << table.count() << ": "
            << fmt(sum_of_squares(table), "%.4f") << "\n";

  if (!opt.emit.empty()) {
    std::ofstream out = open_output(opt.emit);
    out << "index,t\n";
    for (std::size_t k = 0; k < table.count(); ++k)
      out << (k + 1) << "," << fmt(table[k]) << "\n";
    manifest.add_output(opt.emit);
    manifest.set_config({{"file", opt.file}, {"n", opt.n}});
    manifest.set_results(checks);
    manifest.write();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// potential
// ---------------------------------------------------------------------------

struct PotentialOptions {
  double v0 = kDefaultV0;
  double v_max_factor = 100.0;
  std::size_t table_points = 200;
  std::string emit_table;

  std::string variant = "leading";
  double half_width = 10.0;
  double grid_step = 0.002;
  double gamma = 3.0;
  double sigma = 0.0;
  double fractal_d = 1.5;
  int m_cutoff = 30;
  std::string emit_grid;
};

int run_potential(const PotentialOptions& opt) {
  Manifest manifest("potential");
  json config = {{"v0", opt.v0},
                 {"v_max_factor", opt.v_max_factor},
                 {"table_points", opt.table_points},
                 {"variant", opt.variant},
                 {"half_width", opt.half_width},
                 {"grid_step", opt.grid_step},
                 {"gamma", opt.gamma},
                 {"sigma", opt.sigma},
                 {"fractal_d", opt.fractal_d},
                 {"m_cutoff", opt.m_cutoff}};
  manifest.set_config(config);

  if (opt.emit_table.empty() && opt.emit_grid.empty())
    throw input_error("potential: nothing to do; pass --emit-table and/or --emit-grid");

  if (!opt.emit_table.empty()) {
    std::ofstream out = open_output(opt.emit_table);
    out << "V,x_ws,x_ws_higher,difference,ratio,imag_residual\n";
    double worst_residual = 0.0;
    for (std::size_t i = 0; i < opt.table_points; ++i) {
      // log spacing from just above v0 up to v_max_factor * v0
      const double t = static_cast<double>(i) / static_cast<double>(opt.table_points - 1);
      const double V = opt.v0 * std::exp(t * std::log(opt.v_max_factor));
      double residual = 0.0;
      const double x_lead = x_ws(V, opt.v0);
      const double x_high = x_ws_higher(V, opt.v0, &residual);
      worst_residual = std::max(worst_residual, residual);
      const double ratio = (x_high != 0.0) ? x_lead / x_high : 0.0;
      out << fmt(V) << "," << fmt(x_lead) << "," << fmt(x_high) << ","
          << fmt(x_lead - x_high) << "," << fmt(ratio) << "," << fmt(residual, "%.3e")
          << "\n";
    }
    std::cout << "potential table: " << opt.table_points << " rows, V in [v0, "
              << fmt(opt.v_max_factor * opt.v0, "%.4g")
              << "], worst imaginary residual " << fmt(worst_residual, "%.3e") << "\n";
    manifest.add_output(opt.emit_table);
  }

  if (!opt.emit_grid.empty()) {
    PotentialSpec spec;
    spec.variant = potential_variant_from_string(opt.variant);
    spec.v0 = opt.v0;
    if (opt.sigma != 0.0) {
      FractalParams fractal;
      fractal.gamma = opt.gamma;
      fractal.sigma = opt.sigma;
      fractal.d = opt.fractal_d;
      fractal.m_lo = -opt.m_cutoff;
      fractal.m_hi = opt.m_cutoff;
      spec.fractal = fractal;
    }
    const PotentialGrid grid = build_grid(spec, opt.half_width, opt.grid_step);
    std::ofstream out = open_output(opt.emit_grid);
    out << "x,v\n";
    for (std::size_t i = 0; i < grid.points(); ++i)
      out << fmt(grid.x[i]) << "," << fmt(grid.v[i]) << "\n";
    std::cout << "potential grid: " << grid.points() << " points on [-"
              << fmt(opt.half_width, "%g") << ", " << fmt(opt.half_width, "%g") << "]\n";
    manifest.add_output(opt.emit_grid);
  }

  manifest.write();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveOptions {
  std::string zeros_file;
  std::size_t n = 25;
  double grid_step = 0.002;
  double half_width = 0.0;  // 0 = auto
  std::string method = "finite_difference";
  bool refine = true;
  bool auto_refine = true;
  double gamma = 3.0;
  double sigma = 0.0;
  double fractal_d = 1.5;
  int m_cutoff = 30;
  std::string emit;
  std::string emit_wavefunctions;
};

int run_solve(const SolveOptions& opt) {
  Manifest manifest("solve");
  const ZeroTable table = load_table(opt.zeros_file, opt.n, manifest);

  PotentialSpec spec;
  if (opt.sigma != 0.0) {
    FractalParams fractal;
    fractal.gamma = opt.gamma;
    fractal.sigma = opt.sigma;
    fractal.d = opt.fractal_d;
    fractal.m_lo = -opt.m_cutoff;
    fractal.m_hi = opt.m_cutoff;
    spec.fractal = fractal;
  }
  const double L =
      opt.half_width > 0.0 ? opt.half_width : default_half_width(table.values.back());

  SolverSettings settings;
  settings.n = opt.n;
  settings.method = solve_method_from_string(opt.method);
  settings.refine = opt.refine;
  settings.eigenfunctions = !opt.emit_wavefunctions.empty();

  const PotentialGrid grid = build_grid(spec, L, opt.grid_step);
  const EigenResult eigen = solve_refined(grid, settings, opt.auto_refine);
  const FitReport report = fit(eigen, table);

  std::cout << "solve: n=" << opt.n << " method=" << opt.method << " L=" << fmt(L, "%g")
            << " h=" << fmt(eigen.h_used, "%g") << (opt.sigma != 0.0 ? " fractal" : " smooth")
            << "\n";
  std::cout << "  sse = " << fmt(report.sse, "%.6f") << "  (fraction "
            << fmt(report.sse_fraction, "%.4g") << " of the target sum of squares)\n";
  std::cout << "  solver sse uncertainty <= " << fmt(report.solver_sse_uncertainty, "%.2e")
            << ", converged = " << (eigen.converged ? "yes" : "no") << "\n";
  if (!eigen.message.empty()) std::cout << "  note: " << eigen.message << "\n";

  json config = {{"n", opt.n},
                 {"method", opt.method},
                 {"half_width", L},
                 {"grid_step", eigen.h_used},
                 {"refine", opt.refine},
                 {"gamma", opt.gamma},
                 {"sigma", opt.sigma},
                 {"fractal_d", opt.fractal_d},
                 {"m_cutoff", opt.m_cutoff},
                 {"zeros", opt.zeros_file}};
  manifest.set_config(config);
  manifest.set_results({{"sse", report.sse},
                        {"sse_fraction", report.sse_fraction},
                        {"solver_sse_uncertainty", report.solver_sse_uncertainty},
                        {"converged", eigen.converged}});

  if (!opt.emit.empty()) {
    std::ofstream out = open_output(opt.emit);
    out << "index,eigenvalue,zero,deviation,abs_deviation\n";
    for (std::size_t k = 0; k < opt.n; ++k) {
      const double dev = report.deviations[k];
      out << (k + 1) << "," << fmt(eigen.eigenvalues[k]) << "," << fmt(table[k]) << ","
          << fmt(dev) << "," << fmt(std::abs(dev)) << "\n";
    }
    manifest.add_output(opt.emit);
  }

  if (!opt.emit_wavefunctions.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.emit_wavefunctions);
    // eigenfunctions were computed on the final grid; recover its x axis
    const PotentialGrid final_grid =
        (eigen.h_used == grid.step) ? grid : build_grid(spec, L, eigen.h_used);
    for (std::size_t k = 0; k < eigen.eigenfunctions.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "state_%03zu.csv", k + 1);
      const std::string path = (fs::path(opt.emit_wavefunctions) / name).string();
      std::ofstream out = open_output(path);
      out << "x,psi\n";
      const auto& psi = eigen.eigenfunctions[k];
      for (std::size_t i = 0; i < psi.size(); ++i)
        out << fmt(final_grid.x[i]) << "," << fmt(psi[i]) << "\n";
      manifest.add_output(path);
    }
  }

  manifest.write();
  return eigen.converged ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
  std::string zeros_file;
  SweepConfig config;
  std::string gamma_range = "1:10";
  std::string sigma_range = "0:10";
  unsigned threads = 1;
  std::string out = "sweep.csv";
};

int run_sweep_cmd(SweepOptions& opt) {
  const RangeSpec gamma = parse_range(opt.gamma_range);
  if (gamma.fixed) throw input_error("sweep: gamma range cannot be fixed");
  opt.config.gamma_lo = gamma.lo;
  opt.config.gamma_hi = gamma.hi;
  const RangeSpec sigma = parse_range(opt.sigma_range);
  opt.config.sigma_fixed = sigma.fixed;
  if (sigma.fixed) {
    opt.config.sigma_value = sigma.fixed_value;
  } else {
    opt.config.sigma_lo = sigma.lo;
    opt.config.sigma_hi = sigma.hi;
  }
  opt.config.validate();

  Manifest manifest("sweep");
  const ZeroTable table = load_table(opt.zeros_file, opt.config.n, manifest);

  const SweepContext context(opt.config, table);
  const std::vector<SweepRecord> records = run_sweep(opt.config, table, opt.threads);

  std::size_t improving = 0, failed = 0;
  for (const auto& r : records) {
    if (r.status == RecordStatus::failed) ++failed;
    else if (r.sse < context.baseline_sse()) ++improving;
  }
  const std::vector<SweepRecord> best = best_records(records, 1);

  std::cout << "sweep: n=" << opt.config.n << " samples=" << records.size() << " seed="
            << opt.config.seed << " threads=" << opt.threads << "\n";
  std::cout << "  smooth baseline sse = " << fmt(context.baseline_sse(), "%.6f") << "\n";
  std::cout << "  improving records: " << improving << " ("
            << fmt(100.0 * static_cast<double>(improving) /
                       static_cast<double>(records.size()),
                   "%.2f")
            << "%), failed: " << failed << "\n";
  if (!best.empty() && std::isfinite(best.front().sse))
    std::cout << "  best: sse = " << fmt(best.front().sse, "%.6f") << " at gamma = "
              << fmt(best.front().gamma, "%.6f") << ", sigma = "
              << fmt(best.front().sigma, "%.6f") << "\n";

  std::ofstream out = open_output(opt.out);
  write_sweep_csv(out, records);
  manifest.add_output(opt.out);

  json config = {{"n", opt.config.n},
                 {"samples", opt.config.samples},
                 {"seed", opt.config.seed},
                 {"gamma_lo", opt.config.gamma_lo},
                 {"gamma_hi", opt.config.gamma_hi},
                 {"sigma_fixed", opt.config.sigma_fixed},
                 {"sigma_lo", opt.config.sigma_lo},
                 {"sigma_hi", opt.config.sigma_hi},
                 {"sigma_value", opt.config.sigma_value},
                 {"fractal_d", opt.config.fractal_d},
                 {"m_cutoff", opt.config.m_cutoff},
                 {"grid_step", opt.config.grid_step},
                 {"half_width", opt.config.resolved_half_width(table)},
                 {"threads", opt.threads},
                 {"rng", "mt19937_64, gamma then sigma per sample, (x>>11)*2^-53"},
                 {"zeros", opt.zeros_file}};
  manifest.set_config(config);
  manifest.set_results({{"baseline_sse", context.baseline_sse()},
                        {"improving", improving},
                        {"failed", failed}});
  manifest.write();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportOptions {
  std::string in;
  double baseline = std::numeric_limits<double>::quiet_NaN();  // NaN = auto
  std::string gamma_hist;
  std::string sigma_hist;
  double hist_lo = 1.0;
  double hist_hi = 9.5;
  double bin_width = 0.5;
  double sigma_hist_lo = 0.0;
  double sigma_hist_hi = 10.0;
  std::string minima;
  std::string improvement;
  std::string deviations;  // solve CSV for the rankit plot
  std::string rankit;
};

std::vector<double> read_deviation_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open deviations file: " + path);
  std::vector<double> devs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("index,", 0) == 0) continue;
    std::stringstream row(line);
    std::string field;
    for (int i = 0; i < 4 && std::getline(row, field, ','); ++i) {
    }
    try {
      devs.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw input_error(path + ": bad deviation at line " + std::to_string(lineno));
    }
  }
  return devs;
}

int run_report(const ReportOptions& opt) {
  Manifest manifest("report");
  json results = json::object();

  std::vector<SweepRecord> records;
  if (!opt.in.empty()) {
    std::ifstream in(opt.in);
    if (!in) throw input_error("cannot open sweep csv: " + opt.in);
    records = read_sweep_csv(in);
    manifest.add_input(opt.in);
  }
  if (opt.in.empty() && opt.deviations.empty())
    throw input_error("report: pass --in sweep.csv and/or --deviations dev.csv");

  double baseline = opt.baseline;
  if (!records.empty() && std::isnan(baseline)) {
    for (const auto& r : records)
      if (r.sigma == 0.0 && std::isfinite(r.sse))
        baseline = std::isnan(baseline) ? r.sse : std::min(baseline, r.sse);
  }

  std::vector<SweepRecord> usable;
  for (const auto& r : records)
    if (r.status != RecordStatus::failed && std::isfinite(r.sse)) usable.push_back(r);

  if (!records.empty()) {
    std::cout << "report: " << records.size() << " records, " << usable.size()
              << " usable\n";
    if (!std::isnan(baseline))
      std::cout << "  baseline sse = " << fmt(baseline, "%.6f") << "\n";
  }

  const bool need_baseline =
      !opt.gamma_hist.empty() || !opt.sigma_hist.empty() || !opt.improvement.empty();
  if (need_baseline && std::isnan(baseline))
    throw input_error(
        "report: no baseline available; pass --baseline or include sigma=0 records");

  if (!opt.gamma_hist.empty() || !opt.sigma_hist.empty()) {
    std::vector<double> improving_gamma, improving_sigma;
    for (const auto& r : usable)
      if (r.sse < baseline) {
        improving_gamma.push_back(r.gamma);
        improving_sigma.push_back(r.sigma);
      }
    results["improving"] = improving_gamma.size();
    std::cout << "  improving records: " << improving_gamma.size() << "\n";

    auto emit_hist = [&](const std::string& path, const std::vector<double>& values,
                         double lo, double hi) {
      const Histogram h = histogram(values, lo, hi, opt.bin_width);
      std::ofstream out = open_output(path);
      out << "bin_lo,bin_hi,count\n";
      for (std::size_t b = 0; b < h.counts.size(); ++b)
        out << fmt(h.lo + static_cast<double>(b) * h.width) << ","
            << fmt(h.lo + static_cast<double>(b + 1) * h.width) << "," << h.counts[b]
            << "\n";
      manifest.add_output(path);
      return h;
    };
    if (!opt.gamma_hist.empty()) {
      const Histogram h = emit_hist(opt.gamma_hist, improving_gamma, opt.hist_lo, opt.hist_hi);
      std::size_t peak = 0;
      for (std::size_t b = 1; b < h.counts.size(); ++b)
        if (h.counts[b] > h.counts[peak]) peak = b;
      if (h.total_in_bins() > 0)
        results["gamma_hist_peak_bin_lo"] = h.lo + static_cast<double>(peak) * h.width;
    }
    if (!opt.sigma_hist.empty())
      emit_hist(opt.sigma_hist, improving_sigma, opt.sigma_hist_lo, opt.sigma_hist_hi);

    // gamma-sigma sample correlation over the improving pairs
    if (improving_gamma.size() >= 3) {
      const auto n = static_cast<double>(improving_gamma.size());
      double mg = 0, ms = 0;
      for (std::size_t i = 0; i < improving_gamma.size(); ++i) {
        mg += improving_gamma[i];
        ms += improving_sigma[i];
      }
      mg /= n;
      ms /= n;
      double sgs = 0, sgg = 0, sss = 0;
      for (std::size_t i = 0; i < improving_gamma.size(); ++i) {
        sgs += (improving_gamma[i] - mg) * (improving_sigma[i] - ms);
        sgg += (improving_gamma[i] - mg) * (improving_gamma[i] - mg);
        sss += (improving_sigma[i] - ms) * (improving_sigma[i] - ms);
      }
      if (sgg > 0 && sss > 0) {
        const double r = sgs / std::sqrt(sgg * sss);
        results["improving_gamma_sigma_correlation"] = r;
        std::cout << "  improving-pair gamma/sigma correlation: " << fmt(r, "%.6f")
                  << "\n";
      }
    }
  }

  if (!opt.minima.empty() || !opt.improvement.empty()) {
    std::vector<std::pair<double, double>> samples;
    for (const auto& r : usable) samples.emplace_back(r.gamma, r.sse);

    if (!opt.minima.empty()) {
      json m;
      try {
        const auto [g, v] = refine_minimum(samples);
        m = {{"gamma", g}, {"sse", v}, {"boundary", false}, {"samples", samples.size()}};
        std::cout << "  interpolated minimum: sse = " << fmt(v, "%.6f") << " at gamma = "
                  << fmt(g, "%.6f") << "\n";
      } catch (const numerical_error& e) {
        m = {{"boundary", true}, {"message", e.what()}, {"samples", samples.size()}};
        std::cout << "  interpolated minimum: " << e.what() << "\n";
      }
      std::ofstream out = open_output(opt.minima);
      out << m.dump(2) << "\n";
      manifest.add_output(opt.minima);
    }

    if (!opt.improvement.empty()) {
      const auto regions = improvement_regions(samples, baseline);
      json list = json::array();
      for (const auto& [lo, hi] : regions) list.push_back({lo, hi});
      json body = {{"baseline", baseline}, {"intervals", list}};
      std::ofstream out = open_output(opt.improvement);
      out << body.dump(2) << "\n";
      manifest.add_output(opt.improvement);
      std::cout << "  improvement intervals: " << regions.size() << "\n";
    }
  }

  if (!opt.rankit.empty()) {
    if (opt.deviations.empty())
      throw input_error("report: --rankit needs --deviations (solve --emit output)");
    const std::vector<double> devs = read_deviation_column(opt.deviations);
    manifest.add_input(opt.deviations);
    const RankitResult rk = rankit_points(devs);
    std::ofstream out = open_output(opt.rankit);
    out << "normal_score,deviation\n";
    for (const auto& [score, value] : rk.points)
      out << fmt(score) << "," << fmt(value) << "\n";
    manifest.add_output(opt.rankit);
    results["rankit_correlation"] = rk.correlation;
    std::cout << "  rankit correlation: " << fmt(rk.correlation, "%.6f") << "\n";
  }

  json config = {{"in", opt.in},
                 {"baseline", std::isnan(baseline) ? json() : json(baseline)},
                 {"bin_width", opt.bin_width},
                 {"hist_lo", opt.hist_lo},
                 {"hist_hi", opt.hist_hi},
                 {"deviations", opt.deviations}};
  manifest.set_config(config);
  manifest.set_results(results);
  manifest.write();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

struct CountOptions {
  double e_min = 5.0;
  double e_max = 100.0;
  std::size_t points = 96;
  std::string spacing = "linear";
  double lambda = 1.0;
  std::string emit = "count.csv";
};

int run_count(const CountOptions& opt) {
  if (!(opt.e_min > 0.0) || !(opt.e_max > opt.e_min))
    throw input_error("count: need 0 < e-min < e-max");
  if (opt.points < 2) throw input_error("count: need at least 2 points");

  Manifest manifest("count");
  std::ofstream out = open_output(opt.emit);
  out << "E,n_smooth,n_corrected,delta,n_connes\n";
  for (std::size_t i = 0; i < opt.points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(opt.points - 1);
    const double e = (opt.spacing == "log")
                         ? opt.e_min * std::exp(t * std::log(opt.e_max / opt.e_min))
                         : opt.e_min + t * (opt.e_max - opt.e_min);
    const DeltaResult delta = delta_term(e);
    out << fmt(e) << "," << fmt(n_smooth(e)) << "," << fmt(n_corrected(e)) << ","
        << fmt(delta.value) << "," << fmt(n_connes(e, opt.lambda)) << "\n";
  }
  std::cout << "count: " << opt.points << " rows, E in [" << fmt(opt.e_min, "%g") << ", "
            << fmt(opt.e_max, "%g") << "], lambda = " << fmt(opt.lambda, "%g") << "\n";
  manifest.add_output(opt.emit);
  manifest.set_config({{"e_min", opt.e_min},
                       {"e_max", opt.e_max},
                       {"points", opt.points},
                       {"spacing", opt.spacing},
                       {"lambda", opt.lambda}});
  manifest.write();
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  // The config file must be known before CLI11 assigns defaults.
  FileConfig file_config;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") {
      try {
        file_config.load(args[i + 1]);
      } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
      }
    }

  CLI::App app{"Riemann-zero spectra from the Wu-Sprung well with an optional "
               "Berry-Lewis fractal supplement"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags win over it)");
  unsigned global_threads = 0;
  auto* global_threads_opt =
      app.add_option("--threads", global_threads, "worker threads (sweep)");
  std::uint64_t global_seed = 0;
  auto* global_seed_opt = app.add_option("--seed", global_seed, "RNG seed (sweep)");

  const std::string zeros_default =
      file_config.get<std::string>("global", "zeros", default_zeros_path());

  // zeros
  ZerosOptions zeros_opt;
  zeros_opt.file = zeros_default;
  zeros_opt.n = file_config.get<std::size_t>("zeros", "n", 100);
  auto* zeros_cmd = app.add_subcommand("zeros", "Load and checksum the zero table");
  zeros_cmd->add_option("--file", zeros_opt.file, "zero table path");
  zeros_cmd->add_option("--n", zeros_opt.n, "number of zeros to load");
  zeros_cmd->add_option("--emit", zeros_opt.emit, "write index,t CSV");

  // potential
  PotentialOptions pot_opt;
  pot_opt.v0 = file_config.get<double>("potential", "v0", kDefaultV0);
  pot_opt.v_max_factor = file_config.get<double>("potential", "v-max-factor", 100.0);
  auto* pot_cmd = app.add_subcommand("potential", "Implicit-form tables and grid dumps");
  pot_cmd->add_option("--v0", pot_opt.v0, "well bottom value");
  pot_cmd->add_option("--v-max-factor", pot_opt.v_max_factor, "table upper end as multiple of v0");
  pot_cmd->add_option("--table-points", pot_opt.table_points, "rows in the implicit table");
  pot_cmd->add_option("--emit-table", pot_opt.emit_table,
                      "write V,x_ws,x_ws_higher,difference,ratio CSV");
  pot_cmd->add_option("--variant", pot_opt.variant, "leading|asymptotic (grid dump)");
  pot_cmd->add_option("--half-width", pot_opt.half_width, "grid half width L");
  pot_cmd->add_option("--grid-step", pot_opt.grid_step, "grid step h");
  pot_cmd->add_option("--gamma", pot_opt.gamma, "fractal frequency ratio");
  pot_cmd->add_option("--sigma", pot_opt.sigma, "fractal scale (0 = smooth)");
  pot_cmd->add_option("--fractal-dim", pot_opt.fractal_d, "fractal dimension d");
  pot_cmd->add_option("--m-cutoff", pot_opt.m_cutoff, "series truncation |m| bound");
  pot_cmd->add_option("--emit-grid", pot_opt.emit_grid, "write x,v CSV");

  // solve
  SolveOptions solve_opt;
  solve_opt.zeros_file = zeros_default;
  solve_opt.n = file_config.get<std::size_t>("solve", "n", 25);
  solve_opt.grid_step = file_config.get<double>("solve", "grid-step", 0.002);
  solve_opt.half_width = file_config.get<double>("solve", "half-width", 0.0);
  solve_opt.method = file_config.get<std::string>("solve", "method", "finite_difference");
  auto* solve_cmd = app.add_subcommand("solve", "Lowest-n spectrum and deviations");
  solve_cmd->add_option("--zeros", solve_opt.zeros_file, "zero table path");
  solve_cmd->add_option("--n", solve_opt.n, "number of eigenvalues / zeros");
  solve_cmd->add_option("--grid-step", solve_opt.grid_step, "grid step h");
  solve_cmd->add_option("--half-width", solve_opt.half_width, "half width L (0 = auto)");
  solve_cmd->add_option("--method", solve_opt.method, "finite_difference|shooting");
  solve_cmd->add_flag("--refine,!--no-refine", solve_opt.refine, "Richardson refinement");
  solve_cmd->add_flag("--auto-refine,!--no-auto-refine", solve_opt.auto_refine,
                      "halve h until estimates <= 1e-3");
  solve_cmd->add_option("--gamma", solve_opt.gamma, "fractal frequency ratio");
  solve_cmd->add_option("--sigma", solve_opt.sigma, "fractal scale (0 = smooth)");
  solve_cmd->add_option("--fractal-dim", solve_opt.fractal_d, "fractal dimension d");
  solve_cmd->add_option("--m-cutoff", solve_opt.m_cutoff, "series truncation |m| bound");
  solve_cmd->add_option("--emit", solve_opt.emit,
                        "write index,eigenvalue,zero,deviation,abs_deviation CSV");
  solve_cmd->add_option("--emit-wavefunctions", solve_opt.emit_wavefunctions,
                        "directory for per-state x,psi CSVs");

  // sweep
  SweepOptions sweep_opt;
  sweep_opt.zeros_file = zeros_default;
  sweep_opt.config.n = file_config.get<std::size_t>("sweep", "n", 25);
  sweep_opt.config.samples = file_config.get<std::size_t>("sweep", "samples", 100);
  sweep_opt.config.seed = file_config.get<std::uint64_t>("sweep", "seed", 1);
  sweep_opt.config.grid_step = file_config.get<double>("sweep", "grid-step", 0.002);
  sweep_opt.config.half_width = file_config.get<double>("sweep", "half-width", 0.0);
  sweep_opt.gamma_range = file_config.get<std::string>("sweep", "gamma-range", "1:10");
  sweep_opt.sigma_range = file_config.get<std::string>("sweep", "sigma-range", "0:10");
  sweep_opt.threads = file_config.get<unsigned>("sweep", "threads",
                                                file_config.get<unsigned>("global", "threads", 1));
  auto* sweep_cmd = app.add_subcommand("sweep", "Seeded random search over (gamma, sigma)");
  sweep_cmd->add_option("--zeros", sweep_opt.zeros_file, "zero table path");
  sweep_cmd->add_option("--n", sweep_opt.config.n, "number of zeros to fit");
  sweep_cmd->add_option("--samples", sweep_opt.config.samples, "number of samples");
  sweep_cmd->add_option("--gamma-range", sweep_opt.gamma_range, "lo:hi");
  sweep_cmd->add_option("--sigma-range", sweep_opt.sigma_range, "lo:hi or fixed:value");
  sweep_cmd->add_option("--grid-step", sweep_opt.config.grid_step, "grid step h");
  sweep_cmd->add_option("--half-width", sweep_opt.config.half_width, "half width L (0 = auto)");
  sweep_cmd->add_option("--fractal-dim", sweep_opt.config.fractal_d, "fractal dimension d");
  sweep_cmd->add_option("--m-cutoff", sweep_opt.config.m_cutoff, "series truncation bound");
  auto* sweep_threads_opt =
      sweep_cmd->add_option("--threads", sweep_opt.threads, "worker threads");
  auto* sweep_seed_opt = sweep_cmd->add_option("--seed", sweep_opt.config.seed, "RNG seed");
  sweep_cmd->add_option("--out", sweep_opt.out, "sweep CSV path");

  // report
  ReportOptions report_opt;
  report_opt.bin_width = file_config.get<double>("report", "bin-width", 0.5);
  auto* report_cmd = app.add_subcommand("report", "Histograms, minima and rankit diagnostics");
  report_cmd->add_option("--in", report_opt.in, "sweep CSV");
  report_cmd->add_option("--baseline", report_opt.baseline,
                         "baseline sse (default: best sigma=0 record)");
  report_cmd->add_option("--gamma-hist", report_opt.gamma_hist, "improving-gamma histogram CSV");
  report_cmd->add_option("--sigma-hist", report_opt.sigma_hist, "improving-sigma histogram CSV");
  report_cmd->add_option("--hist-lo", report_opt.hist_lo, "gamma histogram lower edge");
  report_cmd->add_option("--hist-hi", report_opt.hist_hi, "gamma histogram upper edge");
  report_cmd->add_option("--bin-width", report_opt.bin_width, "histogram bin width");
  report_cmd->add_option("--sigma-hist-lo", report_opt.sigma_hist_lo, "sigma histogram lower edge");
  report_cmd->add_option("--sigma-hist-hi", report_opt.sigma_hist_hi, "sigma histogram upper edge");
  report_cmd->add_option("--minima", report_opt.minima, "interpolated-minimum JSON");
  report_cmd->add_option("--improvement", report_opt.improvement,
                         "improvement-interval JSON");
  report_cmd->add_option("--deviations", report_opt.deviations, "solve --emit CSV");
  report_cmd->add_option("--rankit", report_opt.rankit, "rankit CSV (needs --deviations)");

  // count
  CountOptions count_opt;
  count_opt.lambda = file_config.get<double>("count", "lambda", 1.0);
  auto* count_cmd = app.add_subcommand("count", "Counting-function tables");
  count_cmd->add_option("--e-min", count_opt.e_min, "lowest E");
  count_cmd->add_option("--e-max", count_opt.e_max, "highest E");
  count_cmd->add_option("--points", count_opt.points, "number of rows");
  count_cmd->add_option("--spacing", count_opt.spacing, "linear|log");
  count_cmd->add_option("--lambda", count_opt.lambda, "Connes cutoff Lambda");
  count_cmd->add_option("--emit", count_opt.emit, "output CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // globals act as defaults for the subcommand-level flags
  if (global_threads_opt->count() > 0 && sweep_threads_opt->count() == 0)
    sweep_opt.threads = global_threads;
  if (global_seed_opt->count() > 0 && sweep_seed_opt->count() == 0)
    sweep_opt.config.seed = global_seed;

  try {
    if (zeros_cmd->parsed()) return run_zeros(zeros_opt);
    if (pot_cmd->parsed()) return run_potential(pot_opt);
    if (solve_cmd->parsed()) return run_solve(solve_opt);
    if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_opt);
    if (report_cmd->parsed()) return run_report(report_opt);
    if (count_cmd->parsed()) return run_count(count_opt);
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace wsfit::cli
