#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "epd/epd.hpp"
#include "epd/generate.hpp"
#include "epd/metrics.hpp"
#include "epd/types.hpp"

namespace epd {

inline constexpr const char* kCsvSchemaLine = "# epd-csv v1";
inline constexpr const char* kCsvHeaderLine =
    "matrix_type,signal_type,n,m,K,theta,seed,relerr,res,nnzx,sgn,miss,over,"
    "success,time_s,nmat,outer_iters,exit_stage";

struct GridPoint {
  Index n = 0;
  Index m = 0;
  Index K = 0;
};

struct ParamOverrides {
  std::optional<double> rho0, sigma, eps, eps1, omega1, omega2;
};

/// A fully resolved experiment: which ensemble/signal, which (n, m, K) grid,
/// how many trials per point, and how results are recorded. Reruns with an
/// identical config and seed0 produce byte-identical CSV; set timing=false to
/// extend that identity to the time_s column (written as zero).
struct ExperimentConfig {
  std::string name = "sweep";
  int matrix_type = 1;
  int signal_type = 1;
  std::vector<GridPoint> grid;
  char sweep_axis = 'm';  // which grid variable drives the plot ('m' or 'n')
  int trials = 50;
  double theta = 0;
  bool noisy = false;
  std::uint64_t seed0 = 1;
  int jobs = 1;
  bool timing = true;
  int caltech_row = 0;  // nonzero: benchmark-table instance, grid has one point
  ParamOverrides overrides;
};

inline void validate_config(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (config.grid.empty()) throw std::invalid_argument("config: empty grid");
  for (const GridPoint& p : config.grid)
    if (p.n <= 0 || p.m <= 0 || p.m > p.n || p.K < 0 || p.K > p.n)
      throw std::invalid_argument("config: grid point violates 0 < m <= n, 0 <= K <= n");
  for (std::size_t i = 1; i < config.grid.size(); ++i) {
    const bool increasing = config.sweep_axis == 'n'
                                ? config.grid[i].n > config.grid[i - 1].n
                                : config.grid[i].m > config.grid[i - 1].m;
    if (!increasing)
      throw std::invalid_argument("config: sweep axis values must be strictly increasing");
  }
  if (config.noisy && config.theta <= 0)
    throw std::invalid_argument("config: noisy sweeps need theta > 0");
}

// ---------------------------------------------------------------------------
// Grid helpers and presets.
// ---------------------------------------------------------------------------

/// Parses "80,140,220" or "80:10:220" (inclusive range) into values.
inline std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> values;
  if (text.find(':') != std::string::npos) {
    long long start = 0, step = 0, stop = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || step <= 0)
      throw std::invalid_argument("bad range (want start:step:stop): " + text);
    for (long long v = start; v <= stop; v += step) values.push_back(static_cast<Index>(v));
  } else {
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.empty()) continue;
      values.push_back(static_cast<Index>(std::stoll(item)));
    }
  }
  if (values.empty()) throw std::invalid_argument("empty value list: " + text);
  return values;
}

inline std::vector<GridPoint> grid_over_m(Index n, const std::vector<Index>& m_values, Index K) {
  std::vector<GridPoint> grid;
  grid.reserve(m_values.size());
  for (Index m : m_values) grid.push_back({n, m, K});
  return grid;
}

/// Named experiment shapes. Recognized names:
///   fig1-atype1-stype<t>, fig2-atype2-stype<t>   t in 1..6
///   fig3-atype5-stype<t>                         t in {1,3,5}
///   fig4-atype3-stype<t>                         t in 1..6   (noisy)
///   fig5-atype4-stype<t>                         t in {1,3,5} (noisy)
///   caltech:<row>                                row in 1..10
inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig config;
  config.name = name;

  if (name.rfind("caltech:", 0) == 0) {
    const int row = std::stoi(name.substr(8));
    const auto& rows = caltech_rows();
    if (row < 1 || row > static_cast<int>(rows.size()))
      throw std::invalid_argument("unknown benchmark row in preset: " + name);
    const BenchmarkRow& r = rows[static_cast<std::size_t>(row - 1)];
    Index K = 0;
    for (const BenchmarkLevel& level : r.levels) K += level.count;
    config.caltech_row = row;
    config.matrix_type = 1;
    config.signal_type = 0;
    config.grid = {{r.n, r.m, K}};
    config.trials = 10;
    return config;
  }

  const auto parse_stype = [&](std::size_t prefix_len) {
    if (name.size() != prefix_len + 1) throw std::invalid_argument("unknown preset: " + name);
    const int t = name[prefix_len] - '0';
    if (t < 1 || t > 6) throw std::invalid_argument("unknown signal type in preset: " + name);
    return t;
  };

  if (name.rfind("fig1-atype1-stype", 0) == 0 || name.rfind("fig2-atype2-stype", 0) == 0) {
    config.matrix_type = name[3] == '1' ? 1 : 2;
    config.signal_type = parse_stype(17);
    config.grid = grid_over_m(600, parse_index_list("80:10:220"), 40);
    config.trials = 50;
    return config;
  }
  if (name.rfind("fig3-atype5-stype", 0) == 0) {
    const int t = parse_stype(17);
    if (t != 1 && t != 3 && t != 5)
      throw std::invalid_argument("scaling preset supports signal types 1, 3, 5: " + name);
    config.matrix_type = 5;
    config.signal_type = t;
    config.sweep_axis = 'n';
    config.trials = 50;
    const double divisor = t == 1 ? 6.0 : (t == 3 ? 3.0 : 4.0);
    for (int p = 7; p <= 16; ++p) {
      const Index n = Index(1) << p;
      const Index m = static_cast<Index>(std::llround(static_cast<double>(n) / divisor));
      const Index K = static_cast<Index>(std::llround(0.3 * static_cast<double>(m)));
      config.grid.push_back({n, m, K});
    }
    return config;
  }
  if (name.rfind("fig4-atype3-stype", 0) == 0) {
    config.matrix_type = 3;
    config.signal_type = parse_stype(17);
    config.grid = grid_over_m(600, parse_index_list("120:10:240"), 40);
    config.trials = 50;
    config.noisy = true;
    config.theta = 0.01;
    return config;
  }
  if (name.rfind("fig5-atype4-stype", 0) == 0) {
    const int t = parse_stype(17);
    if (t != 1 && t != 3 && t != 5)
      throw std::invalid_argument("preset supports signal types 1, 3, 5: " + name);
    config.matrix_type = 4;
    config.signal_type = t;
    config.grid = grid_over_m(Index(1) << 11, parse_index_list("500:50:1100"), 150);
    config.trials = 50;
    config.noisy = true;
    config.theta = 0.01;
    return config;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

// ---------------------------------------------------------------------------
// Overlay: preset/file/flag settings merged into a final config.
// ---------------------------------------------------------------------------

/// Partial settings collected from a config file and/or command-line flags.
/// resolve() layers them over the chosen preset (or a blank config).
struct ConfigOverlay {
  std::optional<std::string> preset_name;
  std::optional<std::string> name;
  std::optional<int> matrix_type, signal_type, trials, jobs;
  std::optional<Index> n, K;
  std::optional<std::vector<Index>> m_values;
  std::optional<double> theta;
  std::optional<bool> noisy, timing;
  std::optional<std::uint64_t> seed0;
  ParamOverrides params;
};

inline void apply_entry(ConfigOverlay& overlay, const std::string& key, const std::string& value) {
  const auto as_bool = [&]() {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw std::invalid_argument("bad boolean for " + key + ": " + value);
  };
  if (key == "preset")
    overlay.preset_name = value;
  else if (key == "name")
    overlay.name = value;
  else if (key == "matrix_type")
    overlay.matrix_type = std::stoi(value);
  else if (key == "signal_type")
    overlay.signal_type = std::stoi(value);
  else if (key == "n")
    overlay.n = static_cast<Index>(std::stoll(value));
  else if (key == "m")
    overlay.m_values = parse_index_list(value);
  else if (key == "K")
    overlay.K = static_cast<Index>(std::stoll(value));
  else if (key == "trials")
    overlay.trials = std::stoi(value);
  else if (key == "theta")
    overlay.theta = std::stod(value);
  else if (key == "noisy")
    overlay.noisy = as_bool();
  else if (key == "seed" || key == "seed0")
    overlay.seed0 = static_cast<std::uint64_t>(std::stoull(value));
  else if (key == "jobs")
    overlay.jobs = std::stoi(value);
  else if (key == "timing")
    overlay.timing = as_bool();
  else if (key == "rho0")
    overlay.params.rho0 = std::stod(value);
  else if (key == "sigma")
    overlay.params.sigma = std::stod(value);
  else if (key == "eps")
    overlay.params.eps = std::stod(value);
  else if (key == "eps1")
    overlay.params.eps1 = std::stod(value);
  else if (key == "omega1")
    overlay.params.omega1 = std::stod(value);
  else if (key == "omega2")
    overlay.params.omega2 = std::stod(value);
  else
    throw std::invalid_argument("unknown config key: " + key);
}

/// Flat key=value file; '#' starts a comment, blank lines ignored.
inline ConfigOverlay parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  ConfigOverlay overlay;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    apply_entry(overlay, key, value);
  }
  return overlay;
}

inline ExperimentConfig resolve(const ConfigOverlay& overlay) {
  ExperimentConfig config;
  if (overlay.preset_name.has_value()) config = preset(*overlay.preset_name);
  if (overlay.name) config.name = *overlay.name;
  if (overlay.matrix_type) config.matrix_type = *overlay.matrix_type;
  if (overlay.signal_type) config.signal_type = *overlay.signal_type;
  if (overlay.trials) config.trials = *overlay.trials;
  if (overlay.jobs) config.jobs = std::max(1, *overlay.jobs);
  if (overlay.theta) config.theta = *overlay.theta;
  if (overlay.noisy) config.noisy = *overlay.noisy;
  if (overlay.timing) config.timing = *overlay.timing;
  if (overlay.seed0) config.seed0 = *overlay.seed0;
  config.overrides = overlay.params;
  if (config.noisy && config.theta <= 0) config.theta = 0.01;

  if (overlay.m_values.has_value()) {
    const Index n = overlay.n.value_or(config.grid.empty() ? Index(600) : config.grid.front().n);
    const Index K = overlay.K.value_or(config.grid.empty() ? Index(40) : config.grid.front().K);
    config.grid = grid_over_m(n, *overlay.m_values, K);
    config.sweep_axis = 'm';
  } else {
    for (GridPoint& p : config.grid) {
      if (overlay.n) p.n = *overlay.n;
      if (overlay.K) p.K = *overlay.K;
    }
  }
  if (config.grid.empty())
    throw std::invalid_argument("config resolves to an empty grid: give --preset or n/m/K");
  validate_config(config);
  return config;
}

// ---------------------------------------------------------------------------
// Trial execution.
// ---------------------------------------------------------------------------

/// One CSV data row: instance coordinates plus the recorded solve outcome.
struct TrialRow {
  int matrix_type = 0;
  int signal_type = 0;
  Index n = 0, m = 0, K = 0;
  double theta = 0;
  std::uint64_t seed = 0;
  std::optional<double> relerr;
  double res = 0;
  Index nnzx = 0;
  Index sgn = 0, miss = 0, over = 0;
  bool success = false;
  double time_s = 0;
  std::uint64_t nmat = 0;
  int outer_iters = 0;
  int exit_stage = 0;
};

struct TrialOutcome {
  TrialRow row;
  DenseVector<double> x;
  SolverReport<double> report;
};

inline EpdParams<double> params_for(const ProblemInstance<double>& instance,
                                    const ParamOverrides& overrides) {
  const bool noisy = instance.theta > 0;
  auto params = EpdParams<double>::for_instance(instance.b.norm(),
                                                instance.op.kind() != OperatorKind::Dense, noisy,
                                                instance.theta);
  if (overrides.rho0) params.rho0 = *overrides.rho0;
  if (overrides.sigma) params.sigma = *overrides.sigma;
  if (overrides.eps) params.eps = *overrides.eps;
  if (overrides.eps1) params.eps1 = *overrides.eps1;
  if (overrides.omega1) params.omega1 = *overrides.omega1;
  if (overrides.omega2) params.omega2 = *overrides.omega2;
  return params;
}

/// Solves one instance and assembles its CSV row. Timing covers the solve
/// only (generation happens before this call); timing=false records zero.
inline TrialOutcome run_instance(const ProblemInstance<double>& instance,
                                 const ParamOverrides& overrides, bool timing = true) {
  const EpdParams<double> params = params_for(instance, overrides);
  SolverReport<double> report = epd_practical<double>(instance.op, instance.b, params);
  const RecoveryRecord<double> record =
      assess_recovery<double>(report.x, instance.op, instance.b, instance.x_true);

  TrialOutcome out;
  out.row.matrix_type = instance.matrix_type;
  out.row.signal_type = instance.signal_type;
  out.row.n = instance.n;
  out.row.m = instance.m;
  out.row.K = instance.K;
  out.row.theta = instance.theta;
  out.row.seed = instance.seed;
  out.row.relerr = record.relerr;
  out.row.res = record.res;
  out.row.nnzx = record.nnzx;
  out.row.sgn = record.support.sgn;
  out.row.miss = record.support.miss;
  out.row.over = record.support.over;
  out.row.success = record.success;
  out.row.time_s = timing ? report.time_s : 0.0;
  out.row.nmat = report.nmat;
  out.row.outer_iters = report.outer_iterations;
  out.row.exit_stage = report.exit_stage;
  out.x = report.x;
  out.report = std::move(report);
  return out;
}

inline ProblemInstance<double> make_instance(const ExperimentConfig& config, std::size_t grid_idx,
                                             int trial) {
  const std::uint64_t seed = config.seed0 + static_cast<std::uint64_t>(grid_idx) *
                                                static_cast<std::uint64_t>(config.trials) +
                             static_cast<std::uint64_t>(trial);
  const GridPoint& point = config.grid[grid_idx];
  ProblemInstance<double> instance =
      config.caltech_row > 0
          ? gen_caltech<double>(config.caltech_row, seed)
          : gen_instance<double>(config.matrix_type, config.signal_type, point.n, point.m,
                                 point.K, seed);
  if (config.noisy) add_noise<double>(instance, config.theta, seed);
  return instance;
}

inline TrialRow run_trial(const ExperimentConfig& config, std::size_t grid_idx, int trial) {
  const ProblemInstance<double> instance = make_instance(config, grid_idx, trial);
  return run_instance(instance, config.overrides, config.timing).row;
}

// ---------------------------------------------------------------------------
// CSV, aggregation, sweep driver.
// ---------------------------------------------------------------------------

inline std::string format_csv_row(const TrialRow& row) {
  char buf[512];
  char relerr_text[32];
  if (row.relerr.has_value())
    std::snprintf(relerr_text, sizeof relerr_text, "%.6e", *row.relerr);
  else
    std::snprintf(relerr_text, sizeof relerr_text, "--");
  std::snprintf(buf, sizeof buf,
                "%d,%d,%lld,%lld,%lld,%.6g,%llu,%s,%.6e,%lld,%lld,%lld,%lld,%d,%.6f,%llu,%d,%d",
                row.matrix_type, row.signal_type, static_cast<long long>(row.n),
                static_cast<long long>(row.m), static_cast<long long>(row.K), row.theta,
                static_cast<unsigned long long>(row.seed), relerr_text, row.res,
                static_cast<long long>(row.nnzx), static_cast<long long>(row.sgn),
                static_cast<long long>(row.miss), static_cast<long long>(row.over),
                row.success ? 1 : 0, row.time_s, static_cast<unsigned long long>(row.nmat),
                row.outer_iters, row.exit_stage);
  return std::string(buf);
}

/// Aggregated outcome at one grid point. frequency is exactly the mean of the
/// success flags. mean_time averages successful trials; when none succeeded
/// it averages all trials and time_over_all is set.
struct PointSummary {
  GridPoint point;
  int trials = 0;
  int successes = 0;
  double frequency = 0;
  double mean_time = 0;
  bool time_over_all = false;
  double mean_relerr = 0;
  bool has_relerr = false;
  double mean_res = 0;
  double mean_nmat = 0;
  double mean_outer = 0;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<TrialRow> rows;  // grid-major, trial-minor
  std::vector<PointSummary> summary;
  std::string csv;
};

inline std::string rows_to_csv(const std::vector<TrialRow>& rows) {
  std::string csv = std::string(kCsvSchemaLine) + "\n" + kCsvHeaderLine + "\n";
  for (const TrialRow& row : rows) {
    csv += format_csv_row(row);
    csv += '\n';
  }
  return csv;
}

inline std::vector<PointSummary> summarize(const ExperimentConfig& config,
                                           const std::vector<TrialRow>& rows) {
  std::vector<PointSummary> summary(config.grid.size());
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    PointSummary& s = summary[g];
    s.point = config.grid[g];
    s.trials = config.trials;
    double time_success = 0, time_all = 0, relerr_sum = 0, res_sum = 0, nmat_sum = 0,
           outer_sum = 0;
    int relerr_count = 0;
    for (int t = 0; t < config.trials; ++t) {
      const TrialRow& row = rows[g * static_cast<std::size_t>(config.trials) +
                                 static_cast<std::size_t>(t)];
      if (row.success) {
        ++s.successes;
        time_success += row.time_s;
      }
      time_all += row.time_s;
      if (row.relerr.has_value()) {
        relerr_sum += *row.relerr;
        ++relerr_count;
      }
      res_sum += row.res;
      nmat_sum += static_cast<double>(row.nmat);
      outer_sum += row.outer_iters;
    }
    const double trials = static_cast<double>(s.trials);
    s.frequency = static_cast<double>(s.successes) / trials;
    s.time_over_all = s.successes == 0;
    s.mean_time = s.time_over_all ? time_all / trials
                                  : time_success / static_cast<double>(s.successes);
    s.has_relerr = relerr_count > 0;
    s.mean_relerr = s.has_relerr ? relerr_sum / relerr_count : 0;
    s.mean_res = res_sum / trials;
    s.mean_nmat = nmat_sum / trials;
    s.mean_outer = outer_sum / trials;
  }
  return summary;
}

/// Runs every (grid point, trial) pair. Work is distributed over
/// config.jobs threads; each trial writes its preallocated slot, so row
/// order — and hence the CSV — is identical for any job count.
inline SweepResult run_sweep(const ExperimentConfig& config) {
  validate_config(config);
  const std::size_t total = config.grid.size() * static_cast<std::size_t>(config.trials);
  SweepResult result;
  result.config = config;
  result.rows.resize(total);

  const auto work = [&](std::size_t index) {
    const std::size_t grid_idx = index / static_cast<std::size_t>(config.trials);
    const int trial = static_cast<int>(index % static_cast<std::size_t>(config.trials));
    result.rows[index] = run_trial(config, grid_idx, trial);
  };

  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(total)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < total; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
          try {
            work(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  result.summary = summarize(config, result.rows);
  result.csv = rows_to_csv(result.rows);
  return result;
}

// ---------------------------------------------------------------------------
// SVG emission: minimal hand-built polyline plots.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::string(buf);
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return std::string(buf);
}

}  // namespace detail

/// success-vs-m polyline when sweeping m; mean-time-vs-n (n on a log2 axis)
/// when sweeping n. Self-contained SVG, no external dependencies.
inline std::string sweep_svg(const SweepResult& result) {
  const bool time_plot = result.config.sweep_axis == 'n';
  std::vector<double> xs, ys;
  for (const PointSummary& s : result.summary) {
    xs.push_back(time_plot ? std::log2(static_cast<double>(s.point.n))
                           : static_cast<double>(s.point.m));
    ys.push_back(time_plot ? s.mean_time : s.frequency);
  }
  double x_min = xs.front(), x_max = xs.front(), y_max = 0;
  for (double x : xs) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
  }
  for (double y : ys) y_max = std::max(y_max, y);
  const double y_lo = 0;
  const double y_hi = time_plot ? std::max(1e-12, y_max * 1.05) : 1.0;
  const double x_span = std::max(x_max - x_min, 1e-12);

  const double width = 640, height = 440;
  const double left = 70, right = 20, top = 40, bottom = 55;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  const auto px = [&](double x) { return left + (x - x_min) / x_span * plot_w; };
  const auto py = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "  <text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << result.config.name << "</text>\n";

  // axes
  svg << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "  <line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";

  // y ticks
  for (int i = 0; i <= 5; ++i) {
    const double y = y_lo + (y_hi - y_lo) * i / 5.0;
    const double yy = py(y);
    svg << "  <line x1=\"" << left - 4 << "\" y1=\"" << detail::svg_number(yy) << "\" x2=\""
        << left + plot_w << "\" y2=\"" << detail::svg_number(yy)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "  <text x=\"" << left - 8 << "\" y=\"" << detail::svg_number(yy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::tick_label(y) << "</text>\n";
  }

  // x ticks: one per grid point, thinned to at most 12 labels
  const std::size_t stride = xs.size() > 12 ? (xs.size() + 11) / 12 : 1;
  for (std::size_t i = 0; i < xs.size(); i += stride) {
    const double xx = px(xs[i]);
    svg << "  <line x1=\"" << detail::svg_number(xx) << "\" y1=\"" << top + plot_h << "\" x2=\""
        << detail::svg_number(xx) << "\" y2=\"" << top + plot_h + 4 << "\" stroke=\"black\"/>\n";
    const double label = time_plot ? static_cast<double>(result.summary[i].point.n)
                                   : static_cast<double>(result.summary[i].point.m);
    svg << "  <text x=\"" << detail::svg_number(xx) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::tick_label(label) << "</text>\n";
  }

  // axis titles
  svg << "  <text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << (time_plot ? "n" : "m") << "</text>\n";
  svg << "  <text x=\"18\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">"
      << (time_plot ? "mean time (s)" : "success frequency") << "</text>\n";

  // polyline + markers
  svg << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) svg << " ";
    svg << detail::svg_number(px(xs[i])) << "," << detail::svg_number(py(ys[i]));
  }
  svg << "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    svg << "  <circle cx=\"" << detail::svg_number(px(xs[i])) << "\" cy=\""
        << detail::svg_number(py(ys[i])) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace epd
