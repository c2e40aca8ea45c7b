// Command-line front end: single-problem solving, experiment sweeps with CSV,
// summary JSON and SVG outputs, desk-scale oracle reports, instance export.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epd/epd.hpp"
#include "epd/generate.hpp"
#include "epd/harness.hpp"
#include "epd/io.hpp"
#include "epd/metrics.hpp"
#include "epd/oracle.hpp"

namespace {

using nlohmann::json;

// Options shared by the instance-producing subcommands.
struct CommonOptions {
  std::string preset;
  std::string config_file;
  std::string out_dir = ".";
  std::string name;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> matrix_type, signal_type, trials;
  std::optional<long long> n, K;
  std::string m_text;
  bool noisy = false;
  std::optional<double> theta;
  std::optional<bool> timing;
  std::optional<double> rho0, sigma, eps, eps1, omega1, omega2;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_grid) {
  cmd->add_option("--preset", opt.preset,
                  "named experiment (fig1-atype1-stype1 .. fig5-atype4-stype5, caltech:<row>)");
  cmd->add_option("--config", opt.config_file, "flat key=value config file");
  cmd->add_option("--out", opt.out_dir, "output directory (default .)");
  cmd->add_option("--name", opt.name, "base name for output files");
  cmd->add_option("--seed", opt.seed, "base RNG seed");
  cmd->add_option("--matrix-type", opt.matrix_type, "sensing ensemble 1..5")
      ->check(CLI::Range(1, 5));
  cmd->add_option("--signal-type", opt.signal_type, "signal family 1..6")->check(CLI::Range(1, 6));
  cmd->add_option("--n", opt.n, "signal dimension");
  cmd->add_option("--m", opt.m_text,
                  with_grid ? "measurement counts: list 80,140,220 or range 80:10:220"
                            : "measurement count");
  cmd->add_option("--K", opt.K, "number of nonzeros in the true signal");
  if (with_grid) {
    cmd->add_option("--trials", opt.trials, "trials per grid point");
    cmd->add_option("--jobs", opt.jobs, "worker threads for the sweep");
    cmd->add_option("--timing", opt.timing,
                    "record wall time (set 0 for byte-identical rerun CSVs)");
  }
  cmd->add_flag("--noisy", opt.noisy, "apply the noisy-measurement protocol");
  cmd->add_option("--theta", opt.theta, "noise level (default 0.01 when --noisy)");
  cmd->add_option("--rho0", opt.rho0, "initial penalty parameter");
  cmd->add_option("--sigma", opt.sigma, "penalty growth factor");
  cmd->add_option("--eps", opt.eps, "complementarity target");
  cmd->add_option("--eps1", opt.eps1, "relative residual target");
  cmd->add_option("--omega1", opt.omega1, "stage-1 inner gradient tolerance");
  cmd->add_option("--omega2", opt.omega2, "stage-2 inner gradient tolerance");
}

epd::ConfigOverlay overlay_from(const CommonOptions& opt) {
  epd::ConfigOverlay overlay;
  if (!opt.config_file.empty()) overlay = epd::parse_config_file(opt.config_file);
  if (!opt.preset.empty()) overlay.preset_name = opt.preset;
  if (!opt.name.empty()) overlay.name = opt.name;
  if (opt.seed) overlay.seed0 = *opt.seed;
  if (opt.jobs) overlay.jobs = *opt.jobs;
  if (opt.matrix_type) overlay.matrix_type = *opt.matrix_type;
  if (opt.signal_type) overlay.signal_type = *opt.signal_type;
  if (opt.trials) overlay.trials = *opt.trials;
  if (opt.n) overlay.n = static_cast<epd::Index>(*opt.n);
  if (opt.K) overlay.K = static_cast<epd::Index>(*opt.K);
  if (!opt.m_text.empty()) overlay.m_values = epd::parse_index_list(opt.m_text);
  if (opt.noisy) overlay.noisy = true;
  if (opt.theta) overlay.theta = *opt.theta;
  if (opt.timing) overlay.timing = *opt.timing;
  overlay.params.rho0 = opt.rho0;
  overlay.params.sigma = opt.sigma;
  overlay.params.eps = opt.eps;
  overlay.params.eps1 = opt.eps1;
  overlay.params.omega1 = opt.omega1;
  overlay.params.omega2 = opt.omega2;
  return overlay;
}

std::filesystem::path out_path(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  return std::filesystem::path(dir) / file;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json row_json(const epd::TrialRow& row) {
  json j{{"matrix_type", row.matrix_type}, {"signal_type", row.signal_type},
         {"n", row.n},                     {"m", row.m},
         {"K", row.K},                     {"theta", row.theta},
         {"seed", row.seed},               {"res", row.res},
         {"nnzx", row.nnzx},               {"sgn", row.sgn},
         {"miss", row.miss},               {"over", row.over},
         {"success", row.success},         {"time_s", row.time_s},
         {"nmat", row.nmat},               {"outer_iters", row.outer_iters},
         {"exit_stage", row.exit_stage}};
  if (row.relerr.has_value())
    j["relerr"] = *row.relerr;
  else
    j["relerr"] = nullptr;
  return j;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveOptions {
  CommonOptions common;
  std::string a_file, b_file, xtrue_file;
  double delta = 0;
};

int cmd_solve(const SolveOptions& opt) {
  epd::ProblemInstance<double> instance;
  if (!opt.a_file.empty() || !opt.b_file.empty()) {
    if (opt.a_file.empty() || opt.b_file.empty()) {
      std::cerr << "solve: --A and --b must be given together\n";
      return 1;
    }
    instance.op = epd::LinearOperator<double>::FromDense(epd::load_matrix<double>(opt.a_file));
    instance.b = epd::load_vector<double>(opt.b_file);
    if (instance.b.size() != instance.op.rows()) {
      std::cerr << "solve: b has " << instance.b.size() << " entries but A has "
                << instance.op.rows() << " rows\n";
      return 1;
    }
    if (!opt.xtrue_file.empty()) {
      instance.x_true = epd::load_vector<double>(opt.xtrue_file);
      if (instance.x_true->size() != instance.op.cols()) {
        std::cerr << "solve: xtrue has " << instance.x_true->size() << " entries but A has "
                  << instance.op.cols() << " columns\n";
        return 1;
      }
    }
    instance.delta = opt.delta;
    instance.theta = opt.common.theta.value_or(opt.common.noisy ? 0.01 : opt.delta);
    instance.n = instance.op.cols();
    instance.m = instance.op.rows();
    instance.name = opt.common.name.empty() ? "solve" : opt.common.name;
  } else {
    epd::ExperimentConfig config = epd::resolve(overlay_from(opt.common));
    instance = epd::make_instance(config, 0, 0);
    if (instance.name.empty())
      instance.name = opt.common.name.empty() ? "solve" : opt.common.name;
  }

  epd::ParamOverrides overrides = overlay_from(opt.common).params;
  const bool timing = opt.common.timing.value_or(true);
  epd::TrialOutcome outcome = epd::run_instance(instance, overrides, timing);

  const std::string base = opt.common.name.empty() ? instance.name : opt.common.name;
  epd::save_vector(out_path(opt.common.out_dir, base + "-x.txt").string(), outcome.x);
  write_text(out_path(opt.common.out_dir, base + ".csv"),
             epd::rows_to_csv({outcome.row}));

  json summary = row_json(outcome.row);
  summary["name"] = base;
  summary["converged"] = outcome.report.converged;
  summary["reason"] = epd::to_string(outcome.report.reason);
  summary["residual_rel"] = outcome.report.residual_rel;
  summary["complementarity"] = outcome.report.complementarity;
  summary["stage1_iterations"] = outcome.report.stage1_iterations;
  write_text(out_path(opt.common.out_dir, base + ".json"), summary.dump(2) + "\n");

  std::cout << summary.dump(2) << "\n";
  return outcome.report.converged ? 0 : 2;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int cmd_sweep(const CommonOptions& opt) {
  epd::ExperimentConfig config = epd::resolve(overlay_from(opt));
  const epd::SweepResult result = epd::run_sweep(config);

  const std::string base = config.name;
  write_text(out_path(opt.out_dir, base + ".csv"), result.csv);
  write_text(out_path(opt.out_dir, base + ".svg"), epd::sweep_svg(result));

  json summary;
  summary["name"] = config.name;
  summary["matrix_type"] = config.matrix_type;
  summary["signal_type"] = config.signal_type;
  summary["trials"] = config.trials;
  summary["noisy"] = config.noisy;
  summary["theta"] = config.theta;
  summary["seed0"] = config.seed0;
  summary["points"] = json::array();
  for (const epd::PointSummary& s : result.summary) {
    json point{{"n", s.point.n},
               {"m", s.point.m},
               {"K", s.point.K},
               {"trials", s.trials},
               {"successes", s.successes},
               {"frequency", s.frequency},
               {"mean_time_s", s.mean_time},
               {"time_over_all_trials", s.time_over_all},
               {"mean_res", s.mean_res},
               {"mean_nmat", s.mean_nmat},
               {"mean_outer_iters", s.mean_outer}};
    if (s.has_relerr) point["mean_relerr"] = s.mean_relerr;
    summary["points"].push_back(point);
  }
  write_text(out_path(opt.out_dir, base + "-summary.json"), summary.dump(2) + "\n");

  std::printf("%-8s %-8s %-6s %10s %12s\n", config.sweep_axis == 'n' ? "n" : "m", "K",
              "succ", "freq", "mean_time_s");
  for (const epd::PointSummary& s : result.summary)
    std::printf("%-8lld %-8lld %3d/%-3d %9.3f %11.4f%s\n",
                static_cast<long long>(config.sweep_axis == 'n' ? s.point.n : s.point.m),
                static_cast<long long>(s.point.K), s.successes, s.trials, s.frequency,
                s.mean_time, s.time_over_all ? " (all trials)" : "");
  std::cout << "wrote " << out_path(opt.out_dir, base + ".csv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct OracleOptions {
  std::string a_file, b_file;
  double delta = 0;
  double rho0 = 1.0;
  std::string checks = "l0,penalty,nsc,lp";
};

int cmd_oracle(const OracleOptions& opt) {
  epd::TinyInstance<double> tiny;
  tiny.A = epd::load_matrix<double>(opt.a_file);
  tiny.b = epd::load_vector<double>(opt.b_file);
  tiny.delta = opt.delta;
  if (tiny.A.cols() > 14) {
    std::cerr << "oracle: n = " << tiny.A.cols() << " exceeds the enumeration cap (14)\n";
    return 1;
  }
  if (tiny.b.size() != tiny.A.rows()) {
    std::cerr << "oracle: b has " << tiny.b.size() << " entries but A has " << tiny.A.rows()
              << " rows\n";
    return 1;
  }
  const auto wants = [&](const char* check) {
    return opt.checks.find(check) != std::string::npos;
  };

  const auto l0 = epd::brute_min_l0(tiny);
  std::vector<epd::Index> support;
  for (epd::Index i = 0; i < l0.witness.size(); ++i)
    if (l0.witness[i] != 0.0) support.push_back(i);
  if (wants("l0")) {
    std::cout << "r = " << l0.r << "\nwitness =";
    for (epd::Index i = 0; i < l0.witness.size(); ++i) std::cout << " " << l0.witness[i];
    std::cout << "\n";
  }

  if (wants("penalty")) {
    if (tiny.delta != 0 || tiny.A.cols() > 10) {
      std::cout << "penalty sweep: skipped (needs delta = 0 and n <= 10)\n";
    } else {
      std::cout << "penalty sweep (rho0 = " << opt.rho0 << "):\n";
      for (int j = 0; j <= 20; ++j) {
        const double rho = opt.rho0 * std::ldexp(1.0, j);
        const auto pen = epd::brute_penalty_min(tiny, rho);
        std::printf("  rho = 2^%-2d * rho0  value = %.12f\n", j, pen.value);
      }
    }
  }

  if (wants("nsc")) {
    const epd::DenseVector<double> ones = epd::DenseVector<double>::Ones(tiny.A.cols());
    try {
      const auto nsc = epd::check_nsc<double>(tiny.A, ones, support);
      const char* verdict = nsc.verdict == epd::NscVerdict::Certified   ? "certified"
                            : nsc.verdict == epd::NscVerdict::Violated  ? "violated"
                                                                        : "inconclusive";
      std::cout << "nsc (v = e, support of witness): " << verdict
                << "  margin = " << nsc.margin << "  null_dim = " << nsc.null_dim << "\n";
    } catch (const std::invalid_argument& err) {
      std::cout << "nsc: skipped (" << err.what() << ")\n";
    }
  }

  if (wants("lp")) {
    if (tiny.delta != 0) {
      std::cout << "lp cross-check: skipped (needs delta = 0)\n";
    } else {
      const epd::DenseVector<double> ones = epd::DenseVector<double>::Ones(tiny.A.cols());
      const auto lp = epd::bp_lp_oracle<double>(tiny, ones);
      std::cout << "lp value (min l1 over Ax=b) = " << lp.value
                << "   l1 of l0-witness = " << l0.witness.template lpNorm<1>() << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

int cmd_gen(const CommonOptions& opt) {
  epd::ExperimentConfig config = epd::resolve(overlay_from(opt));
  const epd::ProblemInstance<double> instance = epd::make_instance(config, 0, 0);
  std::string base = opt.name;
  if (base.empty()) {
    base = instance.name.empty() ? "instance" : instance.name;
    char suffix[128];
    std::snprintf(suffix, sizeof suffix, "-at%d-st%d-n%lld-m%lld-K%lld-seed%llu",
                  instance.matrix_type, instance.signal_type,
                  static_cast<long long>(instance.n), static_cast<long long>(instance.m),
                  static_cast<long long>(instance.K),
                  static_cast<unsigned long long>(instance.seed));
    base += suffix;
  }
  epd::save_matrix(out_path(opt.out_dir, base + "-A.mtx").string(), instance.op.to_dense());
  epd::save_vector(out_path(opt.out_dir, base + "-b.txt").string(), instance.b);
  if (instance.x_true)
    epd::save_vector(out_path(opt.out_dir, base + "-xtrue.txt").string(), *instance.x_true);

  json meta{{"name", base},
            {"matrix_type", instance.matrix_type},
            {"signal_type", instance.signal_type},
            {"n", instance.n},
            {"m", instance.m},
            {"K", instance.K},
            {"theta", instance.theta},
            {"delta", instance.delta},
            {"seed", instance.seed}};
  write_text(out_path(opt.out_dir, base + "-meta.json"), meta.dump(2) + "\n");
  std::cout << "wrote " << out_path(opt.out_dir, base + "-A.mtx").string() << " (+ b, xtrue, meta)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact penalty decomposition solver for sparse recovery"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "solve a single instance");
  add_common_flags(solve, solve_opt.common, /*with_grid=*/false);
  solve->add_option("--A", solve_opt.a_file, "matrix file (MatrixMarket array format)");
  solve->add_option("--b", solve_opt.b_file, "right-hand-side vector file (one value per line)");
  solve->add_option("--xtrue", solve_opt.xtrue_file, "ground-truth vector file (optional)");
  solve->add_option("--delta", solve_opt.delta, "residual bound for file-based instances");
  solve->add_option("--timing", solve_opt.common.timing, "record wall time (default 1)");

  CommonOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand("sweep", "run an experiment grid, write CSV/JSON/SVG");
  add_common_flags(sweep, sweep_opt, /*with_grid=*/true);

  OracleOptions oracle_opt;
  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive desk-scale checks on a tiny instance");
  oracle->add_option("--A", oracle_opt.a_file, "matrix file (n <= 14)")->required();
  oracle->add_option("--b", oracle_opt.b_file, "right-hand-side vector file")->required();
  oracle->add_option("--delta", oracle_opt.delta, "residual bound (default 0)");
  oracle->add_option("--rho0", oracle_opt.rho0, "base penalty parameter for the sweep");
  oracle->add_option("--checks", oracle_opt.checks, "comma list from: l0,penalty,nsc,lp");

  CommonOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "generate an instance and export it");
  add_common_flags(gen, gen_opt, /*with_grid=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_opt);
    if (sweep->parsed()) return cmd_sweep(sweep_opt);
    if (oracle->parsed()) return cmd_oracle(oracle_opt);
    if (gen->parsed()) return cmd_gen(gen_opt);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
