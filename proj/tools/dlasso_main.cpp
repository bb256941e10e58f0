#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dlasso/csv.hpp"
#include "dlasso/debias.hpp"
#include "dlasso/errors.hpp"
#include "dlasso/inference.hpp"
#include "dlasso/lasso.hpp"
#include "dlasso/model.hpp"
#include "dlasso/noise.hpp"
#include "dlasso/parallel.hpp"
#include "dlasso/report_io.hpp"
#include "dlasso/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;       // parse / usage error
constexpr int kExitDimension = 3;   // dimension mismatch
constexpr int kExitNumerical = 4;   // numerical failure
constexpr int kExitGridFailed = 5;  // simulate: at least one row failed

struct InferArgs {
  std::string x_path;
  std::optional<std::string> y_path;
  std::optional<std::string> y_col;
  double alpha = 0.05;
  std::string method = "jm";
  std::optional<double> mu;
  std::optional<double> lambda;
  double beta = 0.4;
  bool center = true;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;  // accepted for interface stability; the inference
                           // pipeline itself is deterministic
};

// Builds the non-Gaussian debias matrix row by row, with the identity
// fallback when any row is infeasible (same policy as the Gaussian builder).
dlasso::DebiasMatrix build_nongaussian_matrix(
    const dlasso::SampleCovariance& cov, const dlasso::Matrix& X, double mu,
    double beta) {
  const int p = cov.p();
  dlasso::DebiasMatrix M;
  M.M.resize(p, p);
  M.achieved_slack = dlasso::Vector::Zero(p);
  M.feasible.assign(p, false);
  M.mu_target = mu;
  dlasso::parallel_for(p, 0, [&](int i) {
    const dlasso::NonGaussianRow row =
        dlasso::solve_debias_row_nongaussian(cov, X, i, mu, beta);
    M.M.row(i) = row.m.transpose();
    M.achieved_slack[i] = row.slack;
    M.feasible[i] = row.feasible;
  });
  const bool all_ok = std::all_of(M.feasible.begin(), M.feasible.end(),
                                  [](bool f) { return f; });
  if (!all_ok) {
    M.M = dlasso::Matrix::Identity(p, p);
    M.fallback_identity = true;
    std::cerr << "warning: non-Gaussian program infeasible for some rows; "
                 "falling back to the identity debiasing matrix\n";
  }
  return M;
}

int cmd_infer(const InferArgs& args) {
  std::string stage = "reading inputs";
  try {
    dlasso::Dataset data =
        dlasso::load_dataset(args.x_path, args.y_path, args.y_col);
    if (args.center) dlasso::center_dataset(data);

    dlasso::RegressionProblem problem;
    problem.X = std::move(data.X);
    problem.Y = std::move(data.Y);
    problem.validate();

    stage = "noise estimation";
    const dlasso::NoiseEstimate noise =
        dlasso::estimate_sigma_scaled_lasso(problem);

    stage = "lasso fit";
    const double lambda =
        args.lambda ? *args.lambda
                    : dlasso::default_lambda(problem.p(), problem.n(),
                                             noise.sigma_hat);
    const dlasso::LassoFit fit = dlasso::fit_lasso(problem, lambda);
    if (!fit.converged) {
      throw dlasso::NumericalError("lasso did not converge (KKT violation " +
                                   dlasso::format_double(
                                       fit.max_kkt_violation) +
                                   ")");
    }

    stage = "debias matrix";
    const dlasso::SampleCovariance cov = dlasso::sample_covariance(problem.X);
    const double mu =
        args.mu ? *args.mu : dlasso::default_mu(problem.p(), problem.n());
    dlasso::DebiasMatrix M;
    if (args.method == "jm") {
      M = dlasso::build_debias_matrix(cov, mu);
    } else if (args.method == "nodewise") {
      M = dlasso::build_debias_matrix_nodewise(problem.X);
    } else {
      M = build_nongaussian_matrix(cov, problem.X, mu, args.beta);
    }
    if (M.fallback_identity) {
      std::cerr << "warning: debiasing matrix fell back to the identity; "
                   "intervals will be very conservative\n";
    }

    stage = "inference";
    const dlasso::DebiasedEstimate est =
        dlasso::make_debiased_estimate(fit, std::move(M), problem, noise);
    const dlasso::InferenceReport report =
        dlasso::build_report(est, args.alpha, args.method, data.names);

    stage = "writing report";
    const std::string payload = args.format == "json"
                                    ? dlasso::report_to_json(report)
                                    : dlasso::report_to_csv(report);
    dlasso::write_text_file(args.out_path, payload);

    int n_alpha = 0, n_fwer = 0;
    for (const auto& c : report.coords) {
      n_alpha += c.reject ? 1 : 0;
      n_fwer += c.reject_fwer ? 1 : 0;
    }
    std::printf(
        "n=%d p=%d sigma_hat=%.6g lambda=%.6g: %d rejection(s) at "
        "alpha=%g, %d at alpha/p (FWER)\n",
        problem.n(), problem.p(), report.sigma_hat, lambda, n_alpha,
        args.alpha, n_fwer);
    return kExitOk;
  } catch (const dlasso::ParseError& e) {
    std::cerr << "error (" << stage << "): " << e.what() << "\n";
    return kExitUsage;
  } catch (const dlasso::ArgumentError& e) {
    std::cerr << "error (" << stage << "): " << e.what() << "\n";
    return kExitUsage;
  } catch (const dlasso::DimensionError& e) {
    std::cerr << "error (" << stage << "): " << e.what() << "\n";
    return kExitDimension;
  } catch (const dlasso::Error& e) {
    std::cerr << "error (" << stage << "): " << e.what() << "\n";
    return kExitNumerical;
  }
}

struct SimulateArgs {
  std::string grid_path;
  std::string out_dir;
  int workers = 1;
  std::optional<std::string> method;
};

int cmd_simulate(const SimulateArgs& args) {
  std::vector<dlasso::SimConfig> configs;
  try {
    configs = dlasso::parse_grid_file(args.grid_path);
    if (args.method) {
      const dlasso::SimMethod m = dlasso::sim_method_from_string(*args.method);
      for (auto& c : configs) c.method = m;
    }
  } catch (const dlasso::Error& e) {
    std::cerr << "error (grid): " << e.what() << "\n";
    return kExitUsage;
  }

  const std::vector<dlasso::GridRow> rows =
      dlasso::run_grid(configs, args.workers);

  try {
    std::filesystem::create_directories(args.out_dir);
    dlasso::write_text_file(args.out_dir + "/results.csv",
                            dlasso::grid_csv(rows));
    dlasso::write_text_file(args.out_dir + "/results.txt",
                            dlasso::grid_text_table(rows));
  } catch (const std::exception& e) {
    std::cerr << "error (writing results): " << e.what() << "\n";
    return kExitNumerical;
  }

  std::cout << dlasso::grid_text_table(rows);
  int failed = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].metrics) {
      ++failed;
      std::cerr << "row " << i + 1 << " failed: " << rows[i].error << "\n";
    }
  }
  return failed == 0 ? kExitOk : kExitGridFailed;
}

struct PlotArgs {
  std::string report_path;
  std::string kind;
  int top = 10;
  std::string out_path;
};

int cmd_plotdata(const PlotArgs& args) {
  dlasso::InferenceReport report;
  try {
    report = dlasso::report_from_json(dlasso::read_text_file(args.report_path));
  } catch (const dlasso::Error& e) {
    std::cerr << "error (report): " << e.what() << "\n";
    return kExitUsage;
  }

  std::string out;
  if (args.kind == "manhattan") {
    const double p_dim = static_cast<double>(report.coords.size());
    const double threshold = -std::log10(report.alpha / p_dim);
    out = "index,name,neg_log10_p,bonferroni_threshold\n";
    for (const auto& c : report.coords) {
      const double neg_log =
          -std::log10(std::max(c.p_value, 1e-300));  // cap p = 0 at 300
      out += std::to_string(c.index) + "," + c.name + "," +
             dlasso::format_double(neg_log) + "," +
             dlasso::format_double(threshold) + "\n";
    }
  } else {
    std::vector<const dlasso::CoordinateInference*> order;
    order.reserve(report.coords.size());
    for (const auto& c : report.coords) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
      if (a->p_value != b->p_value) return a->p_value < b->p_value;
      return a->index < b->index;
    });
    const size_t take =
        std::min<size_t>(order.size(), static_cast<size_t>(args.top));
    out = "name,estimate,ci_lower,ci_upper\n";
    for (size_t i = 0; i < take; ++i) {
      out += order[i]->name + "," + dlasso::format_double(order[i]->estimate) +
             "," + dlasso::format_double(order[i]->ci_lower) + "," +
             dlasso::format_double(order[i]->ci_upper) + "\n";
    }
  }

  try {
    dlasso::write_text_file(args.out_path, out);
  } catch (const dlasso::Error& e) {
    std::cerr << "error (writing): " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Debiased-LASSO inference toolkit"};
  app.require_subcommand(1);

  auto alpha_validator = CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          const double a = std::stod(s);
          if (a > 0.0 && a < 1.0) return {};
        } catch (...) {
        }
        return "alpha must lie strictly inside (0,1)";
      },
      "ALPHA");

  InferArgs infer;
  std::string y_path_raw, y_col_raw;
  CLI::App* infer_cmd =
      app.add_subcommand("infer", "Debiased-LASSO inference on CSV data");
  infer_cmd->add_option("--x", infer.x_path, "Design matrix CSV")->required();
  auto* y_opt = infer_cmd->add_option("--y", y_path_raw,
                                      "Response CSV (single column)");
  auto* ycol_opt = infer_cmd->add_option(
      "--y-col", y_col_raw, "Response column name inside the --x file");
  y_opt->excludes(ycol_opt);
  infer_cmd->add_option("--alpha", infer.alpha, "Significance level")
      ->check(alpha_validator)
      ->capture_default_str();
  infer_cmd->add_option("--method", infer.method, "Debiasing method")
      ->check(CLI::IsMember({"jm", "nodewise", "nongaussian"}))
      ->capture_default_str();
  infer_cmd->add_option("--mu", infer.mu,
                        "Debias slack target (default 2 sqrt(log p / n))");
  infer_cmd->add_option("--lambda", infer.lambda,
                        "LASSO penalty (default from the noise estimate)");
  infer_cmd->add_option("--beta", infer.beta,
                        "Row-influence exponent for --method nongaussian")
      ->check(CLI::Range(0.25, 0.5))
      ->capture_default_str();
  infer_cmd->add_flag("--center,!--no-center", infer.center,
                      "Center Y and the columns of X (default on)");
  infer_cmd->add_option("--out", infer.out_path, "Report output path")
      ->required();
  infer_cmd->add_option("--format", infer.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  infer_cmd->add_option("--seed", infer.seed, "Seed (reserved)");

  SimulateArgs simulate;
  std::string sim_method_raw;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Run a Monte Carlo configuration grid");
  sim_cmd->add_option("--grid", simulate.grid_path, "Grid file")->required();
  sim_cmd->add_option("--out", simulate.out_dir, "Output directory")
      ->required();
  sim_cmd->add_option("--workers", simulate.workers, "Parallel configurations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--method", sim_method_raw,
                      "Override the method for every row")
      ->check(CLI::IsMember({"jm", "nodewise"}));

  PlotArgs plot;
  CLI::App* plot_cmd =
      app.add_subcommand("plotdata", "Emit plot-ready CSV from a report");
  plot_cmd->add_option("--report", plot.report_path, "JSON report path")
      ->required();
  plot_cmd->add_option("--kind", plot.kind, "Plot kind")
      ->check(CLI::IsMember({"manhattan", "forest"}))
      ->required();
  plot_cmd->add_option("--top", plot.top, "Rows in the forest output")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  plot_cmd->add_option("--out", plot.out_path, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (infer_cmd->parsed()) {
    if (!y_path_raw.empty()) infer.y_path = y_path_raw;
    if (!y_col_raw.empty()) infer.y_col = y_col_raw;
    if (!infer.y_path && !infer.y_col) {
      std::cerr << "error: one of --y / --y-col is required\n";
      return kExitUsage;
    }
    return cmd_infer(infer);
  }
  if (sim_cmd->parsed()) {
    if (!sim_method_raw.empty()) simulate.method = sim_method_raw;
    return cmd_simulate(simulate);
  }
  if (!plot_cmd->parsed()) {
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  }
  return cmd_plotdata(plot);
}
