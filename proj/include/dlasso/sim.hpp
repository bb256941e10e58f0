#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlasso/types.hpp"

namespace dlasso {

enum class SimMethod { jm, nodewise };

std::string to_string(SimMethod m);
SimMethod sim_method_from_string(const std::string& s);

/// One simulation configuration. The design covariance is the circulant
/// matrix of the study (so p > 11). X and theta0 are drawn once from seed;
/// realization r redraws only the noise from stream seed + r, unless
/// redraw_design is set.
struct SimConfig {
  int n = 0;
  int p = 0;
  int s0 = 0;
  double b = 0.0;
  double alpha = 0.05;
  int realizations = 20;
  std::uint64_t seed = 1;
  SimMethod method = SimMethod::jm;
  double sigma = 1.0;
  bool redraw_design = false;
  bool oracle_sigma = false;         // use sigma instead of the estimate
  double lambda_c = 2.0;             // c in lambda = sigma_hat sqrt(c^2 log p / n)
  std::optional<double> mu;          // debias slack; default 2 sqrt(log p / n)
  double nodewise_scale = 0.5;       // nodewise penalty scale
  double timeout_sec = 0.0;          // 0 = no budget guard

  void validate() const;
};

/// Aggregates over realizations: average interval lengths (overall / on the
/// support / off it), empirical coverages, and rejection rates at level
/// alpha off-support (fp) and on-support (tp). Support-restricted fields are
/// absent when s0 = 0.
struct SimMetrics {
  double ell = 0.0;
  std::optional<double> ell_S;
  double ell_Sc = 0.0;
  double cov = 0.0;
  std::optional<double> cov_S;
  double cov_Sc = 0.0;
  double fp = 0.0;
  std::optional<double> tp;
  double wall_time = 0.0;  // seconds
};

/// Solver certificates and run bookkeeping surfaced for acceptance checks.
struct RunDiagnostics {
  double mu_used = 0.0;            // debias mu after any escalation
  double max_row_slack = 0.0;      // max ||Sigma_hat m_i - e_i||_inf over rows
  bool all_rows_feasible = false;
  bool fallback_identity = false;
  double max_kkt_violation = 0.0;  // worst final-fit KKT residual over reps
  double mean_sigma_hat = 0.0;
  int realizations_done = 0;
};

struct RunResult {
  SimMetrics metrics;
  RunDiagnostics diag;
};

/// Full pipeline for one configuration: draw (X, theta0) once, build the
/// debiasing matrix once, then per realization fit, estimate sigma, form
/// intervals / p-values and accumulate the metrics. Any failing realization
/// aborts the configuration with its index. threads = 0 picks hardware
/// concurrency; results do not depend on the thread count.
RunResult run_config_detailed(const SimConfig& config, int threads = 0);
SimMetrics run_config(const SimConfig& config, int threads = 0);

struct GridRow {
  SimConfig config;
  std::optional<SimMetrics> metrics;  // absent on failure
  std::string error;
};

/// Runs configurations on a worker pool; per-config results are a pure
/// function of the config, so outputs are byte-identical for any worker
/// count. Failures are recorded per row and do not stop the grid.
std::vector<GridRow> run_grid(const std::vector<SimConfig>& configs,
                              int workers = 1);

/// CSV columns: n,p,s0,b,method,ell,ell_S,ell_Sc,cov,cov_S,cov_Sc,fp,tp.
/// Absent fields (s0 = 0) are empty; failed rows appear with empty metrics.
std::string grid_csv(const std::vector<GridRow>& rows);

/// Human-readable aligned table of the same rows.
std::string grid_text_table(const std::vector<GridRow>& rows);

/// Grid file: one "[config]" section per row followed by "key = value"
/// lines ('#' comments allowed). Keys: n, p, s0, b (required); alpha,
/// realizations, seed, method, sigma, redraw_design, oracle_sigma, lambda_c,
/// mu, nodewise_scale, timeout_sec (optional). Unknown keys raise ParseError.
std::vector<SimConfig> parse_grid(const std::string& content);
std::vector<SimConfig> parse_grid_file(const std::string& path);

}  // namespace dlasso
