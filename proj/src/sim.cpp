#include "dlasso/sim.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "dlasso/csv.hpp"
#include "dlasso/debias.hpp"
#include "dlasso/errors.hpp"
#include "dlasso/inference.hpp"
#include "dlasso/lasso.hpp"
#include "dlasso/model.hpp"
#include "dlasso/noise.hpp"
#include "dlasso/parallel.hpp"
#include "dlasso/stats.hpp"

namespace dlasso {

std::string to_string(SimMethod m) {
  return m == SimMethod::jm ? "jm" : "nodewise";
}

SimMethod sim_method_from_string(const std::string& s) {
  if (s == "jm") return SimMethod::jm;
  if (s == "nodewise") return SimMethod::nodewise;
  throw ParseError("unknown method '" + s + "' (expected jm or nodewise)");
}

void SimConfig::validate() const {
  if (n < 2) throw ArgumentError("SimConfig: n must be >= 2");
  if (p <= 11) throw ArgumentError("SimConfig: p must exceed 11 (circulant)");
  if (s0 < 0 || s0 > p) throw ArgumentError("SimConfig: need 0 <= s0 <= p");
  if (realizations < 1) throw ArgumentError("SimConfig: realizations >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("SimConfig: alpha must lie in (0,1)");
  }
  if (!(sigma > 0.0)) throw ArgumentError("SimConfig: sigma must be > 0");
  if (!(lambda_c > 0.0)) throw ArgumentError("SimConfig: lambda_c must be > 0");
  if (mu && !(*mu > 0.0)) throw ArgumentError("SimConfig: mu must be > 0");
  if (!(nodewise_scale > 0.0)) {
    throw ArgumentError("SimConfig: nodewise_scale must be > 0");
  }
}

namespace {

struct RepOutcome {
  Vector width;              // per-coordinate interval length
  std::vector<char> covered;
  std::vector<char> reject;
  double sigma_hat = 0.0;
  double kkt = 0.0;
};

struct DesignBundle {
  Matrix X;
  SampleCovariance cov;
  DebiasMatrix M;
  Vector omega_diag;
  double mu_used = 0.0;
};

DesignBundle prepare_design(const SimConfig& config, std::uint64_t seed,
                            int threads) {
  DesignBundle bundle;
  bundle.X =
      sample_design(CovarianceSpec::Circulant(config.p), config.n, seed);
  bundle.cov = sample_covariance(bundle.X);
  if (config.method == SimMethod::jm) {
    const double mu =
        config.mu ? *config.mu : default_mu(config.p, config.n);
    bundle.M = build_debias_matrix(bundle.cov, mu, EscalationPolicy{},
                                   threads);
    bundle.mu_used = bundle.M.mu_target;
  } else {
    bundle.M = build_debias_matrix_nodewise(
        bundle.X, NodewisePolicy{config.nodewise_scale, 0.0}, threads);
    bundle.mu_used = bundle.M.mu_target;
  }
  bundle.omega_diag = (bundle.M.M * bundle.cov.sigma_hat_matrix)
                          .cwiseProduct(bundle.M.M)
                          .rowwise()
                          .sum();
  return bundle;
}

RepOutcome run_realization(const SimConfig& config, const GroundTruth& truth,
                           const DesignBundle& bundle, int rep_index) {
  const int p = config.p;
  const double n = static_cast<double>(config.n);
  const double root_n = std::sqrt(n);

  const Vector w = sample_noise(NoiseSpec::Gaussian(config.sigma), config.n,
                                config.seed + rep_index);
  RegressionProblem prob;
  prob.X = bundle.X;
  prob.Y = bundle.X * truth.theta0 + w;
  prob.sigma_known = config.sigma;

  double sigma_hat;
  Vector warm;
  if (config.oracle_sigma) {
    sigma_hat = sigma_oracle_passthrough(prob).sigma_hat;
  } else {
    const ScaledLassoResult scaled = estimate_sigma_scaled_lasso_with_fit(prob);
    if (!scaled.estimate.converged) {
      throw NumericalError("scaled-lasso noise estimate did not converge");
    }
    sigma_hat = scaled.estimate.sigma_hat;
    warm = scaled.fit.theta_hat;
  }

  const double lambda =
      default_lambda(p, config.n, sigma_hat, config.lambda_c);
  const LassoFit fit = fit_lasso(prob, lambda, 1e-8, 100000, warm);
  if (!fit.converged) {
    throw NumericalError("lasso fit did not converge (KKT violation " +
                         format_double(fit.max_kkt_violation) + ")");
  }

  const Vector residual = prob.Y - bundle.X * fit.theta_hat;
  const Vector theta_u =
      fit.theta_hat +
      bundle.M.M * (bundle.X.transpose() * residual) / n;

  const double z_crit = normal_quantile(1.0 - config.alpha / 2.0);

  RepOutcome out;
  out.width.resize(p);
  out.covered.resize(p);
  out.reject.resize(p);
  out.sigma_hat = sigma_hat;
  out.kkt = fit.max_kkt_violation;
  for (int i = 0; i < p; ++i) {
    const double se =
        sigma_hat * std::sqrt(std::max(bundle.omega_diag[i], 0.0) / n);
    const double delta = z_crit * se;
    out.width[i] = 2.0 * delta;
    out.covered[i] = std::abs(truth.theta0[i] - theta_u[i]) <= delta ? 1 : 0;
    const double se_scale =
        sigma_hat * std::sqrt(std::max(bundle.omega_diag[i], 0.0));
    const double pv = se_scale > 0.0
                          ? normal_two_sided_p(root_n * std::abs(theta_u[i]) /
                                               se_scale)
                          : (theta_u[i] != 0.0 ? 0.0 : 1.0);
    out.reject[i] = pv <= config.alpha ? 1 : 0;
  }
  return out;
}

}  // namespace

RunResult run_config_detailed(const SimConfig& config, int threads) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  const GroundTruth truth =
      random_support(config.p, config.s0, config.b, config.seed);

  DesignBundle shared;
  if (!config.redraw_design) {
    shared = prepare_design(config, config.seed, threads);
  }

  const int reps = config.realizations;
  std::vector<RepOutcome> outcomes(reps);
  std::vector<std::string> failures(reps);

  parallel_for(reps, threads, [&](int r) {
    if (config.timeout_sec > 0.0 && elapsed() > config.timeout_sec) {
      failures[r] = "config timeout exceeded";
      return;
    }
    try {
      if (config.redraw_design) {
        const DesignBundle own =
            prepare_design(config, config.seed + (r + 1), 1);
        outcomes[r] = run_realization(config, truth, own, r + 1);
      } else {
        outcomes[r] = run_realization(config, truth, shared, r + 1);
      }
    } catch (const std::exception& e) {
      failures[r] = e.what();
    }
  });

  int done = 0;
  for (int r = 0; r < reps; ++r) {
    if (!failures[r].empty()) {
      throw NumericalError("realization " + std::to_string(r + 1) + " of " +
                           std::to_string(reps) + " failed: " + failures[r]);
    }
    ++done;
  }

  // Aggregate in realization order (independent of scheduling).
  const int p = config.p;
  const int s0 = config.s0;
  std::vector<char> on_support(p, 0);
  for (int i : truth.support) on_support[i] = 1;

  Vector avg_width = Vector::Zero(p);
  std::vector<long> cover_count(p, 0), reject_count(p, 0);
  double sigma_sum = 0.0, max_kkt = 0.0;
  for (int r = 0; r < reps; ++r) {
    avg_width += outcomes[r].width;
    for (int i = 0; i < p; ++i) {
      cover_count[i] += outcomes[r].covered[i];
      reject_count[i] += outcomes[r].reject[i];
    }
    sigma_sum += outcomes[r].sigma_hat;
    max_kkt = std::max(max_kkt, outcomes[r].kkt);
  }
  avg_width /= static_cast<double>(reps);

  double width_s = 0.0, width_sc = 0.0;
  long cover_s = 0, cover_sc = 0, reject_s = 0, reject_sc = 0;
  for (int i = 0; i < p; ++i) {
    if (on_support[i]) {
      width_s += avg_width[i];
      cover_s += cover_count[i];
      reject_s += reject_count[i];
    } else {
      width_sc += avg_width[i];
      cover_sc += cover_count[i];
      reject_sc += reject_count[i];
    }
  }

  const double trials_s = static_cast<double>(s0) * reps;
  const double trials_sc = static_cast<double>(p - s0) * reps;

  RunResult result;
  SimMetrics& m = result.metrics;
  m.ell = (width_s + width_sc) / p;
  m.ell_Sc = p - s0 > 0 ? width_sc / (p - s0) : 0.0;
  m.cov = static_cast<double>(cover_s + cover_sc) / (trials_s + trials_sc);
  m.cov_Sc = trials_sc > 0 ? cover_sc / trials_sc : 0.0;
  m.fp = trials_sc > 0 ? reject_sc / trials_sc : 0.0;
  if (s0 > 0) {
    m.ell_S = width_s / s0;
    m.cov_S = cover_s / trials_s;
    m.tp = reject_s / trials_s;
  }
  m.wall_time = elapsed();

  RunDiagnostics& d = result.diag;
  if (!config.redraw_design) {
    d.mu_used = shared.mu_used;
    d.max_row_slack = shared.M.achieved_slack.maxCoeff();
    d.all_rows_feasible =
        std::all_of(shared.M.feasible.begin(), shared.M.feasible.end(),
                    [](bool f) { return f; });
    d.fallback_identity = shared.M.fallback_identity;
  }
  d.max_kkt_violation = max_kkt;
  d.mean_sigma_hat = sigma_sum / reps;
  d.realizations_done = done;
  return result;
}

SimMetrics run_config(const SimConfig& config, int threads) {
  return run_config_detailed(config, threads).metrics;
}

std::vector<GridRow> run_grid(const std::vector<SimConfig>& configs,
                              int workers) {
  if (configs.empty()) throw ArgumentError("run_grid: empty grid");
  const int count = static_cast<int>(configs.size());
  const int pool = std::max(1, std::min(workers, count));
  const int inner_threads = std::max(1, resolve_threads(0) / pool);

  std::vector<GridRow> rows(count);
  parallel_for(count, pool, [&](int i) {
    rows[i].config = configs[i];
    try {
      rows[i].metrics = run_config(configs[i], inner_threads);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });
  return rows;
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

std::string grid_csv(const std::vector<GridRow>& rows) {
  std::string out = "n,p,s0,b,method,ell,ell_S,ell_Sc,cov,cov_S,cov_Sc,fp,tp\n";
  for (const GridRow& row : rows) {
    const SimConfig& c = row.config;
    out += std::to_string(c.n) + "," + std::to_string(c.p) + "," +
           std::to_string(c.s0) + "," + format_double(c.b) + "," +
           to_string(c.method) + ",";
    if (row.metrics) {
      const SimMetrics& m = *row.metrics;
      out += format_double(m.ell) + "," + opt_cell(m.ell_S) + "," +
             format_double(m.ell_Sc) + "," + format_double(m.cov) + "," +
             opt_cell(m.cov_S) + "," + format_double(m.cov_Sc) + "," +
             format_double(m.fp) + "," + opt_cell(m.tp);
    } else {
      out += ",,,,,,,";
    }
    out += "\n";
  }
  return out;
}

std::string grid_text_table(const std::vector<GridRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(26) << "configuration" << std::right;
  for (const char* col :
       {"ell", "ell_S", "ell_Sc", "cov", "cov_S", "cov_Sc", "fp", "tp"}) {
    out << std::setw(9) << col;
  }
  out << "\n";
  for (const GridRow& row : rows) {
    const SimConfig& c = row.config;
    std::ostringstream label;
    label << "(" << c.n << "," << c.p << "," << c.s0 << "," << c.b << ") "
          << to_string(c.method);
    out << std::left << std::setw(26) << label.str() << std::right;
    if (row.metrics) {
      const SimMetrics& m = *row.metrics;
      auto cell = [&](const std::optional<double>& v) {
        if (v) {
          out << std::setw(9) << std::fixed << std::setprecision(4) << *v;
        } else {
          out << std::setw(9) << "-";
        }
        out.unsetf(std::ios::fixed);
      };
      cell(m.ell);
      cell(m.ell_S);
      cell(m.ell_Sc);
      cell(m.cov);
      cell(m.cov_S);
      cell(m.cov_Sc);
      cell(m.fp);
      cell(m.tp);
      out << "\n";
    } else {
      out << "  FAILED: " << row.error << "\n";
    }
  }
  return out.str();
}

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError("grid: boolean expected for '" + key + "', got '" + value +
                   "'");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<SimConfig> parse_grid(const std::string& content) {
  std::vector<SimConfig> configs;
  std::vector<std::array<bool, 4>> required;  // n, p, s0, b seen

  std::istringstream in(content);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line == "[config]") {
      configs.emplace_back();
      required.push_back({false, false, false, false});
      continue;
    }
    if (configs.empty()) {
      throw ParseError("grid line " + std::to_string(line_no) +
                       ": key before any [config] section");
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("grid line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    SimConfig& c = configs.back();
    auto& seen = required.back();
    try {
      if (key == "n") {
        c.n = std::stoi(value);
        seen[0] = true;
      } else if (key == "p") {
        c.p = std::stoi(value);
        seen[1] = true;
      } else if (key == "s0") {
        c.s0 = std::stoi(value);
        seen[2] = true;
      } else if (key == "b") {
        c.b = std::stod(value);
        seen[3] = true;
      } else if (key == "alpha") {
        c.alpha = std::stod(value);
      } else if (key == "realizations") {
        c.realizations = std::stoi(value);
      } else if (key == "seed") {
        c.seed = std::stoull(value);
      } else if (key == "method") {
        c.method = sim_method_from_string(value);
      } else if (key == "sigma") {
        c.sigma = std::stod(value);
      } else if (key == "redraw_design") {
        c.redraw_design = parse_bool(value, key);
      } else if (key == "oracle_sigma") {
        c.oracle_sigma = parse_bool(value, key);
      } else if (key == "lambda_c") {
        c.lambda_c = std::stod(value);
      } else if (key == "mu") {
        c.mu = std::stod(value);
      } else if (key == "nodewise_scale") {
        c.nodewise_scale = std::stod(value);
      } else if (key == "timeout_sec") {
        c.timeout_sec = std::stod(value);
      } else {
        throw ParseError("grid line " + std::to_string(line_no) +
                         ": unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("grid line " + std::to_string(line_no) +
                       ": bad value for '" + key + "'");
    } catch (const std::out_of_range&) {
      throw ParseError("grid line " + std::to_string(line_no) +
                       ": value out of range for '" + key + "'");
    }
  }
  if (configs.empty()) throw ParseError("grid: no [config] sections");
  for (size_t i = 0; i < configs.size(); ++i) {
    for (int k = 0; k < 4; ++k) {
      if (!required[i][k]) {
        static const char* names[4] = {"n", "p", "s0", "b"};
        throw ParseError("grid config " + std::to_string(i + 1) +
                         ": missing required key '" + names[k] + "'");
      }
    }
    configs[i].validate();
  }
  return configs;
}

std::vector<SimConfig> parse_grid_file(const std::string& path) {
  return parse_grid(read_text_file(path));
}

}  // namespace dlasso
