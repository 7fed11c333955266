#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "llb/config.hpp"
#include "llb/schemes.hpp"

namespace llb {

/// One row per adjacent level pair (h, h/2). Errors are max-over-steps (spatial)
/// or final-time (temporal) norms of u_h - u_{h/2} on the finer mesh. rate0
/// and rate1 compare this row with the previous one (L2 and H1-seminorm).
struct RateRow {
  double inv_h = 0.0;
  double k = 0.0;
  double err_l2 = 0.0;
  double err_h1semi = 0.0;
  std::optional<double> rate0;
  std::optional<double> rate1;
  /// Set when either rate was replaced by the +inf sentinel because an
  /// error was at rounding level.
  bool degenerate = false;
};

struct RateTable {
  std::vector<RateRow> rows;
  /// False when a level run failed; rows then hold the pairs completed so far.
  bool complete = true;
  FailureKind failure = FailureKind::none;
  std::string failure_reason;
};

/// log2(coarse / fine), or +inf when either error is at or below `floor`
/// or the ratio is not finite.
double extrapolated_rate(double err_coarse, double err_fine, double floor = 0.0);

/// Fills rate0/rate1 for rows 1.. from the error columns. Errors at or below
/// `floor` give the +inf sentinel and flag the row.
void compute_rates(RateTable& table, double floor = 0.0);

enum class TemporalMode { l2_coupled, h1_coupled };

/// Runs the base config on m, 2m, ... (levels meshes, m = base.mesh_divisions)
/// with base.k and the same number of steps. Throws ConfigError for levels < 3.
RateTable spatial_rate_study(const SimulationConfig& base, std::size_t levels);

/// As above but with k = T / ceil(T / k_h), k_h = 0.01 h^2 (l2_coupled) or
/// 0.01 h (h1_coupled), h = width / m, T = base.final_time > 0. Errors are
/// compared at the final time only.
RateTable temporal_rate_study(const SimulationConfig& base, TemporalMode mode, std::size_t levels);

/// Time step used by a temporal study on a mesh with m divisions.
double temporal_step(const SimulationConfig& base, TemporalMode mode, std::size_t m);

/// CSV with header inv_h,k,err_l2,err_h1semi,rate0,rate1. Missing rates are
/// empty fields and degenerate ones print as "inf".
std::string rate_table_csv(const RateTable& table);

struct DissipationReport {
  std::size_t violations = 0;
  /// Step indices n with E_n - E_{n-1} > tol_abs.
  std::vector<std::size_t> steps;
  double max_increase = 0.0;
};

DissipationReport dissipation_check(const EnergyTrace& trace, double tol_abs);

/// Slack used by dissipation checks: 1e-12 * max(1, E_0).
double dissipation_tolerance(const EnergyTrace& trace);

struct DecayReport {
  /// Least-squares slope of ln E_total against t over the last 80% of rows.
  double fitted_exponent = 0.0;
  /// Decay rate of the continuous envelope, 2 alpha kappa mu.
  double theory_exponent = 0.0;
  /// Rows with E_total > 1.05 exp(-2 alpha kappa mu t) E_total(0).
  std::size_t envelope_violations = 0;
  std::size_t rows_used = 0;
};

/// Requires at least 10 rows; throws ConfigError otherwise.
DecayReport decay_fit(const EnergyTrace& trace, const LlbParams& params);

std::string decay_report_text(const DecayReport& report);

struct EnergyBalanceReport {
  /// Entry n-1 is the residual of step n.
  std::vector<double> residuals;
  double max_abs = 0.0;
};

/// Per-step residual of the discrete energy balance
///   E_n - E_{n-1} + alpha k |H^n|^2 + k beta1 <(nu.grad) u^{n-1}, H^n>
///   [+ k beta2 <u^n x (nu.grad) u^{n-1}, H^n> for the linear scheme].
/// Needs a run made with RunOptions::store_fields.
EnergyBalanceReport energy_balance_report(const SimulationResult& run, const SimulationConfig& config);

}  // namespace llb
