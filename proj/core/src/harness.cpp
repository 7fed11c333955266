#include "llb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "llb/error.hpp"
#include "llb/format.hpp"

namespace llb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Errors below this multiple of the solution size are treated as rounding noise.
constexpr double kRelativeErrorFloor = 1e-12;

struct LevelRun {
  std::size_t m = 0;
  double k = 0.0;
  std::shared_ptr<const FeSpace> space;
  std::vector<NodalField> fields;
  double max_l2 = 0.0;
};

LevelRun run_level(SimulationConfig config, bool keep_all_steps, RateTable& table) {
  LevelRun level;
  level.m = config.mesh_divisions;
  level.k = config.k;
  RunOptions opts;
  opts.store_fields = keep_all_steps;
  SimulationResult r = run_simulation(config, opts);
  if (r.status != RunStatus::completed) {
    table.complete = false;
    table.failure = r.failure;
    table.failure_reason = "level m=" + std::to_string(level.m) + ": " + r.reason;
    return level;
  }
  level.space = r.space;
  if (keep_all_steps) {
    level.fields = std::move(r.fields);
  } else {
    level.fields.push_back(std::move(r.final_field));
  }
  for (const auto& row : r.trace.rows()) level.max_l2 = std::max(level.max_l2, row.l2_norm);
  return level;
}

/// Max over the shared entries of the norms of prolongate(coarse) - fine.
std::pair<double, double> level_difference(const LevelRun& coarse, const LevelRun& fine) {
  const std::size_t n = std::min(coarse.fields.size(), fine.fields.size());
  double e0 = 0.0;
  double e1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const NodalField up = prolongate(coarse.space->mesh(), fine.space->mesh(), coarse.fields[i]);
    const FieldNorms nrm = norms(*fine.space, up - fine.fields[i]);
    e0 = std::max(e0, nrm.l2);
    e1 = std::max(e1, nrm.h1_semi);
  }
  return {e0, e1};
}

RateTable run_study(const SimulationConfig& base, std::size_t levels, bool spatial,
                    const std::function<double(std::size_t)>& step_for) {
  if (levels < 3) throw ConfigError("rate study: levels must be >= 3 (got " + std::to_string(levels) + ")");
  const SimulationConfig checked = validate(base);
  if (!spatial && !(checked.final_time > 0.0)) throw ConfigError("temporal rate study: T must be positive");
  RateTable table;
  double scale = 0.0;
  LevelRun prev;
  for (std::size_t l = 0; l < levels; ++l) {
    SimulationConfig c = checked;
    c.mesh_divisions = checked.mesh_divisions << l;
    c.k = step_for(c.mesh_divisions);
    c.snapshot_times.clear();
    if (spatial) c.final_time = static_cast<double>(checked.num_steps()) * c.k;
    LevelRun cur = run_level(c, spatial, table);
    if (!table.complete) break;
    scale = std::max(scale, cur.max_l2);
    if (l > 0) {
      const auto [e0, e1] = level_difference(prev, cur);
      RateRow row;
      row.inv_h = static_cast<double>(prev.m) / checked.bounds.width();
      row.k = prev.k;
      row.err_l2 = e0;
      row.err_h1semi = e1;
      table.rows.push_back(row);
    }
    prev = std::move(cur);
  }
  compute_rates(table, kRelativeErrorFloor * std::max(1.0, scale));
  return table;
}

}  // namespace

double extrapolated_rate(double err_coarse, double err_fine, double floor) {
  if (!(err_coarse > floor) || !(err_fine > floor)) return kInf;
  const double r = std::log2(err_coarse / err_fine);
  return std::isfinite(r) ? r : kInf;
}

void compute_rates(RateTable& table, double floor) {
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    RateRow& row = table.rows[i];
    row.degenerate = !(row.err_l2 > floor) || !(row.err_h1semi > floor);
    if (i == 0) {
      row.rate0.reset();
      row.rate1.reset();
      continue;
    }
    const RateRow& p = table.rows[i - 1];
    row.rate0 = extrapolated_rate(p.err_l2, row.err_l2, floor);
    row.rate1 = extrapolated_rate(p.err_h1semi, row.err_h1semi, floor);
    if (std::isinf(*row.rate0) || std::isinf(*row.rate1)) row.degenerate = true;
  }
}

RateTable spatial_rate_study(const SimulationConfig& base, std::size_t levels) {
  return run_study(base, levels, true, [&](std::size_t) { return base.k; });
}

double temporal_step(const SimulationConfig& base, TemporalMode mode, std::size_t m) {
  const double h = base.bounds.width() / static_cast<double>(m);
  const double target = mode == TemporalMode::l2_coupled ? 0.01 * h * h : 0.01 * h;
  const double steps = std::ceil(base.final_time / target * (1.0 - 1e-12));
  return base.final_time / std::max(1.0, steps);
}

RateTable temporal_rate_study(const SimulationConfig& base, TemporalMode mode, std::size_t levels) {
  return run_study(base, levels, false, [&](std::size_t m) { return temporal_step(base, mode, m); });
}

std::string rate_table_csv(const RateTable& table) {
  std::ostringstream os;
  os << "inv_h,k,err_l2,err_h1semi,rate0,rate1\n";
  for (const auto& r : table.rows) {
    os << format_real(r.inv_h) << ',' << format_real(r.k) << ',' << format_real(r.err_l2) << ','
       << format_real(r.err_h1semi) << ',' << (r.rate0 ? format_real(*r.rate0) : "") << ','
       << (r.rate1 ? format_real(*r.rate1) : "") << '\n';
  }
  return os.str();
}

double dissipation_tolerance(const EnergyTrace& trace) {
  return 1e-12 * std::max(1.0, trace.empty() ? 0.0 : trace[0].energy.total);
}

DissipationReport dissipation_check(const EnergyTrace& trace, double tol_abs) {
  DissipationReport rep;
  for (std::size_t n = 1; n < trace.size(); ++n) {
    const double inc = trace[n].energy.total - trace[n - 1].energy.total;
    rep.max_increase = std::max(rep.max_increase, inc);
    if (inc > tol_abs) {
      ++rep.violations;
      rep.steps.push_back(trace[n].step);
    }
  }
  return rep;
}

DecayReport decay_fit(const EnergyTrace& trace, const LlbParams& params) {
  if (trace.size() < 10) throw ConfigError("decay_fit: need at least 10 trace rows");
  DecayReport rep;
  const double rate = 2.0 * params.alpha * params.kappa * params.mu;
  rep.theory_exponent = rate;
  const double e0 = trace[0].energy.total;
  for (const auto& row : trace.rows()) {
    if (row.energy.total > 1.05 * std::exp(-rate * row.time) * e0) ++rep.envelope_violations;
  }
  const std::size_t n = trace.size();
  const std::size_t first = n - static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(n)));
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t used = 0;
  for (std::size_t i = first; i < n; ++i) {
    const double e = trace[i].energy.total;
    if (!(e > 0.0)) continue;
    const double t = trace[i].time;
    const double y = std::log(e);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++used;
  }
  rep.rows_used = used;
  const double un = static_cast<double>(used);
  const double denom = un * stt - st * st;
  if (used < 2 || !(denom > 0.0)) throw ConfigError("decay_fit: not enough positive-energy rows to fit");
  rep.fitted_exponent = (un * sty - st * sy) / denom;
  return rep;
}

std::string decay_report_text(const DecayReport& r) {
  std::ostringstream os;
  os << "fitted_exponent " << format_real(r.fitted_exponent) << '\n'
     << "theory_exponent " << format_real(r.theory_exponent) << '\n'
     << "theory_bound " << format_real(-r.theory_exponent) << '\n'
     << "envelope_violations " << r.envelope_violations << '\n'
     << "rows_used " << r.rows_used << '\n';
  return os.str();
}

EnergyBalanceReport energy_balance_report(const SimulationResult& run, const SimulationConfig& config) {
  if (!run.space) throw ConfigError("energy_balance_report: run has no finite-element space");
  if (run.fields.size() != run.trace.size()) {
    throw ConfigError("energy_balance_report: run must store every step field (RunOptions::store_fields)");
  }
  const FeSpace& space = *run.space;
  const LlbParams& p = config.params;
  const double k = config.k;
  const QuadratureRule& rule = space.rule();
  EnergyBalanceReport rep;
  for (std::size_t n = 1; n < run.fields.size(); ++n) {
    const NodalField& u_prev = run.fields[n - 1];
    const NodalField& u = run.fields[n];
    const double t_n = run.trace[n].time;
    const NodalField h = compute_discrete_field_H(space, p, u, true);
    double res = run.trace[n].energy.total - run.trace[n - 1].energy.total;
    res += p.alpha * k * l2_inner(space, h, h);
    res += k * dot(assemble_d_rhs(space, p, u_prev, config.current, t_n), h.raw());
    if (config.scheme == Scheme::linear && p.beta2 != 0.0 && !config.current.is_zero()) {
      double work = 0.0;
      for (std::size_t tri = 0; tri < space.mesh().num_triangles(); ++tri) {
        const auto g = space.gradient(u_prev, tri);
        double local = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const Vec2 nu = config.current.eval(space.position(tri, rule.points[q]), t_n);
          const Vec3 conv{nu[0] * g[0][0] + nu[1] * g[0][1], nu[0] * g[1][0] + nu[1] * g[1][1],
                          nu[0] * g[2][0] + nu[1] * g[2][1]};
          const Vec3 torque = cross(space.eval(u, tri, rule.points[q]), conv);
          local += rule.weights[q] * dot(torque, space.eval(h, tri, rule.points[q]));
        }
        work += space.geometry()[tri].area * local;
      }
      res += k * p.beta2 * work;
    }
    rep.residuals.push_back(res);
    rep.max_abs = std::max(rep.max_abs, std::abs(res));
  }
  return rep;
}

}  // namespace llb
