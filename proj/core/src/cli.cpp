#include "llb/cli.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "llb/config.hpp"
#include "llb/error.hpp"
#include "llb/harness.hpp"
#include "llb/output.hpp"
#include "llb/schemes.hpp"

namespace llb {
namespace {

namespace fs = std::filesystem;

struct Args {
  std::string config;
  std::string out_dir;
  std::string mode = "spatial";
  std::size_t levels = 3;
  bool strict = false;
};

int report_error(std::ostream& err, int code, const std::string& msg) {
  err << "ERROR " << code << ": " << msg << '\n';
  return code;
}

SimulationConfig load_with_warnings(const Args& a, std::ostream& err) {
  std::vector<std::string> warnings;
  SimulationConfig c = load_config(a.config, &warnings);
  for (const auto& w : warnings) err << "WARNING: " << w << '\n';
  return c;
}

std::string resolve_out_dir(const Args& a, const SimulationConfig& c) {
  std::string dir = !a.out_dir.empty() ? a.out_dir : (!c.out_dir.empty() ? c.out_dir : std::string("."));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void print_run_warnings(const SimulationResult& r, std::ostream& err) {
  for (const auto& w : r.warnings) err << "WARNING: " << w << '\n';
}

int cmd_check(const Args& a, std::ostream& out, std::ostream& err) {
  const SimulationConfig c = load_with_warnings(a, err);
  if (!c.current.is_zero()) {
    const BoundaryCompatReport rep = check_boundary_compat(c.current, build_structured(c.mesh_divisions, c.bounds));
    if (!rep.compatible) err << "WARNING: " << rep.message << '\n';
  }
  out << "OK scheme=" << to_string(c.scheme) << " m=" << c.mesh_divisions << " k=" << c.k << " T=" << c.final_time
      << " steps=" << c.num_steps() << '\n';
  return kExitOk;
}

int cmd_run(const Args& a, std::ostream& out, std::ostream& err) {
  SimulationConfig c = load_with_warnings(a, err);
  const std::string dir = resolve_out_dir(a, c);
  c.out_dir = dir;
  const SimulationResult r = run_simulation(c);
  print_run_warnings(r, err);
  write_text_file(join(dir, "resolved_config.json"), to_json(c));
  write_energy_csv(r.trace, join(dir, "energy.csv"));
  for (const auto& s : r.snapshots) write_vtk_snapshot(r.space->mesh(), s.field, join(dir, snapshot_filename(s.requested_time)));
  out << "steps " << (r.trace.size() - 1) << " final_time " << r.trace.rows().back().time << " energy "
      << r.trace.rows().back().energy.total << '\n';
  if (r.status != RunStatus::completed) return report_error(err, kExitSolver, r.reason);
  if (a.strict && c.scheme == Scheme::nonlinear && c.current.is_zero()) {
    const DissipationReport d = dissipation_check(r.trace, dissipation_tolerance(r.trace));
    if (d.violations > 0) {
      return report_error(err, kExitDissipation,
                          "energy increased at " + std::to_string(d.violations) + " step(s), first at step " +
                              std::to_string(d.steps.front()));
    }
  }
  return kExitOk;
}

int cmd_rates(const Args& a, std::ostream& out, std::ostream& err) {
  if (a.levels < 3) {
    return report_error(err, kExitConfig, "--levels must be >= 3 (got " + std::to_string(a.levels) + ")");
  }
  const SimulationConfig c = load_with_warnings(a, err);
  RateTable table;
  if (a.mode == "spatial") {
    table = spatial_rate_study(c, a.levels);
  } else if (a.mode == "temporal-l2") {
    table = temporal_rate_study(c, TemporalMode::l2_coupled, a.levels);
  } else if (a.mode == "temporal-h1") {
    table = temporal_rate_study(c, TemporalMode::h1_coupled, a.levels);
  } else {
    return report_error(err, kExitConfig, "--mode must be spatial, temporal-l2 or temporal-h1");
  }
  const std::string dir = resolve_out_dir(a, c);
  const std::string csv = rate_table_csv(table);
  write_text_file(join(dir, "rates.csv"), csv);
  out << csv;
  if (!table.complete) return report_error(err, kExitSolver, table.failure_reason);
  return kExitOk;
}

int cmd_decay(const Args& a, std::ostream& out, std::ostream& err) {
  SimulationConfig c = load_with_warnings(a, err);
  if (!c.current.is_zero()) return report_error(err, kExitConfig, "decay requires a zero current density");
  const std::string dir = resolve_out_dir(a, c);
  c.out_dir = dir;
  const SimulationResult r = run_simulation(c);
  print_run_warnings(r, err);
  write_energy_csv(r.trace, join(dir, "energy.csv"));
  if (r.status != RunStatus::completed) return report_error(err, kExitSolver, r.reason);
  const DecayReport rep = decay_fit(r.trace, c.params);
  const std::string text = decay_report_text(rep);
  write_text_file(join(dir, "decay_report.txt"), text);
  out << text;
  return kExitOk;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-element solver for the LLB equation with spin torques"};
  app.require_subcommand(1);
  Args a;

  auto* run = app.add_subcommand("run", "Run one simulation");
  run->add_option("--config", a.config, "JSON config file")->required();
  run->add_option("--out-dir", a.out_dir, "Output directory");
  run->add_flag("--strict", a.strict, "Fail with exit 3 on energy increase in a zero-current nonlinear run");

  auto* rates = app.add_subcommand("rates", "Extrapolated convergence-rate study");
  rates->add_option("--config", a.config, "JSON config file")->required();
  rates->add_option("--mode", a.mode, "spatial, temporal-l2 or temporal-h1");
  rates->add_option("--levels", a.levels, "Number of meshes (>= 3)")->required();
  rates->add_option("--out-dir", a.out_dir, "Output directory");

  auto* decay = app.add_subcommand("decay", "Energy decay fit for a zero-current run");
  decay->add_option("--config", a.config, "JSON config file")->required();
  decay->add_option("--out-dir", a.out_dir, "Output directory");

  auto* check = app.add_subcommand("check", "Validate a config and report warnings");
  check->add_option("--config", a.config, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report_error(err, kExitConfig, e.what());
  }

  try {
    if (run->parsed()) return cmd_run(a, out, err);
    if (rates->parsed()) return cmd_rates(a, out, err);
    if (decay->parsed()) return cmd_decay(a, out, err);
    return cmd_check(a, out, err);
  } catch (const ConfigError& e) {
    return report_error(err, kExitConfig, e.what());
  } catch (const IoError& e) {
    return report_error(err, kExitConfig, e.what());
  } catch (const SolverError& e) {
    return report_error(err, kExitSolver, e.what());
  } catch (const FixedPointError& e) {
    return report_error(err, kExitSolver, e.what());
  } catch (const Error& e) {
    return report_error(err, kExitSolver, e.what());
  }
}

}  // namespace llb
