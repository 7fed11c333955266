#include "llb/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "llb/error.hpp"

namespace llb {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config '" + path + "': " + what);
}

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.count(key) == 0) fail(prefix.empty() ? key : prefix + "." + key, "unknown key");
  }
}

const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  return v;
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::size_t get_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected a non-negative integer");
  const auto x = v.get<long long>();
  if (x < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

template <std::size_t N>
std::array<double, N> get_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != N) fail(path, "expected an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = get_number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

constexpr const char* kParamKeys[] = {"gamma", "alpha", "beta1", "beta2", "sigma", "kappa", "mu", "lambda", "e"};

void apply_params(const json& obj, LlbParams& p, bool require_all) {
  require_object(obj, "params");
  reject_unknown(obj, "params", {std::begin(kParamKeys), std::end(kParamKeys)});
  if (require_all) {
    for (const char* key : kParamKeys) {
      if (!obj.contains(key)) fail(std::string("params.") + key, "missing (required without a preset)");
    }
  }
  auto scalar = [&](const char* key, double& dst) {
    if (obj.contains(key)) dst = get_number(obj.at(key), std::string("params.") + key);
  };
  scalar("gamma", p.gamma);
  scalar("alpha", p.alpha);
  scalar("beta1", p.beta1);
  scalar("beta2", p.beta2);
  scalar("sigma", p.sigma);
  scalar("kappa", p.kappa);
  scalar("mu", p.mu);
  scalar("lambda", p.lambda);
  if (obj.contains("e")) p.e = get_vector<3>(obj.at("e"), "params.e");
}

void apply_current(const json& obj, CurrentField& c) {
  require_object(obj, "current");
  reject_unknown(obj, "current", {"kind", "vector", "amplitude"});
  if (obj.contains("kind")) {
    const std::string kind = get_string(obj.at("kind"), "current.kind");
    if (kind == "zero") {
      c = CurrentField::zero();
    } else if (kind == "constant") {
      c.kind = CurrentField::Kind::constant;
    } else if (kind == "bump") {
      c.kind = CurrentField::Kind::bump;
    } else {
      fail("current.kind", "expected one of zero, constant, bump");
    }
  }
  if (obj.contains("vector")) c.vector = get_vector<2>(obj.at("vector"), "current.vector");
  if (obj.contains("amplitude")) c.amplitude = get_number(obj.at("amplitude"), "current.amplitude");
  if (c.kind != CurrentField::Kind::constant) c.vector = {0.0, 0.0};
  if (c.kind != CurrentField::Kind::bump) c.amplitude = 0.0;
}

void apply_initial(const json& obj, InitialDataSpec& init) {
  require_object(obj, "initial");
  reject_unknown(obj, "initial", {"preset", "constant"});
  if (obj.contains("preset")) {
    const auto preset = parse_initial_preset(get_string(obj.at("preset"), "initial.preset"));
    if (!preset) fail("initial.preset", "expected one of bubble, vortex, vortex_lifted, custom_constant");
    init.preset = *preset;
  }
  if (obj.contains("constant")) init.constant = get_vector<3>(obj.at("constant"), "initial.constant");
  if (init.preset != InitialDataSpec::Preset::custom_constant) init.constant = {0.0, 0.0, 0.0};
}

void apply_domain(const json& obj, Rect& r) {
  require_object(obj, "domain");
  reject_unknown(obj, "domain", {"x_min", "x_max", "y_min", "y_max"});
  if (obj.contains("x_min")) r.x_min = get_number(obj.at("x_min"), "domain.x_min");
  if (obj.contains("x_max")) r.x_max = get_number(obj.at("x_max"), "domain.x_max");
  if (obj.contains("y_min")) r.y_min = get_number(obj.at("y_min"), "domain.y_min");
  if (obj.contains("y_max")) r.y_max = get_number(obj.at("y_max"), "domain.y_max");
}

void apply_solver(const json& obj, SimulationConfig& c) {
  require_object(obj, "solver");
  reject_unknown(obj, "solver", {"mass_tol", "step_tol", "step_max_iter", "step_precond", "step_solver", "fp_tol",
                            "fp_max_iter"});
  if (obj.contains("mass_tol")) c.mass_tol = get_number(obj.at("mass_tol"), "solver.mass_tol");
  if (obj.contains("step_tol")) c.step_tol = get_number(obj.at("step_tol"), "solver.step_tol");
  if (obj.contains("step_max_iter")) c.step_max_iter = get_count(obj.at("step_max_iter"), "solver.step_max_iter");
  if (obj.contains("step_precond")) {
    const std::string name = get_string(obj.at("step_precond"), "solver.step_precond");
    if (name == "none") {
      c.step_precond = Preconditioner::none;
    } else if (name == "jacobi") {
      c.step_precond = Preconditioner::jacobi;
    } else if (name == "block_jacobi3") {
      c.step_precond = Preconditioner::block_jacobi3;
    } else if (name == "ilu0") {
      c.step_precond = Preconditioner::ilu0;
    } else {
      fail("solver.step_precond", "expected one of none, jacobi, block_jacobi3, ilu0");
    }
  }
  if (obj.contains("step_solver")) {
    const std::string name = get_string(obj.at("step_solver"), "solver.step_solver");
    if (name == "bicgstab") {
      c.step_solver = StepSolver::bicgstab;
    } else if (name == "banded_lu") {
      c.step_solver = StepSolver::banded_lu;
    } else {
      fail("solver.step_solver", "expected bicgstab or banded_lu");
    }
  }
  if (obj.contains("fp_tol")) c.fp_tol = get_number(obj.at("fp_tol"), "solver.fp_tol");
  if (obj.contains("fp_max_iter")) c.fp_max_iter = get_count(obj.at("fp_max_iter"), "solver.fp_max_iter");
}

void apply_flags(const json& obj, SimulationConfig& c) {
  require_object(obj, "flags");
  reject_unknown(obj, "flags", {"include_anisotropy_in_iterate", "lumped_mass", "validate_current_boundary"});
  if (obj.contains("include_anisotropy_in_iterate")) {
    c.include_anisotropy_in_iterate =
        get_bool(obj.at("include_anisotropy_in_iterate"), "flags.include_anisotropy_in_iterate");
  }
  if (obj.contains("lumped_mass")) c.lumped_mass = get_bool(obj.at("lumped_mass"), "flags.lumped_mass");
  if (obj.contains("validate_current_boundary")) {
    c.validate_current_boundary = get_bool(obj.at("validate_current_boundary"), "flags.validate_current_boundary");
  }
}

}  // namespace

std::string_view to_string(Scheme scheme) { return scheme == Scheme::linear ? "linear" : "nonlinear"; }

std::string_view to_string(Preconditioner precond) {
  switch (precond) {
    case Preconditioner::none:
      return "none";
    case Preconditioner::jacobi:
      return "jacobi";
    case Preconditioner::block_jacobi3:
      return "block_jacobi3";
    case Preconditioner::ilu0:
      return "ilu0";
  }
  return "jacobi";
}

std::string_view to_string(StepSolver solver) {
  return solver == StepSolver::bicgstab ? "bicgstab" : "banded_lu";
}

std::size_t SimulationConfig::num_steps() const {
  if (!(k > 0.0) || !(final_time > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(final_time / k * (1.0 + 1e-12)));
}

SimulationConfig validate(SimulationConfig c, std::vector<std::string>* warnings) {
  if (c.mesh_divisions < 1) fail("mesh_divisions", "must be >= 1");
  if (!(c.k > 0.0) || !std::isfinite(c.k)) fail("k", "must be positive");
  if (!(c.final_time >= 0.0) || !std::isfinite(c.final_time)) fail("T", "must be >= 0");
  if (!(c.bounds.width() > 0.0) || !(c.bounds.height() > 0.0)) fail("domain", "must have positive width and height");
  for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
    if (!(c.snapshot_times[i] >= 0.0)) fail("snapshot_times[" + std::to_string(i) + "]", "must be >= 0");
  }
  if (!(c.mass_tol > 0.0)) fail("solver.mass_tol", "must be positive");
  if (!(c.step_tol > 0.0)) fail("solver.step_tol", "must be positive");
  if (!(c.fp_tol > 0.0)) fail("solver.fp_tol", "must be positive");
  if (c.fp_max_iter < 1) fail("solver.fp_max_iter", "must be >= 1");
  if (c.step_max_iter < 1) fail("solver.step_max_iter", "must be >= 1");
  if (c.current.kind == CurrentField::Kind::constant && !(std::isfinite(c.current.vector[0]) && std::isfinite(c.current.vector[1]))) {
    fail("current.vector", "must be finite");
  }
  try {
    c.params = validated(c.params, warnings);
  } catch (const ConfigError& e) {
    fail("params", e.what());
  }
  if (c.scheme == Scheme::nonlinear && c.params.beta2 != 0.0) {
    fail("params.beta2", "the nonlinear scheme requires beta2 = 0");
  }
  return c;
}

SimulationConfig parse_config(std::string_view text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("<root>", "expected a JSON object");
  reject_unknown(doc, "", {"preset", "scheme", "mesh_divisions", "domain", "params", "current", "initial", "k", "T",
                           "snapshot_times", "solver", "flags", "out_dir"});

  SimulationConfig c;
  const bool has_preset = doc.contains("preset");
  if (has_preset) {
    const std::string name = get_string(doc.at("preset"), "preset");
    const auto preset = experiment_preset(name);
    if (!preset) fail("preset", "unknown preset '" + name + "' (expected sim1, sim2, sim3 or sim4)");
    c.preset = name;
    c.params = preset->params;
    c.current = preset->current;
    c.initial = preset->initial;
    c.k = preset->k;
    c.final_time = preset->final_time;
  } else {
    if (!doc.contains("params")) fail("<root>", "missing required \"preset\" or explicit \"params\" block");
    for (const char* key : {"initial", "k", "T"}) {
      if (!doc.contains(key)) fail(key, "missing (required without a preset)");
    }
  }

  if (doc.contains("scheme")) {
    const std::string s = get_string(doc.at("scheme"), "scheme");
    if (s == "linear") {
      c.scheme = Scheme::linear;
    } else if (s == "nonlinear") {
      c.scheme = Scheme::nonlinear;
    } else {
      fail("scheme", "expected \"linear\" or \"nonlinear\"");
    }
  }
  if (doc.contains("mesh_divisions")) c.mesh_divisions = get_count(doc.at("mesh_divisions"), "mesh_divisions");
  if (doc.contains("domain")) apply_domain(doc.at("domain"), c.bounds);
  if (doc.contains("params")) apply_params(doc.at("params"), c.params, !has_preset);
  if (doc.contains("current")) apply_current(doc.at("current"), c.current);
  if (doc.contains("initial")) apply_initial(doc.at("initial"), c.initial);
  if (doc.contains("k")) c.k = get_number(doc.at("k"), "k");
  if (doc.contains("T")) c.final_time = get_number(doc.at("T"), "T");
  if (doc.contains("snapshot_times")) {
    const json& arr = doc.at("snapshot_times");
    if (!arr.is_array()) fail("snapshot_times", "expected an array of numbers");
    c.snapshot_times.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      c.snapshot_times.push_back(get_number(arr[i], "snapshot_times[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("solver")) apply_solver(doc.at("solver"), c);
  if (doc.contains("flags")) apply_flags(doc.at("flags"), c);
  if (doc.contains("out_dir")) c.out_dir = get_string(doc.at("out_dir"), "out_dir");
  return validate(std::move(c), warnings);
}

std::string to_json(const SimulationConfig& c) {
  json doc;
  if (!c.preset.empty()) doc["preset"] = c.preset;
  doc["scheme"] = std::string(to_string(c.scheme));
  doc["mesh_divisions"] = c.mesh_divisions;
  doc["domain"] = {{"x_min", c.bounds.x_min}, {"x_max", c.bounds.x_max}, {"y_min", c.bounds.y_min}, {"y_max", c.bounds.y_max}};
  const auto& p = c.params;
  doc["params"] = {{"gamma", p.gamma}, {"alpha", p.alpha}, {"beta1", p.beta1}, {"beta2", p.beta2},
                   {"sigma", p.sigma}, {"kappa", p.kappa}, {"mu", p.mu},       {"lambda", p.lambda},
                   {"e", {p.e[0], p.e[1], p.e[2]}}};
  json current = {{"kind", std::string(to_string(c.current.kind))}};
  if (c.current.kind == CurrentField::Kind::constant) current["vector"] = {c.current.vector[0], c.current.vector[1]};
  if (c.current.kind == CurrentField::Kind::bump) current["amplitude"] = c.current.amplitude;
  doc["current"] = current;
  json initial = {{"preset", std::string(to_string(c.initial.preset))}};
  if (c.initial.preset == InitialDataSpec::Preset::custom_constant) {
    initial["constant"] = {c.initial.constant[0], c.initial.constant[1], c.initial.constant[2]};
  }
  doc["initial"] = initial;
  doc["k"] = c.k;
  doc["T"] = c.final_time;
  doc["snapshot_times"] = c.snapshot_times;
  doc["solver"] = {{"mass_tol", c.mass_tol},
                   {"step_tol", c.step_tol},
                   {"step_max_iter", c.step_max_iter},
                   {"step_precond", std::string(to_string(c.step_precond))},
                   {"step_solver", std::string(to_string(c.step_solver))},
                   {"fp_tol", c.fp_tol},
                   {"fp_max_iter", c.fp_max_iter}};
  doc["flags"] = {{"include_anisotropy_in_iterate", c.include_anisotropy_in_iterate},
                  {"lumped_mass", c.lumped_mass},
                  {"validate_current_boundary", c.validate_current_boundary}};
  doc["out_dir"] = c.out_dir;
  return doc.dump(2) + "\n";
}

SimulationConfig load_config(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), warnings);
}

}  // namespace llb
