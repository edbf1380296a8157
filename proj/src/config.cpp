#include "nullflow/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nullflow/errors.hpp"
#include "nullflow/expr.hpp"
#include "nullflow/numerics.hpp"
#include "nullflow/snapshot.hpp"

namespace nullflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key_part(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::islower(static_cast<unsigned char>(c)) &&
        !std::isdigit(static_cast<unsigned char>(c)) && c != '_') {
      return false;
    }
  }
  return true;
}

/// Collects validation problems so they can be reported all at once.
class Checker {
public:
  explicit Checker(const ConfigKeys& keys) : keys_(keys) {}

  bool has(const std::string& key) const { return keys_.count(key) != 0; }

  std::string raw(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    auto it = keys_.find(key);
    return it == keys_.end() ? fallback : it->second;
  }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    auto it = keys_.find(key);
    if (it == keys_.end()) return fallback;
    try {
      std::size_t used = 0;
      double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
      return v;
    } catch (const std::exception&) {
      problem(key + ": not a number (got '" + it->second + "')");
      return fallback;
    }
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    seen_.insert(key);
    auto it = keys_.find(key);
    if (it == keys_.end()) return fallback;
    try {
      std::size_t used = 0;
      long long v = std::stoll(it->second, &used);
      if (used != it->second.size() || v < 0) throw std::invalid_argument("bad");
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      problem(key + ": not a nonnegative integer (got '" + it->second + "')");
      return fallback;
    }
  }

  void problem(const std::string& message) { problems_.push_back(message); }

  void finish() {
    for (const auto& [key, value] : keys_) {
      if (!seen_.count(key)) problem("unknown key '" + key + "'");
    }
    if (!problems_.empty()) {
      throw ConfigError("configuration invalid (" + std::to_string(problems_.size()) +
                            " problem" + (problems_.size() == 1 ? "" : "s") + ")",
                        problems_);
    }
  }

private:
  const ConfigKeys& keys_;
  std::set<std::string> seen_;
  std::vector<std::string> problems_;
};

void append_kv(std::string& out, const std::string& key, const std::string& value) {
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

}  // namespace

ConfigKeys parse_config_text(const std::string& text) {
  ConfigKeys keys;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw FormatError("config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_key_part(section)) {
        throw FormatError("config line " + std::to_string(line_no) + ": bad section name '" +
                          section + "'");
      }
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.find('.') == std::string::npos && !section.empty()) {
      key = section + "." + key;
    }
    std::size_t dot = key.find('.');
    if (dot == std::string::npos || !valid_key_part(key.substr(0, dot)) ||
        !valid_key_part(key.substr(dot + 1))) {
      throw FormatError("config line " + std::to_string(line_no) + ": bad key '" + key + "'");
    }
    if (!keys.emplace(key, value).second) {
      throw FormatError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    }
  }
  return keys;
}

ConfigKeys read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("config '" + path + "': cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(ConfigKeys& keys, const std::string& assignment) {
  std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw FormatError("override '" + assignment + "': expected key=value");
  }
  std::string key = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  std::size_t dot = key.find('.');
  if (dot == std::string::npos || !valid_key_part(key.substr(0, dot)) ||
      !valid_key_part(key.substr(dot + 1))) {
    throw FormatError("override '" + assignment + "': bad key '" + key + "'");
  }
  keys[key] = value;
}

RunConfig make_run_config(const ConfigKeys& keys) {
  Checker ck(keys);
  RunConfig c;

  c.background_model = ck.raw("background.model", c.background_model);
  if (c.background_model != "minkowski" && c.background_model != "schwarzschild" &&
      c.background_model != "shear-free" && c.background_model != "file") {
    ck.problem("background.model: expected minkowski|schwarzschild|shear-free|file (got '" +
               c.background_model + "')");
  }
  c.background_mass = ck.number("background.mass", c.background_mass);
  if (c.background_mass <= 0.0) ck.problem("background.mass: must be positive");
  c.background_r0 = ck.number("background.r0", c.background_r0);
  if (c.background_r0 <= 0.0) ck.problem("background.r0: must be positive");
  c.background_extent = ck.number("background.extent", c.background_extent);
  if (c.background_extent <= 0.0) ck.problem("background.extent: must be positive");
  c.background_slices = ck.count("background.slices", c.background_slices);
  if (c.background_slices < 4) ck.problem("background.slices: need at least 4");
  c.background_path = ck.raw("background.path", c.background_path);
  if (c.background_model == "file" && c.background_path.empty()) {
    ck.problem("background.path: required when background.model = file");
  }
  c.background_trk0 = ck.raw("background.trk0", c.background_trk0);
  try {
    (void)AngularExpr::parse(c.background_trk0);
  } catch (const FormatError& e) {
    ck.problem("background.trk0: " + std::string(e.what()));
  }
  c.background_g_kk = ck.number("background.g_kk", c.background_g_kk);
  if (c.background_g_kk < 0.0) ck.problem("background.g_kk: must be nonnegative");

  std::string mode = ck.raw("grid.mode", "axisymmetric");
  if (mode == "axisymmetric") {
    c.grid_mode = GridMode::Axisymmetric;
  } else if (mode == "full") {
    c.grid_mode = GridMode::Full2D;
  } else {
    ck.problem("grid.mode: expected axisymmetric|full (got '" + mode + "')");
  }
  c.grid_n_theta = ck.count("grid.n_theta", c.grid_n_theta);
  if (c.grid_n_theta < 4) ck.problem("grid.n_theta: need at least 4");
  c.grid_n_phi = ck.count("grid.n_phi", c.grid_mode == GridMode::Full2D ? 8 : 1);
  if (c.grid_mode == GridMode::Axisymmetric) {
    if (c.grid_n_phi != 1) ck.problem("grid.n_phi: must be 1 in axisymmetric mode");
  } else {
    if (c.grid_n_phi < 4 || c.grid_n_phi % 2 != 0) {
      ck.problem("grid.n_phi: must be an even count >= 4 in full mode");
    }
  }

  c.gauge_v0 = ck.number("gauge.v0", c.gauge_v0);
  if (!(c.gauge_v0 > 0.0 && c.gauge_v0 < 1.0)) ck.problem("gauge.v0: must lie in (0, 1)");

  c.flow_omega0 = ck.raw("flow.omega0", c.flow_omega0);
  c.flow_omega0_path = ck.raw("flow.omega0_path", c.flow_omega0_path);
  c.flow_resume_from = ck.raw("flow.resume_from", c.flow_resume_from);
  const bool has_expr = ck.has("flow.omega0") && !c.flow_omega0.empty();
  const bool has_path = !c.flow_omega0_path.empty();
  const bool has_resume = !c.flow_resume_from.empty();
  if ((has_expr ? 1 : 0) + (has_path ? 1 : 0) + (has_resume ? 1 : 0) > 1) {
    ck.problem("flow.omega0 / flow.omega0_path / flow.resume_from: set at most one");
  }
  if (has_path || has_resume) {
    c.flow_omega0.clear();  // the file is the single source of the surface
  } else {
    try {
      (void)AngularExpr::parse(c.flow_omega0);
    } catch (const FormatError& e) {
      ck.problem("flow.omega0: " + std::string(e.what()));
    }
  }

  c.flow_eps_mots = ck.number("flow.eps_mots", c.flow_eps_mots);
  if (c.flow_eps_mots <= 0.0) ck.problem("flow.eps_mots: must be positive");
  c.flow_cfl = ck.number("flow.cfl", c.flow_cfl);
  if (!(c.flow_cfl > 0.0 && c.flow_cfl <= 1.0)) ck.problem("flow.cfl: must lie in (0, 1]");
  c.flow_dt_fixed = ck.number("flow.dt_fixed", c.flow_dt_fixed);
  if (c.flow_dt_fixed < 0.0) ck.problem("flow.dt_fixed: must be nonnegative");
  c.flow_dt_min = ck.number("flow.dt_min", c.flow_dt_min);
  if (c.flow_dt_min <= 0.0) ck.problem("flow.dt_min: must be positive");
  c.flow_max_time = ck.number("flow.max_time", c.flow_max_time);
  if (c.flow_max_time <= 0.0) ck.problem("flow.max_time: must be positive");
  c.flow_cadence = ck.number("flow.cadence", c.flow_cadence);
  if (c.flow_cadence < 0.0) ck.problem("flow.cadence: must be nonnegative");

  c.foliation_level = ck.number("foliation.level", c.foliation_level);
  c.foliation_collar = ck.number("foliation.collar", c.foliation_collar);
  if (c.foliation_collar <= 0.0) ck.problem("foliation.collar: must be positive");
  c.foliation_width = ck.number("foliation.width", c.foliation_width);
  if (c.foliation_width <= 0.0) {
    ck.problem("foliation.width: must be positive");
  } else if (c.foliation_collar > 0.0 && c.foliation_width >= c.foliation_collar / 2.0) {
    ck.problem("foliation.width: must be less than half the collar");
  }
  c.foliation_sigma_spacing = ck.number("foliation.sigma_spacing", c.foliation_sigma_spacing);
  if (c.foliation_sigma_spacing <= 0.0) ck.problem("foliation.sigma_spacing: must be positive");

  c.check_gauge_tolerance = ck.number("check.gauge_tolerance", c.check_gauge_tolerance);
  if (c.check_gauge_tolerance < 0.0) ck.problem("check.gauge_tolerance: must be nonnegative");
  c.check_energy_tolerance = ck.number("check.energy_tolerance", c.check_energy_tolerance);
  if (c.check_energy_tolerance < 0.0) ck.problem("check.energy_tolerance: must be nonnegative");

  c.output_dir = ck.raw("output.dir", c.output_dir);
  if (c.output_dir.empty()) ck.problem("output.dir: must not be empty");

  ck.finish();
  return c;
}

std::string canonical_dump(const RunConfig& c) {
  // Keys emitted in sorted order (the literals below are already sorted).
  std::string out;
  append_kv(out, "background.extent", format_double(c.background_extent));
  append_kv(out, "background.g_kk", format_double(c.background_g_kk));
  append_kv(out, "background.mass", format_double(c.background_mass));
  append_kv(out, "background.model", c.background_model);
  append_kv(out, "background.path", c.background_path);
  append_kv(out, "background.r0", format_double(c.background_r0));
  append_kv(out, "background.slices", std::to_string(c.background_slices));
  append_kv(out, "background.trk0", c.background_trk0);
  append_kv(out, "check.energy_tolerance", format_double(c.check_energy_tolerance));
  append_kv(out, "check.gauge_tolerance", format_double(c.check_gauge_tolerance));
  append_kv(out, "flow.cadence", format_double(c.flow_cadence));
  append_kv(out, "flow.cfl", format_double(c.flow_cfl));
  append_kv(out, "flow.dt_fixed", format_double(c.flow_dt_fixed));
  append_kv(out, "flow.dt_min", format_double(c.flow_dt_min));
  append_kv(out, "flow.eps_mots", format_double(c.flow_eps_mots));
  append_kv(out, "flow.max_time", format_double(c.flow_max_time));
  append_kv(out, "flow.omega0", c.flow_omega0);
  append_kv(out, "flow.omega0_path", c.flow_omega0_path);
  append_kv(out, "flow.resume_from", c.flow_resume_from);
  append_kv(out, "foliation.collar", format_double(c.foliation_collar));
  append_kv(out, "foliation.level", format_double(c.foliation_level));
  append_kv(out, "foliation.sigma_spacing", format_double(c.foliation_sigma_spacing));
  append_kv(out, "foliation.width", format_double(c.foliation_width));
  append_kv(out, "gauge.v0", format_double(c.gauge_v0));
  append_kv(out, "grid.mode", to_string(c.grid_mode));
  append_kv(out, "grid.n_phi", std::to_string(c.grid_n_phi));
  append_kv(out, "grid.n_theta", std::to_string(c.grid_n_theta));
  append_kv(out, "output.dir", c.output_dir);
  return out;
}

std::string config_fingerprint(const RunConfig& config) {
  std::uint64_t h = fnv1a64(canonical_dump(config));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  ConfigKeys keys = path.empty() ? ConfigKeys{} : read_config_file(path);
  for (const std::string& assignment : overrides) apply_override(keys, assignment);
  return make_run_config(keys);
}

SphereGrid make_grid(const RunConfig& config) {
  return SphereGrid(config.grid_mode, config.grid_n_theta, config.grid_n_phi);
}

BackgroundFoliation make_background(const RunConfig& config) {
  if (config.background_model == "file") {
    return read_background(config.background_path);
  }
  SphereGrid grid = make_grid(config);
  if (config.background_model == "minkowski") {
    return build_analytic(MinkowskiCone{config.background_r0}, grid, config.background_extent,
                          config.background_slices);
  }
  if (config.background_model == "schwarzschild") {
    return build_analytic(SchwarzschildCone{config.background_mass, config.background_r0}, grid,
                          config.background_extent, config.background_slices);
  }
  AngularExpr trk0 = AngularExpr::parse(config.background_trk0);
  ShearFreeCustom model;
  model.trk0 = [trk0](double theta, double phi) { return trk0.eval(theta, phi); };
  model.g_kk = config.background_g_kk;
  return build_analytic(model, grid, config.background_extent, config.background_slices);
}

ScalarField make_omega0(const RunConfig& config, const SphereGrid& grid) {
  if (!config.flow_omega0_path.empty()) {
    FlowSnapshot snap = read_snapshot(config.flow_omega0_path);
    if (snap.omega.grid() != grid) {
      throw ShapeError("initial surface snapshot '" + config.flow_omega0_path +
                       "' is on a different lattice than the configured grid");
    }
    return snap.omega;
  }
  return AngularExpr::parse(config.flow_omega0).evaluate(grid);
}

FlowConfig make_flow_config(const RunConfig& config) {
  FlowConfig fc;
  fc.eps_mots = config.flow_eps_mots;
  fc.cfl = config.flow_cfl;
  fc.dt_fixed = config.flow_dt_fixed;
  fc.dt_min = config.flow_dt_min;
  fc.max_time = config.flow_max_time;
  fc.history_every = config.flow_cadence;
  return fc;
}

}  // namespace nullflow
