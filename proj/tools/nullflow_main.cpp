// Command line driver. Dispatches the pipeline stages — background
// construction, gauge building and pointwise checks, the cross-section
// expansion flow, and foliation gluing — from a structured configuration
// file plus flag overrides, writes machine-readable outputs under the
// configured directory together with a manifest, and maps every failure
// onto a stable typed exit code.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nullflow/background.hpp"
#include "nullflow/config.hpp"
#include "nullflow/errors.hpp"
#include "nullflow/field.hpp"
#include "nullflow/flow.hpp"
#include "nullflow/foliation.hpp"
#include "nullflow/gauge.hpp"
#include "nullflow/numerics.hpp"
#include "nullflow/scenarios.hpp"
#include "nullflow/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nullflow;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr const char* kManifestSchema = "nullflow-manifest/1";

/// Stable exit codes, documented in the README.
enum ExitCode : int {
  kOk = 0,           ///< success / every check PASSed
  kCheckFailed = 1,  ///< a verification, check, or scenario reported FAIL
  kUsage = 2,        ///< configuration or command line problem
  kCapability = 3,   ///< the input data lacks a capability the command needs
  kNumerical = 4,    ///< a numerical stage terminated before its goal
  kBadData = 5,      ///< malformed input file or unwritable output
  kInternal = 70,    ///< unexpected internal failure
};

struct CliOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_override;
  int verbosity = 1;  ///< 0 = verdicts only, 1 = normal, 2 = verbose
};

void say(const CliOptions& cli, int level, const std::string& line) {
  if (cli.verbosity >= level) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
  }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Error classification: one place decides exit code and category label.

struct ErrorClass {
  int code;
  const char* category;
};

ErrorClass classify(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return {kUsage, "config"};
  if (dynamic_cast<const CapabilityError*>(&e)) return {kCapability, "capability"};
  if (dynamic_cast<const PreconditionError*>(&e)) return {kNumerical, "precondition"};
  if (dynamic_cast<const ExitedDomainError*>(&e)) return {kNumerical, "exited-domain"};
  if (dynamic_cast<const FocalPointError*>(&e)) return {kNumerical, "focal-point"};
  if (dynamic_cast<const StiffnessError*>(&e)) return {kNumerical, "stiffness"};
  if (dynamic_cast<const NotANullConeError*>(&e)) return {kNumerical, "not-a-null-cone"};
  if (dynamic_cast<const DefinitenessError*>(&e)) return {kNumerical, "definiteness"};
  if (dynamic_cast<const ReparametrizationError*>(&e)) return {kNumerical, "reparametrization"};
  if (dynamic_cast<const ResolutionError*>(&e)) return {kUsage, "resolution"};
  if (dynamic_cast<const DomainError*>(&e)) return {kUsage, "domain"};
  if (dynamic_cast<const ShapeError*>(&e)) return {kBadData, "shape"};
  if (dynamic_cast<const FormatError*>(&e)) return {kBadData, "format"};
  return {kInternal, "error"};
}

void print_error(const Error& e) {
  const ErrorClass c = classify(e);
  std::fprintf(stderr, "nullflow: %s error: %s\n", c.category, e.what());
  if (const auto* cfg = dynamic_cast<const ConfigError*>(&e)) {
    for (const auto& d : cfg->details()) std::fprintf(stderr, "  - %s\n", d.c_str());
  }
  std::fflush(stderr);
}

/// First few offending node indices plus the total, kept small in reports.
json node_sample(const std::vector<std::size_t>& nodes) {
  json j = json::object();
  j["count"] = nodes.size();
  json first = json::array();
  for (std::size_t i = 0; i < nodes.size() && i < 32; ++i) first.push_back(nodes[i]);
  j["first"] = std::move(first);
  return j;
}

// ---------------------------------------------------------------------------
// Manifest: every writing command leaves manifest.json next to its outputs.

std::string iso_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Manifest {
public:
  Manifest(std::string command, const RunConfig& config) {
    j_["schema"] = kManifestSchema;
    j_["command"] = std::move(command);
    j_["config_hash"] = config_fingerprint(config);
    j_["config"] = canonical_dump(config);
    j_["versions"] = json{{"nullflow", kToolVersion}, {"config_schema", 1}};
    j_["outputs"] = json::array();
    j_["result"] = json::object();
  }

  void add_output(const std::string& name) { j_["outputs"].push_back(name); }
  json& result() { return j_["result"]; }

  void write(const fs::path& dir) {
    j_["written_at"] = iso_utc_now();
    const fs::path path = dir / "manifest.json";
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out << j_.dump(2) << '\n';
    if (!out) throw FormatError("failed writing " + path.string());
  }

private:
  json j_ = json::object();
};

// ---------------------------------------------------------------------------
// Tab-separated report writers (doubles via the shortest round-trip form).

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_out(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw FormatError("failed writing " + path.string());
}

void write_series_tsv(const fs::path& path, const std::vector<FlowStepRow>& series,
                      double t_offset) {
  std::ofstream out = open_out(path);
  out << "t\tdt\tmax_abs_trchi\tmin_trchi\tmax_u\tomega_min\tomega_max\tmax_increase\n";
  for (const FlowStepRow& row : series) {
    out << format_double(t_offset + row.t) << '\t' << format_double(row.dt) << '\t'
        << format_double(row.max_abs_trchi) << '\t' << format_double(row.min_trchi) << '\t'
        << format_double(row.max_u) << '\t' << format_double(row.omega_min) << '\t'
        << format_double(row.omega_max) << '\t' << format_double(row.max_increase) << '\n';
  }
  finish_out(out, path);
}

void write_slack_tsv(const fs::path& path, const SlackReport& report) {
  std::ofstream out = open_out(path);
  out << "coord\tmin_slack\n";
  for (std::size_t k = 0; k < report.coord.size(); ++k) {
    out << format_double(report.coord[k]) << '\t' << format_double(report.min_slack_slice[k])
        << '\n';
  }
  finish_out(out, path);
}

void write_gauge_tsv(const fs::path& path, const GaugeProfile& g) {
  std::ofstream out = open_out(path);
  out << "lambda\ta_min\ta_max\tkappa_min\tkappa_max\tv_min\tv_max\ts_min\ts_max\n";
  for (std::size_t k = 0; k < g.lambda.n; ++k) {
    out << format_double(g.lambda.at(k)) << '\t' << format_double(g.a[k].min()) << '\t'
        << format_double(g.a[k].max()) << '\t' << format_double(g.kappa[k].min()) << '\t'
        << format_double(g.kappa[k].max()) << '\t' << format_double(g.v[k].min()) << '\t'
        << format_double(g.v[k].max()) << '\t' << format_double(g.s[k].min()) << '\t'
        << format_double(g.s[k].max()) << '\n';
  }
  finish_out(out, path);
}

// ---------------------------------------------------------------------------
// Shared command plumbing.

struct Run {
  CliOptions cli;
  RunConfig config;
  fs::path out;
};

Run load_run(const CliOptions& cli) {
  Run r{cli, load_run_config(cli.config_path, cli.overrides), {}};
  if (!cli.out_override.empty()) r.config.output_dir = cli.out_override;
  r.out = r.config.output_dir;
  std::error_code ec;
  fs::create_directories(r.out, ec);
  if (ec) {
    throw FormatError("cannot create output directory " + r.out.string() + ": " + ec.message());
  }
  say(cli, 2, "config " + config_fingerprint(r.config) + ", outputs under " + r.out.string());
  return r;
}

struct FlowStart {
  ScalarField omega0;
  double t0 = 0.0;
  bool resumed = false;
};

/// Initial surface, start time, and (for resumed runs) flow-config edits:
/// the remaining time budget and, unless the user fixed a step, the stored
/// step hint so the continuation walks the original step lattice.
FlowStart prepare_start(const RunConfig& config, const SphereGrid& grid, FlowConfig& fc) {
  if (config.flow_resume_from.empty()) {
    return FlowStart{make_omega0(config, grid), 0.0, false};
  }
  FlowSnapshot snap = read_snapshot(config.flow_resume_from);
  if (snap.omega.grid() != grid) {
    throw ShapeError("resume snapshot lattice does not match the configured grid");
  }
  const double remaining = config.flow_max_time - snap.time;
  if (remaining <= 0.0) {
    throw ConfigError("flow.max_time must exceed the snapshot time for a resumed run",
                      {"snapshot time " + format_double(snap.time) + " >= flow.max_time " +
                       format_double(config.flow_max_time)});
  }
  fc.max_time = remaining;
  if (fc.dt_fixed == 0.0 && snap.step_hint > 0.0) fc.dt_fixed = snap.step_hint;
  return FlowStart{std::move(snap.omega), snap.time, true};
}

std::string range_text(double lo, double hi) {
  return "[" + format_double(lo) + ", " + format_double(hi) + "]";
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_propagate_background(const CliOptions& cli) {
  Run r = load_run(cli);
  BackgroundFoliation bg = make_background(r.config);
  bg.validate();

  Manifest man("propagate-background", r.config);
  write_background(bg, (r.out / "background.tsv").string());
  man.add_output("background.tsv");
  json& res = man.result();
  res["model"] = r.config.background_model;
  res["slices"] = bg.n_slices();
  res["coord_min"] = bg.s_min();
  res["coord_max"] = bg.s_max();
  res["affine"] = bg.affine;
  res["l_side"] = bg.has_l_side;
  res["grid"] = json{{"mode", to_string(bg.grid.mode())},
                     {"n_theta", bg.grid.n_theta()},
                     {"n_phi", bg.grid.n_phi()}};
  if (bg.has_l_side) res["trapped_level"] = bg.trapped_level();
  man.write(r.out);

  say(cli, 0, "background: " + std::to_string(bg.n_slices()) + " slices on " +
                  range_text(bg.s_min(), bg.s_max()) + " -> background.tsv");
  return kOk;
}

int cmd_build_gauge(const CliOptions& cli) {
  Run r = load_run(cli);
  BackgroundFoliation bg = make_background(r.config);
  GaugeProfile g = construct_gauge(bg, r.config.gauge_v0);

  Manifest man("build-gauge", r.config);
  write_gauge_tsv(r.out / "gauge_profile.tsv", g);
  man.add_output("gauge_profile.tsv");
  json& res = man.result();
  res["v0"] = g.v0;
  res["slices"] = g.lambda.n;
  res["a_final_min"] = g.a.back().min();
  res["a_final_max"] = g.a.back().max();
  res["s_final_min"] = g.s.back().min();
  res["s_final_max"] = g.s.back().max();
  man.write(r.out);

  say(cli, 0, "gauge profile: a(end) in " + range_text(g.a.back().min(), g.a.back().max()) +
                  ", s(end) in " + range_text(g.s.back().min(), g.s.back().max()) +
                  " -> gauge_profile.tsv");
  return kOk;
}

int run_slack_check(const CliOptions& cli, const char* command, const char* label,
                    const char* table_name) {
  Run r = load_run(cli);
  BackgroundFoliation bg = make_background(r.config);

  SlackReport report;
  Manifest man(command, r.config);
  json& res = man.result();
  if (std::string(command) == "check-gauge") {
    GaugeProfile g = construct_gauge(bg, r.config.gauge_v0);
    report = check_gauge_condition(bg, g, r.config.check_gauge_tolerance);
    res["v0"] = g.v0;
  } else {
    report = check_energy_condition(bg, r.config.check_energy_tolerance);
  }
  write_slack_tsv(r.out / table_name, report);
  man.add_output(table_name);
  res["pass"] = report.pass;
  res["min_slack"] = report.min_slack;
  res["tolerance"] = report.tolerance;
  man.write(r.out);

  say(cli, 0, std::string(report.pass ? "PASS" : "FAIL") + ": " + label + " min slack " +
                  format_double(report.min_slack) + " (tolerance " +
                  format_double(report.tolerance) + ") -> " + table_name);
  return report.pass ? kOk : kCheckFailed;
}

int cmd_run_flow(const CliOptions& cli) {
  Run r = load_run(cli);
  Manifest man("run-flow", r.config);
  BackgroundFoliation bg = make_background(r.config);
  const SphereGrid grid = make_grid(r.config);
  FlowConfig fc = make_flow_config(r.config);
  FlowStart start = prepare_start(r.config, grid, fc);
  if (start.resumed) {
    say(cli, 1, "resuming from t = " + format_double(start.t0) + ", budget " +
                    format_double(fc.max_time) + " remaining");
  }

  try {
    FlowResult run = run_to_mots(bg, start.omega0, fc);

    write_series_tsv(r.out / "flow_series.tsv", run.series, start.t0);
    man.add_output("flow_series.tsv");
    const FlowSnapshot snap{run.omega, start.t0 + run.t_end, run.dt_base};
    write_snapshot(snap, (r.out / "omega_final.snap").string());
    man.add_output("omega_final.snap");

    double max_abs_trchi = 0.0;
    for (double e : run.expansion.data()) max_abs_trchi = std::max(max_abs_trchi, std::abs(2.0 * e));

    json& res = man.result();
    res["status"] = to_string(run.status);
    res["stalled"] = run.stalled;
    res["resumed"] = start.resumed;
    res["t_start"] = start.t0;
    res["t_end"] = start.t0 + run.t_end;
    res["steps"] = run.steps;
    res["dt_base"] = run.dt_base;
    res["max_abs_trchi"] = max_abs_trchi;
    res["omega_min"] = run.omega.min();
    res["omega_max"] = run.omega.max();
    man.write(r.out);

    if (run.status == FlowStatus::Converged) {
      say(cli, 0, "MOTS located: t = " + format_double(start.t0 + run.t_end) + " after " +
                      std::to_string(run.steps) + " steps, max |tr chi| = " +
                      format_double(max_abs_trchi) + ", omega in " +
                      range_text(run.omega.min(), run.omega.max()));
      return kOk;
    }
    say(cli, 0, std::string("no MOTS within the time budget") +
                    (run.stalled ? " (progress stalled)" : "") + ": t = " +
                    format_double(start.t0 + run.t_end) + ", max |tr chi| = " +
                    format_double(max_abs_trchi));
    return kNumerical;
  } catch (const Error& e) {
    // The run failed, but the report still records what happened and why.
    const ErrorClass c = classify(e);
    json& res = man.result();
    res["status"] = "error";
    res["error"] = json{{"category", c.category}, {"message", e.what()}};
    if (const auto* p = dynamic_cast<const PreconditionError*>(&e)) {
      res["error"]["nodes"] = node_sample(p->nodes());
    } else if (const auto* x = dynamic_cast<const ExitedDomainError*>(&e)) {
      res["error"]["nodes"] = node_sample(x->nodes());
    }
    man.write(r.out);
    throw;
  }
}

int cmd_glue_foliation(const CliOptions& cli) {
  Run r = load_run(cli);
  if (r.config.flow_cadence <= 0.0) {
    throw ConfigError("glue-foliation needs flow history frames",
                      {"set flow.cadence to a positive frame spacing at most foliation.width (" +
                       format_double(r.config.foliation_width) + ")"});
  }
  if (!r.config.flow_resume_from.empty()) {
    throw ConfigError("glue-foliation always runs the flow from its configured start",
                      {"flow.resume_from is not supported here"});
  }

  BackgroundFoliation bg = make_background(r.config);
  const SphereGrid grid = make_grid(r.config);
  const FlowConfig fc = make_flow_config(r.config);
  const ScalarField omega0 = make_omega0(r.config, grid);
  say(cli, 1, "running the flow to collect history frames every " +
                  format_double(r.config.flow_cadence) + " ...");
  FlowResult run = run_to_mots(bg, omega0, fc);

  FoliationAtlas atlas =
      mollify_glue(run.history, bg, r.config.foliation_level, r.config.foliation_collar,
                   r.config.foliation_width, r.config.foliation_sigma_spacing);
  FoliationReport report = verify_foliation(atlas, bg);

  Manifest man("glue-foliation", r.config);
  write_atlas_summary(atlas, (r.out / "atlas_summary.tsv").string());
  man.add_output("atlas_summary.tsv");
  json& res = man.result();
  res["flow_status"] = to_string(run.status);
  res["leaves"] = atlas.leaf.size();
  res["level"] = atlas.level;
  res["collar"] = atlas.collar;
  res["epsilon"] = atlas.epsilon;
  res["sigma_spacing"] = atlas.sigma.dx;
  res["verified"] = report.verified;
  res["min_dsigma"] = report.min_dsigma;
  res["min_trchi"] = report.min_trchi;
  res["witness_count"] = report.witnesses.size();
  json witnesses = json::array();
  for (std::size_t i = 0; i < report.witnesses.size() && i < 16; ++i) {
    const FoliationWitness& w = report.witnesses[i];
    witnesses.push_back(json{
        {"leaf", w.leaf},
        {"node", w.node},
        {"value", w.value},
        {"check", w.check == FoliationCheck::Monotonicity ? "monotonicity" : "untrapped"}});
  }
  res["witnesses"] = std::move(witnesses);
  man.write(r.out);

  if (report.verified) {
    say(cli, 0, "VERIFIED: " + std::to_string(atlas.leaf.size()) +
                    " leaves, min d(leaf)/d(sigma) = " + format_double(report.min_dsigma) +
                    ", min tr chi = " + format_double(report.min_trchi) +
                    " -> atlas_summary.tsv");
    return kOk;
  }
  say(cli, 0, "NOT VERIFIED: " + std::to_string(report.witnesses.size()) +
                  " witnesses (min d(leaf)/d(sigma) = " + format_double(report.min_dsigma) +
                  ", min tr chi = " + format_double(report.min_trchi) + ")");
  return kCheckFailed;
}

int cmd_verify(const CliOptions& cli) {
  Run r = load_run(cli);
  Manifest man("verify", r.config);
  json stages = json::array();
  bool any_fail = false;
  auto record = [&](const std::string& stage, const std::string& verdict,
                    const std::string& detail) {
    stages.push_back(json{{"stage", stage}, {"verdict", verdict}, {"detail", detail}});
    say(cli, 0, "[" + verdict + "] " + stage + ": " + detail);
    if (verdict == "FAIL") any_fail = true;
  };

  BackgroundFoliation bg = make_background(r.config);
  bg.validate();
  record("background", "PASS", std::to_string(bg.n_slices()) + " slices on " +
                                   range_text(bg.s_min(), bg.s_max()));

  const SlackReport energy = check_energy_condition(bg, r.config.check_energy_tolerance);
  record("energy-condition", energy.pass ? "PASS" : "FAIL",
         "min slack " + format_double(energy.min_slack) + " (tolerance " +
             format_double(energy.tolerance) + ")");

  if (!bg.affine) {
    record("gauge-condition", "SKIP", "background generator is not affine");
  } else {
    const GaugeProfile g = construct_gauge(bg, r.config.gauge_v0);
    const SlackReport gauge = check_gauge_condition(bg, g, r.config.check_gauge_tolerance);
    record("gauge-condition", gauge.pass ? "PASS" : "FAIL",
           "v0 = " + format_double(g.v0) + ", min slack " + format_double(gauge.min_slack) +
               " (tolerance " + format_double(gauge.tolerance) + ")");
  }

  const SphereGrid grid = make_grid(r.config);
  FlowConfig fc = make_flow_config(r.config);
  const FlowStart start = prepare_start(r.config, grid, fc);
  const FlowResult run = run_to_mots(bg, start.omega0, fc);
  const bool converged = run.status == FlowStatus::Converged;
  record("mots-flow", converged ? "PASS" : "FAIL",
         "status " + to_string(run.status) + " at t = " + format_double(start.t0 + run.t_end) +
             " after " + std::to_string(run.steps) + " steps");

  const double w0_min = start.omega0.min();
  const double w0_max = start.omega0.max();
  const bool uniform_at_level = !start.resumed && (w0_max - w0_min) <= 1e-12 &&
                                std::abs(w0_min - r.config.foliation_level) <= 1e-9;
  if (r.config.flow_cadence <= 0.0) {
    record("foliation", "SKIP", "no history frames (flow.cadence = 0)");
  } else if (!uniform_at_level) {
    record("foliation", "SKIP",
           "initial surface is not the uniform junction level " +
               format_double(r.config.foliation_level));
  } else {
    const FoliationAtlas atlas =
        mollify_glue(run.history, bg, r.config.foliation_level, r.config.foliation_collar,
                     r.config.foliation_width, r.config.foliation_sigma_spacing);
    const FoliationReport report = verify_foliation(atlas, bg);
    write_atlas_summary(atlas, (r.out / "atlas_summary.tsv").string());
    man.add_output("atlas_summary.tsv");
    record("foliation", report.verified ? "PASS" : "FAIL",
           std::to_string(atlas.leaf.size()) + " leaves, min d(leaf)/d(sigma) = " +
               format_double(report.min_dsigma) + ", min tr chi = " +
               format_double(report.min_trchi) +
               (report.witnesses.empty()
                    ? ""
                    : ", " + std::to_string(report.witnesses.size()) + " witnesses"));
  }

  man.result()["stages"] = std::move(stages);
  man.result()["passed"] = !any_fail;
  man.write(r.out);
  say(cli, 0, any_fail ? "verify: FAIL" : "verify: PASS");
  return any_fail ? kCheckFailed : kOk;
}

int cmd_reproduce(const CliOptions& cli, const std::string& which) {
  ScenarioContext ctx;
  const std::vector<std::string> names =
      which == "all" ? scenario_names() : std::vector<std::string>{which};
  bool all_passed = true;
  for (const std::string& name : names) {
    const ScenarioOutcome outcome = run_scenario(name, ctx);
    all_passed = all_passed && outcome.passed;
    const std::string notes = join(outcome.notes, "; ");
    say(cli, 0, std::string(outcome.passed ? "[PASS] " : "[FAIL] ") + outcome.name +
                    (notes.empty() ? "" : " — " + notes));
  }
  return all_passed ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Cross-section flow toolkit for null hypersurfaces: builds background "
      "geometry tables, constructs and checks generator rescalings, advances "
      "the expansion flow of graphical cross-sections to a marginally outer "
      "trapped surface, and glues the result into a verified foliation."};
  app.set_version_flag("--version", std::string("nullflow ") + kToolVersion);
  app.require_subcommand(1);

  CliOptions cli;
  app.add_option("--config", cli.config_path, "Configuration file (structured key = value text)");
  app.add_option("--set", cli.overrides,
                 "Override one configuration key, e.g. --set flow.cfl=0.1 (repeatable)")
      ->type_name("KEY=VALUE");
  app.add_option("--out", cli.out_override, "Output directory (overrides output.dir)");
  CLI::Option* quiet = app.add_flag("--quiet", "Print only verdict lines");
  CLI::Option* verbose = app.add_flag("--verbose", "Print extra progress detail");

  CLI::App* c_background = app.add_subcommand(
      "propagate-background", "Build or transport the background table and write it");
  CLI::App* c_build_gauge =
      app.add_subcommand("build-gauge", "Construct the generator rescaling profile");
  CLI::App* c_check_gauge = app.add_subcommand(
      "check-gauge", "Check the rescaled focusing inequality (PASS/FAIL exit status)");
  CLI::App* c_check_energy = app.add_subcommand(
      "check-energy", "Check the generator-side energy inequality (PASS/FAIL exit status)");
  CLI::App* c_run_flow = app.add_subcommand(
      "run-flow", "Advance the cross-section flow to a MOTS (or the time budget)");
  CLI::App* c_glue = app.add_subcommand(
      "glue-foliation", "Run the flow, glue it to the outer table, and verify the foliation");
  CLI::App* c_verify = app.add_subcommand(
      "verify", "Full pipeline: background, checks, flow, and foliation verification");
  CLI::App* c_reproduce =
      app.add_subcommand("reproduce", "Run acceptance scenarios and report PASS/FAIL");
  std::string scenario = "all";
  c_reproduce->add_option("scenario", scenario, "Scenario name, or 'all'");

  for (CLI::App* sub : {c_background, c_build_gauge, c_check_gauge, c_check_energy, c_run_flow,
                        c_glue, c_verify, c_reproduce}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (quiet->count() > 0) cli.verbosity = 0;
  if (verbose->count() > 0) cli.verbosity = 2;

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "propagate-background") return cmd_propagate_background(cli);
    if (name == "build-gauge") return cmd_build_gauge(cli);
    if (name == "check-gauge") {
      return run_slack_check(cli, "check-gauge", "rescaled focusing budget", "gauge_check.tsv");
    }
    if (name == "check-energy") {
      return run_slack_check(cli, "check-energy", "generator energy budget", "energy_check.tsv");
    }
    if (name == "run-flow") return cmd_run_flow(cli);
    if (name == "glue-foliation") return cmd_glue_foliation(cli);
    if (name == "verify") return cmd_verify(cli);
    if (name == "reproduce") return cmd_reproduce(cli, scenario);
    std::fprintf(stderr, "nullflow: unhandled subcommand %s\n", name.c_str());
    return kInternal;
  } catch (const Error& e) {
    print_error(e);
    return classify(e).code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "nullflow: internal error: %s\n", e.what());
    return kInternal;
  }
}
