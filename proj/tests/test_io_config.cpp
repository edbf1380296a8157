#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "nullflow/config.hpp"
#include "nullflow/errors.hpp"
#include "nullflow/expr.hpp"
#include "nullflow/snapshot.hpp"

using namespace nullflow;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
  for (const std::string& d : e.details()) {
    if (d.find(needle) != std::string::npos) return true;
  }
  return false;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_SUITE("io_config") {

TEST_CASE("expression language evaluates the documented grammar") {
  CHECK(AngularExpr::parse("3").eval(0.7, 1.1) == 3.0);
  CHECK(AngularExpr::parse("3 + 0.3*cos(theta)").eval(0.0, 0.0) == doctest::Approx(3.3));
  CHECK(AngularExpr::parse("3 + 0.3*cos(theta)").eval(M_PI / 2, 0.0) ==
        doctest::Approx(3.0));
  CHECK(AngularExpr::parse("1 + 2*3").eval(0, 0) == 7.0);      // product binds tighter
  CHECK(AngularExpr::parse("(1 + 2)*3").eval(0, 0) == 9.0);
  CHECK(AngularExpr::parse("theta*phi").eval(0.5, 2.0) == 1.0);
  CHECK(AngularExpr::parse("sin(theta)*sin(theta) + cos(theta)*cos(theta)").eval(0.9, 0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(AngularExpr::parse("cos(sin(phi))").eval(0, 0.3) ==
        doctest::Approx(std::cos(std::sin(0.3))));
  CHECK(AngularExpr::parse("2 + -0.5*cos(phi)").eval(0, 0) == doctest::Approx(1.5));
  CHECK(AngularExpr::parse("-2").eval(0, 0) == -2.0);
  CHECK(AngularExpr::parse("1e-3 * 2").eval(0, 0) == doctest::Approx(2e-3));

  SphereGrid grid = SphereGrid::axisymmetric(8);
  ScalarField f = AngularExpr::parse("2 + 0.1*cos(theta)").evaluate(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(f[i] == 2.0 + 0.1 * std::cos(grid.theta(i)));
  }
}

TEST_CASE("expression language rejects what it does not speak") {
  CHECK_THROWS_AS((void)AngularExpr::parse(""), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("3 +"), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("3 - 1"), FormatError);   // no subtraction
  CHECK_THROWS_AS((void)AngularExpr::parse("3 / 2"), FormatError);   // no division
  CHECK_THROWS_AS((void)AngularExpr::parse("cos theta"), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("cos(theta"), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("tan(theta)"), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("x + 1"), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("(1 + 2"), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("1 2"), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("- cos(theta)"), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("inf"), FormatError);
  CHECK_THROWS_AS((void)AngularExpr::parse("3..5"), FormatError);
}

TEST_CASE("snapshot files round-trip bit for bit") {
  SphereGrid grid = SphereGrid::full(6, 8);
  ScalarField f = ScalarField::from_function(
      grid, [](double t, double p) { return 2.0 + std::sin(t) * std::cos(3.0 * p) / 7.0; });
  FlowSnapshot snap{f, 1.0 / 3.0, 0.0173456789012345};

  const std::string path = "snapshot_roundtrip_test.txt";
  write_snapshot(snap, path);
  FlowSnapshot back = read_snapshot(path);
  std::remove(path.c_str());

  CHECK(back.omega.grid() == grid);
  CHECK(back.time == snap.time);            // bit-exact, not approximate
  CHECK(back.step_hint == snap.step_hint);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(back.omega[i] == f[i]);
  }
}

TEST_CASE("snapshot reader rejects malformed files") {
  const std::string path = "snapshot_bad_test.txt";

  CHECK_THROWS_AS((void)read_snapshot("no_such_snapshot_file.txt"), FormatError);

  write_text(path, "wrong magic\n");
  CHECK_THROWS_AS((void)read_snapshot(path), FormatError);

  write_text(path, "nullflow-snapshot 1\ngrid sideways 4 1\n");
  CHECK_THROWS_AS((void)read_snapshot(path), FormatError);

  write_text(path, "nullflow-snapshot 1\ngrid axisymmetric 4 1\ntime 0x1p+0\n"
                   "step-hint 0x0p+0\nnodes 7\n");
  CHECK_THROWS_AS((void)read_snapshot(path), FormatError);  // count != grid size

  write_text(path, "nullflow-snapshot 1\ngrid axisymmetric 4 1\ntime 0x1p+0\n"
                   "step-hint 0x0p+0\nnodes 4\n1.0\n2.0\n");
  CHECK_THROWS_AS((void)read_snapshot(path), FormatError);  // truncated data

  write_text(path, "nullflow-snapshot 1\ngrid axisymmetric 4 1\ntime 0x1p+0\n"
                   "step-hint 0x0p+0\nnodes 4\n1.0\npotato\n3.0\n4.0\n");
  CHECK_THROWS_AS((void)read_snapshot(path), FormatError);  // non-numeric node

  std::remove(path.c_str());
}

TEST_CASE("config text parsing: sections, comments, overrides") {
  ConfigKeys keys = parse_config_text(
      "# a comment\n"
      "[grid]\n"
      "n_theta = 32\n"
      "mode = axisymmetric\n"
      "\n"
      "[flow]\n"
      "omega0 = 3 + 0.3*cos(theta)\n"
      "background.extent = 2.5\n");
  CHECK(keys.at("grid.n_theta") == "32");
  CHECK(keys.at("grid.mode") == "axisymmetric");
  CHECK(keys.at("flow.omega0") == "3 + 0.3*cos(theta)");
  CHECK(keys.at("background.extent") == "2.5");  // dotted key ignores the section

  apply_override(keys, "grid.n_theta=64");
  CHECK(keys.at("grid.n_theta") == "64");
  apply_override(keys, "flow.max_time = 12");
  CHECK(keys.at("flow.max_time") == "12");
  CHECK_THROWS_AS(apply_override(keys, "no_dot=3"), FormatError);
  CHECK_THROWS_AS(apply_override(keys, "grid.n_theta"), FormatError);

  CHECK_THROWS_AS((void)parse_config_text("[grid\nn_theta = 4\n"), FormatError);
  CHECK_THROWS_AS((void)parse_config_text("just words\n"), FormatError);
  CHECK_THROWS_AS((void)parse_config_text("[grid]\nn_theta = 4\nn_theta = 8\n"),
                  FormatError);
  CHECK_THROWS_AS((void)parse_config_text("[Grid]\nx = 1\n"), FormatError);
  CHECK_THROWS_AS((void)parse_config_text("orphan = 1\n"), FormatError);
}

TEST_CASE("run config validation aggregates every problem") {
  // Defaults alone make a valid run.
  RunConfig def = make_run_config({});
  CHECK(def.background_model == "schwarzschild");
  CHECK(def.grid_n_theta == 128);
  CHECK(def.flow_eps_mots == 1e-6);

  ConfigKeys bad;
  bad["background.model"] = "kerr";
  bad["gauge.v0"] = "1.5";
  bad["flow.cfl"] = "0";
  bad["flow.omega0"] = "3 -";
  bad["foliation.width"] = "0.2";  // not < collar/2
  bad["grid.n_theta"] = "two";
  bad["output.dir"] = "";
  bad["mystery.key"] = "1";
  try {
    (void)make_run_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.details().size() == 8);
    CHECK(mentions(e, "background.model"));
    CHECK(mentions(e, "gauge.v0"));
    CHECK(mentions(e, "flow.cfl"));
    CHECK(mentions(e, "flow.omega0"));
    CHECK(mentions(e, "foliation.width"));
    CHECK(mentions(e, "grid.n_theta"));
    CHECK(mentions(e, "output.dir"));
    CHECK(mentions(e, "mystery.key"));
    CHECK(std::string(e.what()).find("8 problems") != std::string::npos);
  }

  ConfigKeys twice;
  twice["flow.omega0"] = "3";
  twice["flow.omega0_path"] = "some.snap";
  CHECK_THROWS_AS((void)make_run_config(twice), ConfigError);

  ConfigKeys full_odd;
  full_odd["grid.mode"] = "full";
  full_odd["grid.n_phi"] = "7";
  CHECK_THROWS_AS((void)make_run_config(full_odd), ConfigError);

  ConfigKeys axi_phi;
  axi_phi["grid.n_phi"] = "4";
  CHECK_THROWS_AS((void)make_run_config(axi_phi), ConfigError);

  ConfigKeys file_no_path;
  file_no_path["background.model"] = "file";
  CHECK_THROWS_AS((void)make_run_config(file_no_path), ConfigError);
}

TEST_CASE("canonical dump is idempotent and fingerprints track content") {
  RunConfig def = make_run_config({});
  std::string dump = canonical_dump(def);

  // Reparsing the dump reproduces the dump: the canonical form is a fixpoint.
  RunConfig back = make_run_config(parse_config_text(dump));
  CHECK(canonical_dump(back) == dump);

  // Keys arrive sorted, one per line.
  std::istringstream lines(dump);
  std::string prev, line;
  std::size_t n_lines = 0;
  while (std::getline(lines, line)) {
    ++n_lines;
    std::string key = line.substr(0, line.find(" = "));
    CHECK(prev < key);
    prev = key;
  }
  CHECK(n_lines == 28);

  std::string fp = config_fingerprint(def);
  CHECK(fp.size() == 16);
  CHECK(fp.find_first_not_of("0123456789abcdef") == std::string::npos);

  // Same effective content, different spelling -> same fingerprint.
  ConfigKeys spelled;
  spelled["grid.n_theta"] = "128";
  CHECK(config_fingerprint(make_run_config(spelled)) == fp);

  // Different content -> different fingerprint.
  ConfigKeys changed;
  changed["grid.n_theta"] = "64";
  CHECK(config_fingerprint(make_run_config(changed)) != fp);
}

TEST_CASE("builders assemble the configured run pieces") {
  ConfigKeys keys;
  keys["grid.n_theta"] = "16";
  keys["background.model"] = "minkowski";
  keys["background.extent"] = "2";
  keys["background.slices"] = "51";
  keys["flow.omega0"] = "2 + 0.25*cos(theta)";
  keys["flow.max_time"] = "7";
  keys["flow.cadence"] = "0.5";
  RunConfig c = make_run_config(keys);

  SphereGrid grid = make_grid(c);
  CHECK(grid.n_theta() == 16);
  CHECK(grid.mode() == GridMode::Axisymmetric);

  BackgroundFoliation bg = make_background(c);
  CHECK(bg.grid == grid);
  CHECK(bg.n_slices() == 51);
  CHECK(bg.s_min() == doctest::Approx(1.0));  // the coordinate is the area radius
  CHECK(bg.s_max() == doctest::Approx(3.0));
  CHECK(bg.has_l_side);
  CHECK(bg.trchi[0][0] == doctest::Approx(2.0));  // 2/r at r0 = 1

  ScalarField w0 = make_omega0(c, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(w0[i] == 2.0 + 0.25 * std::cos(grid.theta(i)));
  }

  FlowConfig fc = make_flow_config(c);
  CHECK(fc.max_time == 7.0);
  CHECK(fc.history_every == 0.5);
  CHECK(fc.eps_mots == 1e-6);

  // Snapshot-backed initial surface.
  const std::string path = "omega0_from_file_test.txt";
  write_snapshot({w0, 0.0, 0.0}, path);
  ConfigKeys keys2;
  keys2["grid.n_theta"] = "16";
  keys2["flow.omega0_path"] = path;
  RunConfig c2 = make_run_config(keys2);
  ScalarField w0b = make_omega0(c2, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(w0b[i] == w0[i]);

  // Grid mismatch between snapshot and config is a shape error.
  ConfigKeys keys3;
  keys3["grid.n_theta"] = "32";
  keys3["flow.omega0_path"] = path;
  RunConfig c3 = make_run_config(keys3);
  CHECK_THROWS_AS((void)make_omega0(c3, make_grid(c3)), ShapeError);
  std::remove(path.c_str());

  // Shear-free custom model driven by an expression.
  ConfigKeys keys4;
  keys4["grid.n_theta"] = "8";
  keys4["background.model"] = "shear-free";
  keys4["background.trk0"] = "2 + 0.1*cos(theta)";
  keys4["background.extent"] = "1";
  keys4["background.slices"] = "21";
  RunConfig c4 = make_run_config(keys4);
  BackgroundFoliation sf = make_background(c4);
  CHECK(!sf.has_l_side);
  SphereGrid g8 = make_grid(c4);
  for (std::size_t i = 0; i < g8.size(); ++i) {
    CHECK(sf.trchibar[0][i] == doctest::Approx(2.0 + 0.1 * std::cos(g8.theta(i))));
  }
}

}  // TEST_SUITE
