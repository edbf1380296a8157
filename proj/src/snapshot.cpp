#include "nullflow/snapshot.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "nullflow/errors.hpp"

namespace nullflow {

namespace {

constexpr const char* kMagic = "nullflow-snapshot 1";

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw FormatError("snapshot '" + path + "': " + why);
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

std::string read_line(std::FILE* f) {
  std::string line;
  int c;
  while ((c = std::fgetc(f)) != EOF && c != '\n') line.push_back(static_cast<char>(c));
  if (c == EOF && line.empty()) return {};
  return line;
}

double parse_hex_double(const std::string& path, const std::string& token) {
  const char* s = token.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0') bad(path, "malformed number '" + token + "'");
  return v;
}

}  // namespace

void write_snapshot(const FlowSnapshot& snap, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw FormatError("snapshot '" + path + "': cannot open for writing");
  const SphereGrid& grid = snap.omega.grid();
  std::fprintf(f, "%s\n", kMagic);
  std::fprintf(f, "grid %s %zu %zu\n", to_string(grid.mode()).c_str(), grid.n_theta(),
               grid.n_phi());
  std::fprintf(f, "time %a\n", snap.time);
  std::fprintf(f, "step-hint %a\n", snap.step_hint);
  std::fprintf(f, "nodes %zu\n", grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::fprintf(f, "%a\n", snap.omega[i]);
  }
  std::fclose(f);
}

FlowSnapshot read_snapshot(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "r"));
  if (!f) bad(path, "cannot open");

  if (read_line(f.get()) != kMagic) bad(path, "missing header line");

  char mode_buf[32];
  std::size_t n_theta = 0, n_phi = 0;
  std::string line = read_line(f.get());
  if (std::sscanf(line.c_str(), "grid %31s %zu %zu", mode_buf, &n_theta, &n_phi) != 3) {
    bad(path, "malformed grid line '" + line + "'");
  }
  GridMode mode;
  try {
    mode = grid_mode_from_string(mode_buf);
  } catch (const Error&) {
    bad(path, std::string("unknown grid mode '") + mode_buf + "'");
  }

  line = read_line(f.get());
  if (line.rfind("time ", 0) != 0) bad(path, "missing time line");
  double time = parse_hex_double(path, line.substr(5));

  line = read_line(f.get());
  if (line.rfind("step-hint ", 0) != 0) bad(path, "missing step-hint line");
  double hint = parse_hex_double(path, line.substr(10));

  std::size_t nodes = 0;
  line = read_line(f.get());
  if (std::sscanf(line.c_str(), "nodes %zu", &nodes) != 1) {
    bad(path, "missing node count");
  }

  SphereGrid grid(mode, n_theta, n_phi);
  if (nodes != grid.size()) bad(path, "node count does not match the grid");

  FlowSnapshot snap{ScalarField(grid), time, hint};
  for (std::size_t i = 0; i < nodes; ++i) {
    line = read_line(f.get());
    if (line.empty()) bad(path, "truncated node data");
    snap.omega[i] = parse_hex_double(path, line);
  }
  return snap;
}

}  // namespace nullflow
