#include "nullflow/background.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nullflow/calculus.hpp"
#include "nullflow/parallel.hpp"

namespace nullflow {

namespace {

constexpr double kBlowupCutoff = 1e6;

}  // namespace

double BackgroundFoliation::trapped_level() const {
  if (!has_l_side)
    throw CapabilityError("trapped_level: background carries no L-side expansion");
  std::vector<double> mins(n_slices());
  for (std::size_t k = 0; k < n_slices(); ++k) mins[k] = trchi[k].min();
  // Find the last slice with min trchi <= 0; refine on the cubic interpolant.
  std::ptrdiff_t last = -1;
  for (std::size_t k = 0; k < mins.size(); ++k)
    if (mins[k] <= 0.0) last = static_cast<std::ptrdiff_t>(k);
  if (last < 0) return coord.x0;
  if (static_cast<std::size_t>(last) + 1 >= mins.size()) return coord.back();
  auto eval = [&](double s) {
    InterpStencil st = interp_stencil(coord, s);
    double acc = 0.0;
    for (int m = 0; m < st.width; ++m) acc += st.w[m] * mins[st.k0 + static_cast<std::size_t>(m)];
    return acc;
  };
  double lo = coord.at(static_cast<std::size_t>(last));
  double hi = coord.at(static_cast<std::size_t>(last) + 1);
  for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    double mid = 0.5 * (lo + hi);
    if (eval(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

void BackgroundFoliation::validate() const {
  if (coord.n < 4) throw ShapeError("background needs at least four slices");
  if (!(coord.dx > 0.0)) throw ShapeError("background coordinate spacing must be positive");
  std::size_t n = coord.n;
  auto check_count = [&](std::size_t have, const char* name) {
    if (have != n)
      throw ShapeError(std::string("background field '") + name + "' has " +
                       std::to_string(have) + " slices, expected " + std::to_string(n));
  };
  check_count(gamma.size(), "gamma");
  check_count(trchi.size(), "trchi");
  check_count(tau.size(), "tau");
  check_count(trchibar.size(), "trchibar");
  check_count(hchibar.size(), "hchibar");
  check_count(kappa.size(), "kappa");
  check_count(g_ll.size(), "g_ll");
  check_count(abar_hat.size(), "abar_hat");
  if (has_l_shear) check_count(hchi.size(), "hchi");
  for (std::size_t k = 0; k < n; ++k) {
    if (gamma[k].grid() != grid) throw ShapeError("background slice grid mismatch");
    ScalarField tr_h = trace(gamma[k], hchibar[k]);
    ScalarField h_norm = tensor_norm(gamma[k], hchibar[k]);
    for (std::size_t idx = 0; idx < tr_h.size(); ++idx) {
      if (std::abs(tr_h[idx]) > 1e-10 * (1.0 + h_norm[idx]))
        throw ShapeError("generator-side shear not traceless at slice " + std::to_string(k) +
                         " node " + std::to_string(idx));
    }
  }
}

BackgroundFoliation build_analytic(const AnalyticBackground& model, const SphereGrid& grid,
                                   double extent, std::size_t n_slices) {
  if (!(extent > 0.0)) throw DomainError("build_analytic: extent must be positive");
  if (n_slices < 4) throw DomainError("build_analytic: need at least four slices");

  BackgroundFoliation bg;
  bg.grid = grid;
  bg.coord.n = n_slices;
  bg.coord.dx = extent / static_cast<double>(n_slices - 1);

  auto fill_common_zero = [&](std::size_t) {
    bg.tau.emplace_back(grid);
    bg.kappa.emplace_back(grid);
    bg.abar_hat.emplace_back(grid);
    bg.hchibar.emplace_back(grid);
  };

  if (const auto* mk = std::get_if<MinkowskiCone>(&model)) {
    if (!(mk->r0 > 0.0)) throw DomainError("build_analytic: base radius must be positive");
    bg.coord.x0 = mk->r0;
    bg.affine = true;
    bg.has_l_side = true;
    bg.has_l_shear = true;
    for (std::size_t k = 0; k < n_slices; ++k) {
      double r = bg.coord.at(k);
      bg.gamma.push_back(MetricField::round_scaled(grid, [r](std::size_t) { return r; }));
      bg.trchi.emplace_back(grid, 2.0 / r);
      bg.trchibar.emplace_back(grid, 2.0 / r);
      bg.g_ll.emplace_back(grid, 0.0);
      bg.hchi.emplace_back(grid);
      fill_common_zero(k);
    }
    return bg;
  }

  if (const auto* sw = std::get_if<SchwarzschildCone>(&model)) {
    if (!(sw->r0 > 0.0)) throw DomainError("build_analytic: base radius must be positive");
    if (!(sw->mass >= 0.0)) throw DomainError("build_analytic: mass must be nonnegative");
    bg.coord.x0 = sw->r0;
    bg.affine = true;
    bg.has_l_side = true;
    bg.has_l_shear = true;
    for (std::size_t k = 0; k < n_slices; ++k) {
      double r = bg.coord.at(k);
      bg.gamma.push_back(MetricField::round_scaled(grid, [r](std::size_t) { return r; }));
      bg.trchi.emplace_back(grid, (2.0 / r) * (1.0 - 2.0 * sw->mass / r));
      bg.trchibar.emplace_back(grid, 2.0 / r);
      bg.g_ll.emplace_back(grid, 0.0);
      bg.hchi.emplace_back(grid);
      fill_common_zero(k);
    }
    return bg;
  }

  const auto& sf = std::get<ShearFreeCustom>(model);
  if (!(sf.g_kk >= 0.0)) throw DomainError("build_analytic: curvature source must be >= 0");
  if (!sf.trk0) throw DomainError("build_analytic: initial expansion profile missing");
  bg.coord.x0 = 0.0;
  bg.affine = true;
  bg.has_l_side = false;
  bg.has_l_shear = false;
  ScalarField k0 = ScalarField::from_function(grid, sf.trk0);

  // Shear-free scalar transport has closed forms: with no source the
  // expansion is K0/(1 + K0 l / 2) and the metric factor (1 + K0 l / 2)^2;
  // with a constant source c > 0 it is sqrt(2c) tan(u) with u linear in l and
  // metric factor (cos u / cos u0)^2.
  double c = sf.g_kk;
  double last_good = bg.coord.x0;
  for (std::size_t k = 0; k < n_slices; ++k) {
    double lam = bg.coord.at(k);
    ScalarField K(grid);
    ScalarField factor(grid);
    bool bad = false;
    for (std::size_t idx = 0; idx < K.size(); ++idx) {
      double y0 = k0[idx];
      double y, f;
      if (c == 0.0) {
        double den = 1.0 + 0.5 * y0 * lam;
        if (den <= 1e-7) {
          bad = true;
          break;
        }
        y = y0 / den;
        f = den;
      } else {
        double s2c = std::sqrt(2.0 * c);
        double u0 = std::atan(y0 / s2c);
        double u = u0 - std::sqrt(0.5 * c) * lam;
        if (std::cos(u) <= 1e-7 || u <= -1.5607) {  // just above -pi/2
          bad = true;
          break;
        }
        y = s2c * std::tan(u);
        f = std::cos(u) / std::cos(u0);
      }
      if (std::abs(y) >= kBlowupCutoff) {
        bad = true;
        break;
      }
      K[idx] = y;
      factor[idx] = f;
    }
    if (bad)
      throw FocalPointError("transport blow-up before requested extent (last good coordinate " +
                                format_double(last_good) + ")",
                            last_good);
    bg.gamma.push_back(MetricField::round_scaled(grid, [&](std::size_t idx) { return factor[idx]; }));
    bg.trchibar.push_back(K);
    bg.trchi.emplace_back(grid);
    bg.g_ll.emplace_back(grid, c);
    fill_common_zero(k);
    last_good = lam;
  }
  return bg;
}

SliceSample sample_at(const BackgroundFoliation& bg, const ScalarField& omega, Interp interp) {
  require_same_grid(bg.grid, omega.grid(), "sample_at");
  std::vector<std::size_t> outside;
  for (std::size_t idx = 0; idx < omega.size(); ++idx)
    if (!bg.coord.contains(omega[idx])) outside.push_back(idx);
  if (!outside.empty()) {
    std::ostringstream msg;
    msg << "graph leaves the background coordinate range [" << format_double(bg.s_min()) << ", "
        << format_double(bg.s_max()) << "] at " << outside.size() << " node(s), first node "
        << outside.front() << " with value " << format_double(omega[outside.front()]);
    throw ExitedDomainError(msg.str(), std::move(outside));
  }

  std::size_t n = omega.size();
  std::vector<InterpStencil> st(n);
  for (std::size_t idx = 0; idx < n; ++idx) st[idx] = interp_stencil(bg.coord, omega[idx], interp);

  auto gather_scalar = [&](const std::vector<ScalarField>& f) {
    ScalarField out(bg.grid);
    for (std::size_t idx = 0; idx < n; ++idx) {
      double acc = 0.0;
      for (int m = 0; m < st[idx].width; ++m)
        acc += st[idx].w[m] * f[st[idx].k0 + static_cast<std::size_t>(m)][idx];
      out[idx] = acc;
    }
    return out;
  };
  auto gather_tensor = [&](const std::vector<SymTensor2Field>& f) {
    SymTensor2Field out(bg.grid);
    for (std::size_t idx = 0; idx < n; ++idx) {
      double a0 = 0.0, a1 = 0.0, a2 = 0.0;
      for (int m = 0; m < st[idx].width; ++m) {
        const auto& slice = f[st[idx].k0 + static_cast<std::size_t>(m)];
        a0 += st[idx].w[m] * slice.tt(idx);
        a1 += st[idx].w[m] * slice.tp(idx);
        a2 += st[idx].w[m] * slice.pp(idx);
      }
      out.tt(idx) = a0;
      out.tp(idx) = a1;
      out.pp(idx) = a2;
    }
    return out;
  };
  auto gather_metric = [&]() {
    SymTensor2Field out(bg.grid);
    for (std::size_t idx = 0; idx < n; ++idx) {
      double a0 = 0.0, a1 = 0.0, a2 = 0.0;
      for (int m = 0; m < st[idx].width; ++m) {
        const MetricField& slice = bg.gamma[st[idx].k0 + static_cast<std::size_t>(m)];
        a0 += st[idx].w[m] * slice.tt(idx);
        a1 += st[idx].w[m] * slice.tp(idx);
        a2 += st[idx].w[m] * slice.pp(idx);
      }
      out.tt(idx) = a0;
      out.tp(idx) = a1;
      out.pp(idx) = a2;
    }
    return MetricField(std::move(out));
  };
  auto gather_covector = [&](const std::vector<CovectorField>& f) {
    CovectorField out(bg.grid);
    for (std::size_t idx = 0; idx < n; ++idx) {
      double a0 = 0.0, a1 = 0.0;
      for (int m = 0; m < st[idx].width; ++m) {
        const auto& slice = f[st[idx].k0 + static_cast<std::size_t>(m)];
        a0 += st[idx].w[m] * slice.t(idx);
        a1 += st[idx].w[m] * slice.p(idx);
      }
      out.t(idx) = a0;
      out.p(idx) = a1;
    }
    return out;
  };

  SliceSample out{gather_metric(),
                  gather_scalar(bg.trchi),
                  gather_covector(bg.tau),
                  gather_scalar(bg.trchibar),
                  gather_tensor(bg.hchibar),
                  gather_scalar(bg.kappa),
                  gather_scalar(bg.g_ll),
                  gather_tensor(bg.abar_hat),
                  std::nullopt};
  if (bg.has_l_shear) out.hchi = gather_tensor(bg.hchi);
  return out;
}

ScalarField sample_scalar_at(const BackgroundFoliation& bg,
                             const std::vector<ScalarField>& profile, const ScalarField& omega,
                             Interp interp) {
  require_same_grid(bg.grid, omega.grid(), "sample_scalar_at");
  ScalarField out(bg.grid);
  for (std::size_t idx = 0; idx < omega.size(); ++idx) {
    if (!bg.coord.contains(omega[idx]))
      throw ExitedDomainError("graph node outside background coordinate range", {idx});
    InterpStencil st = interp_stencil(bg.coord, omega[idx], interp);
    double acc = 0.0;
    for (int m = 0; m < st.width; ++m)
      acc += st.w[m] * profile[st.k0 + static_cast<std::size_t>(m)][idx];
    out[idx] = acc;
  }
  return out;
}

BackgroundFoliation raychaudhuri_propagate(const RayInitial& initial, const RaySources& sources,
                                           const UniformAxis& axis) {
  const SphereGrid& grid = initial.gamma0.grid();
  require_same_grid(grid, initial.trchibar0.grid(), "raychaudhuri_propagate");
  require_same_grid(grid, initial.hchibar0.grid(), "raychaudhuri_propagate");
  if (axis.n < 4) throw DomainError("raychaudhuri_propagate: need at least four slices");
  if (!(axis.dx > 0.0)) throw DomainError("raychaudhuri_propagate: spacing must be positive");

  {
    ScalarField tr0 = trace(initial.gamma0, initial.hchibar0);
    ScalarField n0 = tensor_norm(initial.gamma0, initial.hchibar0);
    for (std::size_t idx = 0; idx < tr0.size(); ++idx)
      if (std::abs(tr0[idx]) > 1e-10 * (1.0 + n0[idx]))
        throw DomainError("raychaudhuri_propagate: initial shear not traceless at node " +
                          std::to_string(idx));
  }

  std::size_t n_nodes = grid.size(), n_slices = axis.n;
  // Raw per-(slice,node) component tables filled ray by ray, assembled at the end.
  std::vector<std::vector<double>> g_tab(3, std::vector<double>(n_slices * n_nodes));
  std::vector<std::vector<double>> h_tab(3, std::vector<double>(n_slices * n_nodes));
  std::vector<double> k_tab(n_slices * n_nodes);
  std::vector<double> last_good(n_nodes, axis.back());
  std::vector<char> failed(n_nodes, 0);

  auto kappa_src = sources.kappa;
  auto gkk_src = sources.g_kk;
  auto abar_src = sources.abar_hat;

  parallel_for(n_nodes, [&](std::size_t idx) {
    // State: gamma components, shear components, expansion.
    std::vector<double> y = {initial.gamma0.tt(idx),   initial.gamma0.tp(idx),
                             initial.gamma0.pp(idx),   initial.hchibar0.tt(idx),
                             initial.hchibar0.tp(idx), initial.hchibar0.pp(idx),
                             initial.trchibar0[idx]};
    auto deriv = [&](double lam, const std::vector<double>& s, std::vector<double>& d) {
      double det = s[0] * s[2] - s[1] * s[1];
      if (!(det > 1e-300)) {
        std::fill(d.begin(), d.end(), std::numeric_limits<double>::quiet_NaN());
        return;
      }
      double itt = s[2] / det, itp = -s[1] / det, ipp = s[0] / det;
      double Utt = itt * (itt * s[3] + itp * s[4]) + itp * (itt * s[4] + itp * s[5]);
      double Utp = itt * (itp * s[3] + ipp * s[4]) + itp * (itp * s[4] + ipp * s[5]);
      double Upp = itp * (itp * s[3] + ipp * s[4]) + ipp * (itp * s[4] + ipp * s[5]);
      double h2 = Utt * s[3] + 2.0 * Utp * s[4] + Upp * s[5];
      double kap = kappa_src ? kappa_src(lam, idx) : 0.0;
      double gkk = gkk_src ? gkk_src(lam, idx) : 0.0;
      double ab[3] = {0.0, 0.0, 0.0};
      if (abar_src) abar_src(lam, idx, ab);
      double K = s[6];
      d[0] = 2.0 * (s[3] + 0.5 * K * s[0]);
      d[1] = 2.0 * (s[4] + 0.5 * K * s[1]);
      d[2] = 2.0 * (s[5] + 0.5 * K * s[2]);
      d[3] = -ab[0] + h2 * s[0] + kap * s[3];
      d[4] = -ab[1] + h2 * s[1] + kap * s[4];
      d[5] = -ab[2] + h2 * s[2] + kap * s[5];
      d[6] = -0.5 * K * K - h2 - gkk + kap * K;
    };
    auto store = [&](std::size_t k) {
      for (int c = 0; c < 3; ++c) g_tab[c][k * n_nodes + idx] = y[c];
      for (int c = 0; c < 3; ++c) h_tab[c][k * n_nodes + idx] = y[3 + c];
      k_tab[k * n_nodes + idx] = y[6];
    };
    auto healthy = [&]() {
      double det = y[0] * y[2] - y[1] * y[1];
      bool finite = true;
      for (double v : y) finite = finite && std::isfinite(v);
      return finite && det > kMetricDetFloor && std::abs(y[6]) < kBlowupCutoff;
    };
    if (!healthy()) {
      failed[idx] = 1;
      last_good[idx] = axis.x0 - axis.dx;  // not even the base slice
      return;
    }
    store(0);
    for (std::size_t k = 0; k + 1 < n_slices; ++k) {
      rk4_step(axis.at(k), axis.dx, y, deriv);
      // Constraint projection: keep the shear exactly traceless against the
      // transported metric (drift would otherwise be step-truncation sized).
      double det = y[0] * y[2] - y[1] * y[1];
      if (det > 1e-300) {
        double itt = y[2] / det, itp = -y[1] / det, ipp = y[0] / det;
        double tr = itt * y[3] + 2.0 * itp * y[4] + ipp * y[5];
        y[3] -= 0.5 * tr * y[0];
        y[4] -= 0.5 * tr * y[1];
        y[5] -= 0.5 * tr * y[2];
      }
      if (!healthy()) {
        failed[idx] = 1;
        last_good[idx] = axis.at(k);
        return;
      }
      store(k + 1);
    }
  });

  for (std::size_t idx = 0; idx < n_nodes; ++idx) {
    if (failed[idx]) {
      double lam_last = *std::min_element(last_good.begin(), last_good.end());
      throw FocalPointError("transport blow-up before requested extent (last good coordinate " +
                                format_double(lam_last) + ", first failing node " +
                                std::to_string(idx) + ")",
                            lam_last);
    }
  }

  BackgroundFoliation bg;
  bg.grid = grid;
  bg.coord = axis;
  bg.affine = !kappa_src;
  bg.has_l_side = false;
  bg.has_l_shear = false;
  for (std::size_t k = 0; k < n_slices; ++k) {
    SymTensor2Field g(grid), h(grid), ab(grid);
    ScalarField K(grid), kapf(grid), gkkf(grid);
    for (std::size_t idx = 0; idx < n_nodes; ++idx) {
      g.tt(idx) = g_tab[0][k * n_nodes + idx];
      g.tp(idx) = g_tab[1][k * n_nodes + idx];
      g.pp(idx) = g_tab[2][k * n_nodes + idx];
      h.tt(idx) = h_tab[0][k * n_nodes + idx];
      h.tp(idx) = h_tab[1][k * n_nodes + idx];
      h.pp(idx) = h_tab[2][k * n_nodes + idx];
      K[idx] = k_tab[k * n_nodes + idx];
      double lam = axis.at(k);
      kapf[idx] = kappa_src ? kappa_src(lam, idx) : 0.0;
      gkkf[idx] = gkk_src ? gkk_src(lam, idx) : 0.0;
      if (abar_src) {
        double a[3];
        abar_src(lam, idx, a);
        ab.tt(idx) = a[0];
        ab.tp(idx) = a[1];
        ab.pp(idx) = a[2];
      }
    }
    bg.gamma.emplace_back(std::move(g));
    bg.trchibar.push_back(std::move(K));
    bg.hchibar.push_back(std::move(h));
    bg.kappa.push_back(std::move(kapf));
    bg.g_ll.push_back(std::move(gkkf));
    bg.abar_hat.push_back(std::move(ab));
    bg.trchi.emplace_back(grid);
    bg.tau.emplace_back(grid);
  }
  return bg;
}

namespace {

void write_row(std::ostream& os, const std::vector<double>& vals) {
  for (std::size_t c = 0; c < vals.size(); ++c) {
    if (c) os << ' ';
    os << format_double(vals[c]);
  }
  os << '\n';
}

}  // namespace

void write_background(const BackgroundFoliation& bg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  os << "nullflow-background 1\n";
  os << "mode " << to_string(bg.grid.mode()) << '\n';
  os << "n_theta " << bg.grid.n_theta() << '\n';
  os << "n_phi " << bg.grid.n_phi() << '\n';
  os << "n_slices " << bg.coord.n << '\n';
  os << "coord0 " << format_double(bg.coord.x0) << '\n';
  os << "dcoord " << format_double(bg.coord.dx) << '\n';
  os << "affine " << (bg.affine ? 1 : 0) << '\n';
  os << "has_l_side " << (bg.has_l_side ? 1 : 0) << '\n';
  os << "has_l_shear " << (bg.has_l_shear ? 1 : 0) << '\n';
  os << "fields gamma_tt gamma_tp gamma_pp trchi tau_t tau_p trchibar hchibar_tt hchibar_tp"
        " hchibar_pp kappa g_ll abar_tt abar_tp abar_pp";
  if (bg.has_l_shear) os << " hchi_tt hchi_tp hchi_pp";
  os << '\n';
  for (std::size_t k = 0; k < bg.coord.n; ++k) {
    os << "slice " << k << '\n';
    for (std::size_t idx = 0; idx < bg.grid.size(); ++idx) {
      std::vector<double> row = {bg.gamma[k].tt(idx),    bg.gamma[k].tp(idx),
                                 bg.gamma[k].pp(idx),    bg.trchi[k][idx],
                                 bg.tau[k].t(idx),       bg.tau[k].p(idx),
                                 bg.trchibar[k][idx],    bg.hchibar[k].tt(idx),
                                 bg.hchibar[k].tp(idx),  bg.hchibar[k].pp(idx),
                                 bg.kappa[k][idx],       bg.g_ll[k][idx],
                                 bg.abar_hat[k].tt(idx), bg.abar_hat[k].tp(idx),
                                 bg.abar_hat[k].pp(idx)};
      if (bg.has_l_shear) {
        row.push_back(bg.hchi[k].tt(idx));
        row.push_back(bg.hchi[k].tp(idx));
        row.push_back(bg.hchi[k].pp(idx));
      }
      write_row(os, row);
    }
  }
  if (!os) throw FormatError("write failure on '" + path + "'");
}

BackgroundFoliation read_background(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "'");
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(is, line)) throw FormatError("unexpected end of file in '" + path + "'");
    return line;
  };
  auto expect_kv = [&](const std::string& key) {
    next_line();
    std::istringstream ss(line);
    std::string k, v;
    ss >> k >> v;
    if (k != key) throw FormatError("expected '" + key + "' in '" + path + "', found '" + k + "'");
    return v;
  };

  next_line();
  if (line != "nullflow-background 1")
    throw FormatError("'" + path + "' is not a background table (bad magic line)");
  GridMode mode = grid_mode_from_string(expect_kv("mode"));
  std::size_t n_theta = std::stoul(expect_kv("n_theta"));
  std::size_t n_phi = std::stoul(expect_kv("n_phi"));
  SphereGrid grid(mode, n_theta, n_phi);

  BackgroundFoliation bg;
  bg.grid = grid;
  bg.coord.n = std::stoul(expect_kv("n_slices"));
  bg.coord.x0 = std::stod(expect_kv("coord0"));
  bg.coord.dx = std::stod(expect_kv("dcoord"));
  bg.affine = expect_kv("affine") == "1";
  bg.has_l_side = expect_kv("has_l_side") == "1";
  bg.has_l_shear = expect_kv("has_l_shear") == "1";
  next_line();
  if (line.rfind("fields ", 0) != 0) throw FormatError("missing fields line in '" + path + "'");
  std::size_t n_cols = bg.has_l_shear ? 18 : 15;

  for (std::size_t k = 0; k < bg.coord.n; ++k) {
    next_line();
    std::istringstream head(line);
    std::string word;
    std::size_t ks;
    head >> word >> ks;
    if (word != "slice" || ks != k)
      throw FormatError("bad slice header at block " + std::to_string(k) + " in '" + path + "'");
    SymTensor2Field g(grid), h(grid), ab(grid), hc(grid);
    ScalarField tc(grid), tcb(grid), kap(grid), gll(grid);
    CovectorField tau(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      next_line();
      std::istringstream row(line);
      std::vector<double> vals(n_cols);
      for (std::size_t c = 0; c < n_cols; ++c) {
        if (!(row >> vals[c]))
          throw FormatError("short row at slice " + std::to_string(k) + " node " +
                            std::to_string(idx) + " in '" + path + "'");
      }
      double extra;
      if (row >> extra)
        throw FormatError("excess columns at slice " + std::to_string(k) + " in '" + path + "'");
      g.tt(idx) = vals[0];
      g.tp(idx) = vals[1];
      g.pp(idx) = vals[2];
      tc[idx] = vals[3];
      tau.t(idx) = vals[4];
      tau.p(idx) = vals[5];
      tcb[idx] = vals[6];
      h.tt(idx) = vals[7];
      h.tp(idx) = vals[8];
      h.pp(idx) = vals[9];
      kap[idx] = vals[10];
      gll[idx] = vals[11];
      ab.tt(idx) = vals[12];
      ab.tp(idx) = vals[13];
      ab.pp(idx) = vals[14];
      if (bg.has_l_shear) {
        hc.tt(idx) = vals[15];
        hc.tp(idx) = vals[16];
        hc.pp(idx) = vals[17];
      }
    }
    bg.gamma.emplace_back(std::move(g));
    bg.trchi.push_back(std::move(tc));
    bg.tau.push_back(std::move(tau));
    bg.trchibar.push_back(std::move(tcb));
    bg.hchibar.push_back(std::move(h));
    bg.kappa.push_back(std::move(kap));
    bg.g_ll.push_back(std::move(gll));
    bg.abar_hat.push_back(std::move(ab));
    if (bg.has_l_shear) bg.hchi.push_back(std::move(hc));
  }
  bg.validate();
  return bg;
}

}  // namespace nullflow
