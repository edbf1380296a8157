#include "nullflow/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nullflow/calculus.hpp"
#include "nullflow/errors.hpp"
#include "nullflow/parallel.hpp"

namespace nullflow {

namespace {

void reserve_tables(GaugeProfile& gp, const SphereGrid& grid, std::size_t n) {
  gp.a.assign(n, ScalarField(grid));
  gp.a_prime.assign(n, ScalarField(grid));
  gp.a_dprime.assign(n, ScalarField(grid));
  gp.kappa.assign(n, ScalarField(grid));
  gp.v.assign(n, ScalarField(grid));
  gp.s.assign(n, ScalarField(grid));
}

}  // namespace

GaugeProfile GaugeProfile::affine(const BackgroundFoliation& bg) {
  GaugeProfile gp;
  gp.grid = bg.grid;
  gp.lambda = bg.coord;
  gp.v0 = 1.0;
  reserve_tables(gp, bg.grid, bg.n_slices());
  for (std::size_t k = 0; k < bg.n_slices(); ++k) {
    double sk = bg.coord.at(k) - bg.coord.x0;
    for (std::size_t i = 0; i < bg.grid.size(); ++i) {
      gp.a[k][i] = 1.0;
      gp.s[k][i] = sk;
      gp.v[k][i] = 1.0;
    }
  }
  return gp;
}

GaugeProfile construct_gauge(const BackgroundFoliation& bg, double v0) {
  if (!bg.affine)
    throw DomainError("construct_gauge: the background generator must be affine");
  if (!(v0 > 0.0 && v0 < 1.0)) throw DomainError("construct_gauge: v0 must lie in (0, 1)");
  if (bg.n_slices() < 4) throw ShapeError("construct_gauge: background too short");

  {
    const ScalarField& base = bg.trchibar.front();
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (!(base[i] > 0.0)) bad.push_back(i);
    if (!bad.empty())
      throw NotANullConeError("construct_gauge: base-slice expansion is not strictly positive at " +
                              std::to_string(bad.size()) + " node(s), first node " +
                              std::to_string(bad.front()));
  }

  std::size_t n_slices = bg.n_slices(), n_nodes = bg.grid.size();
  GaugeProfile gp;
  gp.grid = bg.grid;
  gp.lambda = bg.coord;
  gp.v0 = v0;
  reserve_tables(gp, bg.grid, n_slices);

  // Shear norm and curvature source per slice enter the second derivative via
  // the transport identity for trchibar'.
  std::vector<ScalarField> hnorm;
  hnorm.reserve(n_slices);
  for (std::size_t k = 0; k < n_slices; ++k)
    hnorm.push_back(tensor_norm(bg.gamma[k], bg.hchibar[k]));

  std::vector<std::string> failures(n_nodes);
  parallel_for(n_nodes, [&](std::size_t idx) {
    std::vector<double> beta(n_slices), integrand(n_slices), inv_a(n_slices);
    for (std::size_t k = 0; k < n_slices; ++k) beta[k] = 0.5 * bg.trchibar[k][idx];
    std::vector<double> B = cumulative_integral(beta, bg.coord.dx);
    std::vector<double> vk(n_slices);
    for (std::size_t k = 0; k < n_slices; ++k) {
      double den = 1.0 + (1.0 - v0) * B[k];
      if (!(den > 0.0)) {
        failures[idx] = "velocity denominator vanished at slice " + std::to_string(k);
        return;
      }
      vk[k] = (v0 + (1.0 - v0) * B[k]) / den;
      if (!(vk[k] > 0.0 && vk[k] < 1.0)) {
        failures[idx] = "velocity left (0, 1) at slice " + std::to_string(k);
        return;
      }
      integrand[k] = beta[k] / vk[k];
    }
    std::vector<double> ln_a = cumulative_integral(integrand, bg.coord.dx);
    for (std::size_t k = 0; k < n_slices; ++k) inv_a[k] = std::exp(-ln_a[k]);
    std::vector<double> s = cumulative_integral(inv_a, bg.coord.dx);
    for (std::size_t k = 0; k < n_slices; ++k) {
      double a = std::exp(ln_a[k]);
      double bv = beta[k] / vk[k];
      double h = hnorm[k][idx];
      double G = bg.g_ll[k][idx];
      double beta_prime = -beta[k] * beta[k] - 0.5 * h * h - 0.5 * G;
      double v_prime = beta[k] * (1.0 - vk[k]) * (1.0 - vk[k]);
      gp.a[k][idx] = a;
      gp.a_prime[k][idx] = a * bv;
      gp.a_dprime[k][idx] =
          a * bv * bv + a * beta_prime / vk[k] - a * beta[k] * v_prime / (vk[k] * vk[k]);
      gp.kappa[k][idx] = a * bv;
      gp.v[k][idx] = vk[k];
      gp.s[k][idx] = s[k];
    }
  });
  for (std::size_t idx = 0; idx < n_nodes; ++idx)
    if (!failures[idx].empty())
      throw DomainError("construct_gauge: " + failures[idx] + " (node " + std::to_string(idx) +
                        ")");
  return gp;
}

SlackReport check_gauge_condition(const BackgroundFoliation& bg, const GaugeProfile& gauge,
                                  double tolerance) {
  if (gauge.grid != bg.grid || gauge.lambda.n != bg.coord.n)
    throw ShapeError("check_gauge_condition: gauge tables do not match the background");
  SlackReport rep;
  rep.tolerance = tolerance;
  rep.coord.resize(bg.n_slices());
  rep.min_slack_slice.resize(bg.n_slices());
  double overall = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < bg.n_slices(); ++k) {
    rep.coord[k] = bg.coord.at(k);
    ScalarField hK = tensor_norm(bg.gamma[k], bg.hchibar[k]);
    ScalarField ab = tensor_norm(bg.gamma[k], bg.abar_hat[k]);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < bg.grid.size(); ++i) {
      double a = gauge.a[k][i];
      double ap = gauge.a_prime[k][i];
      double app = gauge.a_dprime[k][i];
      double trK = bg.trchibar[k][i];
      double h = hK[i];
      double G = bg.g_ll[k][i];
      double trK_prime = -0.5 * trK * trK - h * h - G;
      double slack = a * a * G - a * (2.0 * app - ap * trK - a * trK_prime) -
                     std::abs(a * trK - 4.0 * ap) * a * h - 2.0 * a * a * ab[i] -
                     2.5 * a * a * h * h;
      worst = std::min(worst, slack);
    }
    rep.min_slack_slice[k] = worst;
    overall = std::min(overall, worst);
  }
  rep.min_slack = overall;
  rep.pass = overall >= -tolerance;
  return rep;
}

SlackReport check_energy_condition(const BackgroundFoliation& bg, double tolerance) {
  SlackReport rep;
  rep.tolerance = tolerance;
  rep.coord.resize(bg.n_slices());
  rep.min_slack_slice.resize(bg.n_slices());
  double overall = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < bg.n_slices(); ++k) {
    rep.coord[k] = bg.coord.at(k);
    ScalarField hK = tensor_norm(bg.gamma[k], bg.hchibar[k]);
    ScalarField ab = tensor_norm(bg.gamma[k], bg.abar_hat[k]);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < bg.grid.size(); ++i) {
      double h = hK[i];
      double slack =
          bg.g_ll[k][i] - 2.5 * h * h - 2.0 * bg.trchibar[k][i] * h - 2.0 * ab[i];
      worst = std::min(worst, slack);
    }
    rep.min_slack_slice[k] = worst;
    overall = std::min(overall, worst);
  }
  rep.min_slack = overall;
  rep.pass = overall >= -tolerance;
  return rep;
}

BackgroundFoliation reparametrize(const BackgroundFoliation& bg, const GaugeProfile& gauge,
                                  std::size_t n_out) {
  if (gauge.grid != bg.grid || gauge.lambda.n != bg.coord.n)
    throw ShapeError("reparametrize: gauge tables do not match the background");
  std::size_t n_slices = bg.n_slices(), n_nodes = bg.grid.size();

  // The cross-sections only survive as cross-sections of the new parameter
  // when the rescaling is constant along each slice.
  for (std::size_t k = 0; k < n_slices; ++k) {
    double lo = gauge.a[k].min(), hi = gauge.a[k].max();
    if (hi - lo > 1e-10 * std::max(1.0, std::abs(hi)))
      throw ReparametrizationError(
          "reparametrize: rescaling varies along slice " + std::to_string(k) +
          " (spread " + format_double(hi - lo) + "); the stored cross-sections would not be "
          "level sets of the new parameter");
  }

  if (n_out == 0) n_out = n_slices;
  if (n_out < 4) throw DomainError("reparametrize: need at least four output slices");

  // Uniformity lets one node's s-table represent the slice mapping.
  std::vector<double> s_tab(n_slices);
  for (std::size_t k = 0; k < n_slices; ++k) s_tab[k] = gauge.s[k][0];
  double s_total = s_tab.back();
  if (!(s_total > 0.0)) throw DomainError("reparametrize: rescaled parameter does not advance");

  BackgroundFoliation out;
  out.grid = bg.grid;
  out.coord = UniformAxis{0.0, s_total / static_cast<double>(n_out - 1), n_out};
  out.affine = false;
  out.has_l_side = bg.has_l_side;
  out.has_l_shear = bg.has_l_shear;

  for (std::size_t q = 0; q < n_out; ++q) {
    double sq = std::min(out.coord.at(q), s_total);
    double lam = invert_monotone(bg.coord, s_tab, sq);
    InterpStencil st = interp_stencil(bg.coord, lam);
    auto scal = [&](const std::vector<ScalarField>& f, std::size_t i) {
      double acc = 0.0;
      for (int m = 0; m < st.width; ++m) acc += st.w[m] * f[st.k0 + static_cast<std::size_t>(m)][i];
      return acc;
    };
    auto tens = [&](const std::vector<SymTensor2Field>& f, std::size_t i, int c) {
      double acc = 0.0;
      for (int m = 0; m < st.width; ++m)
        acc += st.w[m] * f[st.k0 + static_cast<std::size_t>(m)].component(c)[i];
      return acc;
    };

    SymTensor2Field g(bg.grid), hb(bg.grid), ab(bg.grid), hc(bg.grid);
    ScalarField tc(bg.grid), tcb(bg.grid), kap(bg.grid), gll(bg.grid);
    CovectorField tau(bg.grid);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      double a = scal(gauge.a, i);
      double ap = scal(gauge.a_prime, i);
      for (int c = 0; c < 3; ++c) {
        g.component(c)[i] = [&] {
          double acc = 0.0;
          for (int m = 0; m < st.width; ++m)
            acc += st.w[m] * bg.gamma[st.k0 + static_cast<std::size_t>(m)].lower().component(c)[i];
          return acc;
        }();
        hb.component(c)[i] = a * tens(bg.hchibar, i, c);
        ab.component(c)[i] = a * a * tens(bg.abar_hat, i, c);
        if (bg.has_l_shear) hc.component(c)[i] = tens(bg.hchi, i, c) / a;
      }
      tcb[i] = a * scal(bg.trchibar, i);
      gll[i] = a * a * scal(bg.g_ll, i);
      kap[i] = ap;
      if (bg.has_l_side) {
        tc[i] = scal(bg.trchi, i) / a;
        double acc_t = 0.0, acc_p = 0.0;
        for (int m = 0; m < st.width; ++m) {
          acc_t += st.w[m] * bg.tau[st.k0 + static_cast<std::size_t>(m)].t(i);
          acc_p += st.w[m] * bg.tau[st.k0 + static_cast<std::size_t>(m)].p(i);
        }
        tau.t(i) = acc_t;
        tau.p(i) = acc_p;
      }
    }
    out.gamma.emplace_back(std::move(g));
    out.trchi.push_back(std::move(tc));
    out.tau.push_back(std::move(tau));
    out.trchibar.push_back(std::move(tcb));
    out.hchibar.push_back(std::move(hb));
    out.kappa.push_back(std::move(kap));
    out.g_ll.push_back(std::move(gll));
    out.abar_hat.push_back(std::move(ab));
    if (bg.has_l_shear) out.hchi.push_back(std::move(hc));
  }
  return out;
}

}  // namespace nullflow
