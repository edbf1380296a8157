#include "nullflow/calculus.hpp"

#include <cmath>

namespace nullflow {

namespace {

// Value of a component array continued across the pole onto row "ghost of i"
// for column j: row stays, column jumps by half a turn, sign given by parity.
inline double pole_ghost(const SphereGrid& g, const std::vector<double>& a, std::size_t i,
                         std::size_t j, int parity) {
  return parity * a[g.index(i, g.across_pole(j))];
}

}  // namespace

void partial_theta(const SphereGrid& grid, const std::vector<double>& in, int parity,
                   std::vector<double>& out) {
  std::size_t nt = grid.n_theta(), np = grid.n_phi();
  out.resize(in.size());
  double inv2h = 1.0 / (2.0 * grid.h_theta());
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      double up = (i + 1 < nt) ? in[grid.index(i + 1, j)] : pole_ghost(grid, in, nt - 1, j, parity);
      double dn = (i > 0) ? in[grid.index(i - 1, j)] : pole_ghost(grid, in, 0, j, parity);
      out[grid.index(i, j)] = (up - dn) * inv2h;
    }
  }
}

void partial_phi(const SphereGrid& grid, const std::vector<double>& in,
                 std::vector<double>& out) {
  out.assign(in.size(), 0.0);
  if (grid.mode() == GridMode::Axisymmetric) return;
  std::size_t nt = grid.n_theta(), np = grid.n_phi();
  double inv2h = 1.0 / (2.0 * grid.h_phi());
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      double up = in[grid.index(i, grid.wrap_phi(static_cast<std::ptrdiff_t>(j) + 1))];
      double dn = in[grid.index(i, grid.wrap_phi(static_cast<std::ptrdiff_t>(j) - 1))];
      out[grid.index(i, j)] = (up - dn) * inv2h;
    }
  }
}

ScalarField partial_theta(const ScalarField& f) {
  ScalarField out(f.grid());
  partial_theta(f.grid(), f.data(), +1, out.data());
  return out;
}

ScalarField partial_phi(const ScalarField& f) {
  ScalarField out(f.grid());
  partial_phi(f.grid(), f.data(), out.data());
  return out;
}

CovectorField differential(const ScalarField& f) {
  CovectorField df(f.grid());
  partial_theta(f.grid(), f.data(), +1, df.component(0));
  partial_phi(f.grid(), f.data(), df.component(1));
  return df;
}

ScalarField laplace_beltrami(const MetricField& g, const ScalarField& f) {
  require_same_grid(g.grid(), f.grid(), "laplace_beltrami");
  const SphereGrid& grid = g.grid();
  std::size_t nt = grid.n_theta(), np = grid.n_phi();
  double ht = grid.h_theta(), hp = grid.h_phi();

  // Node coefficients sqrt(g) g^{ij} and the phi-derivative of f (for the
  // cross-term in the theta flux); face values are two-point averages.
  std::vector<double> ctt(grid.size()), ctp(grid.size()), cpp(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    double sd = g.sqrt_det(idx);
    ctt[idx] = sd * g.inv_tt(idx);
    ctp[idx] = sd * g.inv_tp(idx);
    cpp[idx] = sd * g.inv_pp(idx);
  }
  std::vector<double> fp, ftheta;
  partial_phi(grid, f.data(), fp);

  ScalarField out(f.grid());
  // Theta fluxes at interior faces; pole faces carry zero flux.
  std::vector<double> flux_t((nt - 1) * np);
  for (std::size_t i = 0; i + 1 < nt; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      std::size_t a = grid.index(i, j), b = grid.index(i + 1, j);
      double c1 = 0.5 * (ctt[a] + ctt[b]);
      double c2 = 0.5 * (ctp[a] + ctp[b]);
      double df = (f[b] - f[a]) / ht;
      double dfp = 0.5 * (fp[a] + fp[b]);
      flux_t[i * np + j] = c1 * df + c2 * dfp;
    }
  }
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      std::size_t idx = grid.index(i, j);
      double up = (i + 1 < nt) ? flux_t[i * np + j] : 0.0;
      double dn = (i > 0) ? flux_t[(i - 1) * np + j] : 0.0;
      out[idx] = (up - dn) / ht;
    }
  }

  if (grid.mode() == GridMode::Full2D) {
    partial_theta(grid, f.data(), +1, ftheta);
    for (std::size_t i = 0; i < nt; ++i) {
      for (std::size_t j = 0; j < np; ++j) {
        std::size_t idx = grid.index(i, j);
        std::size_t jp = grid.wrap_phi(static_cast<std::ptrdiff_t>(j) + 1);
        std::size_t jm = grid.wrap_phi(static_cast<std::ptrdiff_t>(j) - 1);
        std::size_t ip = grid.index(i, jp), im = grid.index(i, jm);
        double fplus = 0.5 * (cpp[idx] + cpp[ip]) * (f[ip] - f[idx]) / hp +
                       0.5 * (ctp[idx] + ctp[ip]) * 0.5 * (ftheta[idx] + ftheta[ip]);
        double fminus = 0.5 * (cpp[im] + cpp[idx]) * (f[idx] - f[im]) / hp +
                        0.5 * (ctp[im] + ctp[idx]) * 0.5 * (ftheta[im] + ftheta[idx]);
        out[idx] += (fplus - fminus) / hp;
      }
    }
  }

  for (std::size_t idx = 0; idx < grid.size(); ++idx) out[idx] /= g.sqrt_det(idx);
  return out;
}

ScalarField grad_norm_sq(const MetricField& g, const ScalarField& f) {
  require_same_grid(g.grid(), f.grid(), "grad_norm_sq");
  CovectorField df = differential(f);
  ScalarField out(f.grid());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    double dt = df.t(idx), dp = df.p(idx);
    out[idx] = g.inv_tt(idx) * dt * dt + 2.0 * g.inv_tp(idx) * dt * dp +
               g.inv_pp(idx) * dp * dp;
  }
  return out;
}

ScalarField contract(const MetricField& g, const CovectorField& v, const CovectorField& w) {
  require_same_grid(g.grid(), v.grid(), "contract");
  require_same_grid(g.grid(), w.grid(), "contract");
  ScalarField out(g.grid());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    out[idx] = g.inv_tt(idx) * v.t(idx) * w.t(idx) +
               g.inv_tp(idx) * (v.t(idx) * w.p(idx) + v.p(idx) * w.t(idx)) +
               g.inv_pp(idx) * v.p(idx) * w.p(idx);
  }
  return out;
}

ScalarField tensor_norm(const MetricField& g, const SymTensor2Field& T) {
  require_same_grid(g.grid(), T.grid(), "tensor_norm");
  ScalarField out(g.grid());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    double itt = g.inv_tt(idx), itp = g.inv_tp(idx), ipp = g.inv_pp(idx);
    double tt = T.tt(idx), tp = T.tp(idx), pp = T.pp(idx);
    // Raise both indices, then contract with the lower components.
    double Utt = itt * (itt * tt + itp * tp) + itp * (itt * tp + itp * pp);
    double Utp = itt * (itp * tt + ipp * tp) + itp * (itp * tp + ipp * pp);
    double Upp = itp * (itp * tt + ipp * tp) + ipp * (itp * tp + ipp * pp);
    double n2 = Utt * tt + 2.0 * Utp * tp + Upp * pp;
    out[idx] = std::sqrt(n2 > 0.0 ? n2 : 0.0);
  }
  return out;
}

ScalarField trace(const MetricField& g, const SymTensor2Field& T) {
  require_same_grid(g.grid(), T.grid(), "trace");
  ScalarField out(g.grid());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    out[idx] = g.inv_tt(idx) * T.tt(idx) + 2.0 * g.inv_tp(idx) * T.tp(idx) +
               g.inv_pp(idx) * T.pp(idx);
  }
  return out;
}

SymTensor2Field traceless_part(const MetricField& g, const SymTensor2Field& T) {
  ScalarField tr = trace(g, T);
  SymTensor2Field out(T.grid());
  for (std::size_t idx = 0; idx < tr.size(); ++idx) {
    double half_tr = 0.5 * tr[idx];
    out.tt(idx) = T.tt(idx) - half_tr * g.tt(idx);
    out.tp(idx) = T.tp(idx) - half_tr * g.tp(idx);
    out.pp(idx) = T.pp(idx) - half_tr * g.pp(idx);
  }
  return out;
}

double integrate(const MetricField& g, const ScalarField& f) {
  require_same_grid(g.grid(), f.grid(), "integrate");
  double cell = g.grid().h_theta() * g.grid().h_phi();
  double sum = 0.0;
  for (std::size_t idx = 0; idx < f.size(); ++idx) sum += f[idx] * g.sqrt_det(idx);
  return sum * cell;
}

ChristoffelField christoffels(const MetricField& g) {
  const SphereGrid& grid = g.grid();
  // Metric component derivatives with across-pole parity (+, -, +).
  std::vector<double> dt_tt, dt_tp, dt_pp, dp_tt, dp_tp, dp_pp;
  partial_theta(grid, g.lower().component(0), +1, dt_tt);
  partial_theta(grid, g.lower().component(1), -1, dt_tp);
  partial_theta(grid, g.lower().component(2), +1, dt_pp);
  partial_phi(grid, g.lower().component(0), dp_tt);
  partial_phi(grid, g.lower().component(1), dp_tp);
  partial_phi(grid, g.lower().component(2), dp_pp);

  ChristoffelField out(grid);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    // Lowered symbols [ij,l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2.
    double c_tt_t = 0.5 * dt_tt[idx];
    double c_tt_p = dt_tp[idx] - 0.5 * dp_tt[idx];
    double c_tp_t = 0.5 * dp_tt[idx];
    double c_tp_p = 0.5 * dt_pp[idx];
    double c_pp_t = dp_tp[idx] - 0.5 * dt_pp[idx];
    double c_pp_p = 0.5 * dp_pp[idx];
    double itt = g.inv_tt(idx), itp = g.inv_tp(idx), ipp = g.inv_pp(idx);
    out.gamma_t.tt(idx) = itt * c_tt_t + itp * c_tt_p;
    out.gamma_t.tp(idx) = itt * c_tp_t + itp * c_tp_p;
    out.gamma_t.pp(idx) = itt * c_pp_t + itp * c_pp_p;
    out.gamma_p.tt(idx) = itp * c_tt_t + ipp * c_tt_p;
    out.gamma_p.tp(idx) = itp * c_tp_t + ipp * c_tp_p;
    out.gamma_p.pp(idx) = itp * c_pp_t + ipp * c_pp_p;
  }
  return out;
}

SymTensor2Field hessian(const MetricField& g, const ScalarField& f,
                        const ChristoffelField& gamma) {
  require_same_grid(g.grid(), f.grid(), "hessian");
  const SphereGrid& grid = g.grid();
  std::size_t nt = grid.n_theta(), np = grid.n_phi();
  double ht = grid.h_theta(), hp = grid.h_phi();

  std::vector<double> ft, fp, ftp;
  partial_theta(grid, f.data(), +1, ft);
  partial_phi(grid, f.data(), fp);
  // Mixed partial: theta-derivative of d_phi f, which continues across the
  // pole with parity +1 (it is the phi component of a covector).
  partial_theta(grid, fp, +1, ftp);

  SymTensor2Field out(grid);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      std::size_t idx = grid.index(i, j);
      double up = (i + 1 < nt) ? f[grid.index(i + 1, j)]
                               : pole_ghost(grid, f.data(), nt - 1, j, +1);
      double dn = (i > 0) ? f[grid.index(i - 1, j)] : pole_ghost(grid, f.data(), 0, j, +1);
      double ftt = (up - 2.0 * f[idx] + dn) / (ht * ht);
      double fpp = 0.0;
      if (grid.mode() == GridMode::Full2D) {
        std::size_t jp = grid.wrap_phi(static_cast<std::ptrdiff_t>(j) + 1);
        std::size_t jm = grid.wrap_phi(static_cast<std::ptrdiff_t>(j) - 1);
        fpp = (f[grid.index(i, jp)] - 2.0 * f[idx] + f[grid.index(i, jm)]) / (hp * hp);
      }
      out.tt(idx) = ftt - gamma.gamma_t.tt(idx) * ft[idx] - gamma.gamma_p.tt(idx) * fp[idx];
      out.tp(idx) = ftp[idx] - gamma.gamma_t.tp(idx) * ft[idx] - gamma.gamma_p.tp(idx) * fp[idx];
      out.pp(idx) = fpp - gamma.gamma_t.pp(idx) * ft[idx] - gamma.gamma_p.pp(idx) * fp[idx];
    }
  }
  return out;
}

SymTensor2Field hessian(const MetricField& g, const ScalarField& f) {
  return hessian(g, f, christoffels(g));
}

}  // namespace nullflow
