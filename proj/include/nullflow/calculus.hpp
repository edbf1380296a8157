#pragma once

#include "nullflow/field.hpp"
#include "nullflow/grid.hpp"

namespace nullflow {

/// Centered theta-derivative of a component array. At the pole rows the stencil
/// continues along the meridian across the pole: ghost value at
/// (-theta_0, phi_j) is parity * value(theta_0, phi_{j + n_phi/2}). Scalars and
/// (tt, pp) tensor components carry parity +1, (t) covector and (tp) tensor
/// components carry parity -1.
void partial_theta(const SphereGrid& grid, const std::vector<double>& in, int parity,
                   std::vector<double>& out);

/// Centered phi-derivative (periodic). Identically zero in axisymmetric mode.
void partial_phi(const SphereGrid& grid, const std::vector<double>& in,
                 std::vector<double>& out);

ScalarField partial_theta(const ScalarField& f);
ScalarField partial_phi(const ScalarField& f);

/// Coordinate differential df = (d_theta f, d_phi f) as a covector field.
CovectorField differential(const ScalarField& f);

/// Laplace-Beltrami operator of f under g, in conservative flux form on the
/// half-offset lattice. The flux through the degenerate pole faces vanishes
/// (its ring average is zero by conservation), which keeps the discrete
/// divergence theorem exact and the scheme second order on smooth data.
ScalarField laplace_beltrami(const MetricField& g, const ScalarField& f);

/// |grad f|^2 = g^{ij} d_i f d_j f.
ScalarField grad_norm_sq(const MetricField& g, const ScalarField& f);

/// g^{ij} v_i w_j.
ScalarField contract(const MetricField& g, const CovectorField& v, const CovectorField& w);

/// Pointwise norm sqrt(g^{ij} g^{kl} T_ik T_jl).
ScalarField tensor_norm(const MetricField& g, const SymTensor2Field& T);

/// g^{ij} T_ij.
ScalarField trace(const MetricField& g, const SymTensor2Field& T);

/// T - (tr T / 2) g.
SymTensor2Field traceless_part(const MetricField& g, const SymTensor2Field& T);

/// Integral of f over the surface with area element sqrt(det g).
double integrate(const MetricField& g, const ScalarField& f);

/// Christoffel symbols of g; components indexed [k][ij] with ij in {tt,tp,pp}.
struct ChristoffelField {
  explicit ChristoffelField(const SphereGrid& grid)
      : gamma_t(grid), gamma_p(grid) {}
  SymTensor2Field gamma_t;  ///< Gamma^theta_{ij}
  SymTensor2Field gamma_p;  ///< Gamma^phi_{ij}
};

ChristoffelField christoffels(const MetricField& g);

/// Covariant Hessian of f under g: d_i d_j f - Gamma^k_ij d_k f.
SymTensor2Field hessian(const MetricField& g, const ScalarField& f,
                        const ChristoffelField& gamma);
SymTensor2Field hessian(const MetricField& g, const ScalarField& f);

}  // namespace nullflow
