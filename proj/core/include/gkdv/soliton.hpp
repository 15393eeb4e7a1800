#pragma once

#include "gkdv/grid.hpp"

namespace gkdv {

/// Modulation pair (c, rho) of a soliton together with the nonlinearity
/// exponent p of u_t + (u_xx + u^p)_x = f. Only p in {2, 3, 4} is supported;
/// c > 0 is simultaneously the scaling and the velocity.
struct SolitonParams {
  int p = 2;
  double c = 1.0;
  double rho = 0.0;
};

/// Throws std::domain_error unless p in {2,3,4} (and c > 0 for the overload).
void validate_exponent(int p);
void validate(const SolitonParams& params);

/// Base profile q(s) = [(p+1) / (2 cosh^2((p-1)s/2))]^{1/(p-1)} and its first
/// three derivatives (k = 0..3). Even, positive, decays like e^{-|s|}.
double q_profile(int p, double s);
double q_profile_deriv(int p, double s, int k);

/// Scaled profile q_c(y) = c^{1/(p-1)} q(sqrt(c) y) and derivatives (k = 0..3).
double qc(const SolitonParams& params, double y);
double qc_deriv(const SolitonParams& params, double y, int k);

/// Scaling generator dq_c/dc = (1/c) [q_c/(p-1) + y q_c'/2], and its y-derivative.
double qc_dc(const SolitonParams& params, double y);
double qc_dc_deriv(const SolitonParams& params, double y);

/// Max-norm of q_c'' - c q_c + q_c^p on the grid, using spectral derivatives
/// of the profile sampled about the grid midpoint. Pure discretization error
/// for an adequately resolved grid.
double soliton_ode_residual(const SolitonParams& params, const GridFunction& grid_template);

/// \int q, \int q^2, \int q^3 for the unit-scaling profile, plus the ratio
/// lambda_p = 4(p-1)/(5-p) * intQ3 / intQ2 that drives the parameter system.
struct QuadratureConstants {
  int p = 2;
  double int_q = 0.0;
  double int_q2 = 0.0;
  double int_q3 = 0.0;
  double lambda_p = 0.0;
};

/// Computed once per exponent by composite Gauss quadrature on [-60, 60].
const QuadratureConstants& quadrature_constants(int p);

/// Conserved functionals: M = (1/2) \int u^2 and
/// E = (1/2) \int u_x^2 - 1/(p+1) \int u^{p+1}, spectral u_x.
double mass(const GridFunction& u);
double energy(const GridFunction& u, int p);

/// H^1 norm (\int u^2 + \int u_x^2)^{1/2}.
double h1_norm(const GridFunction& u);

}  // namespace gkdv
