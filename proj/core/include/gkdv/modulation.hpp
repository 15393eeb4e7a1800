#pragma once

#include <array>
#include <vector>

#include "gkdv/ansatz.hpp"
#include "gkdv/control.hpp"
#include "gkdv/grid.hpp"
#include "gkdv/linearized.hpp"

namespace gkdv {

/// Best-fit modulation parameters of a numerical state.
struct ModulationFit {
  double c = 1.0;
  double rho = 0.0;
  double z_h1 = 0.0;                              // ||u - u~(c, rho)||_H1
  std::array<double, 2> orth_residuals{0.0, 0.0}; // |int z q_c|, |int z y q_c|
  int newton_iters = 0;
};

/// Newton iteration on the two orthogonality functionals
///   J1 = int (u - u~)(x - rho) q_c(x - rho),  J2 = int (u - u~) q_c(x - rho)
/// with analytic Jacobian. Throws fit_error after 25 iterations without
/// convergence (tolerance 1e-10 ||u||_L2 on both residuals).
ModulationFit fit_modulation(const GridFunction& u, const SolitonParams& warm_start,
                             const ControlSpec& spec, const ParameterTrajectory& traj,
                             const CorrectorFamily& family, double t);

/// Virial weight machinery. vir_phi is even, C-infinity, equal to 1 on
/// [0, 1], exactly e^{-|x|} beyond 1.45, monotone on [0, inf) and pinched
/// between e^{-|x|} and 3 e^{-|x|}. vir_psi is its odd primitive.
double vir_phi(double x);
double vir_psi(double x);
double vir_psi_infinity();
double psi_a(double a0, double x);        // a0 * vir_psi(x / a0)
double psi_a_deriv(double a0, double x);  // vir_phi(x / a0)

/// Scalar diagnostics attached to one output time.
struct DiagnosticsSample {
  double t = 0.0;
  double virial = 0.0;       // int z^2 [a0 psi_inf + psi_{A0}(y)]  (shifted >= 0)
  double weighted_l2 = 0.0;  // int z^2 e^{-|y|/A0}
  double lyapunov = 0.0;     // quadratic-plus-nonlinear energy of z
  double c1_proxy = 0.0;     // |c' - eps f1| (filled by modulation_rates)
  double rho1_proxy = 0.0;   // |rho' - c - eps f2|
};

DiagnosticsSample diagnostics(const GridFunction& u, const ModulationFit& fit,
                              const ControlSpec& spec, const ParameterTrajectory& traj,
                              const CorrectorFamily& family, double t,
                              double a0_weight = 20.0);

/// Lyapunov functional alone (fit must have converged; u~ is rebuilt from it).
double lyapunov(const GridFunction& u, const ModulationFit& fit,
                const ControlSpec& spec, const ParameterTrajectory& traj,
                const CorrectorFamily& family, double t);

/// Differenced modulation-equation residuals along a fitted time series:
/// c1 = |c' - eps f1|, rho1 = |rho' - c - eps f2| with centered differences
/// over the output stride (one-sided at the ends).
void modulation_rates(const std::vector<double>& times, const std::vector<double>& cs,
                      const std::vector<double>& rhos, const ControlSpec& spec,
                      const ParameterTrajectory& traj, std::vector<double>& c1_out,
                      std::vector<double>& rho1_out);

/// ||u - q_c(. - rho)||_H1 against a pure soliton profile.
double h1_error_to_soliton(const GridFunction& u, const SolitonParams& params);

}  // namespace gkdv
