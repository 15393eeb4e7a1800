#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gkdv/control.hpp"
#include "gkdv/numerics.hpp"
#include "gkdv/soliton.hpp"

namespace gkdv {

/// Non-periodic truncated interval for the linearized operator
/// L v = -v_yy + c v - p q_c^{p-1} v, discretized with 4th-order centered
/// differences (2nd order at the two near-boundary rows, far-field closure
/// rows at both ends).
struct OperatorGrid {
  double y_min = -80.0;
  double y_max = 80.0;
  std::size_t n = 4096;
  double c = 1.0;
  int p = 2;

  double h() const { return (y_max - y_min) / static_cast<double>(n - 1); }
  double y(std::size_t i) const { return y_min + h() * static_cast<double>(i); }
};

/// Default operator grid [-80, 80] / sqrt(c) with n points.
OperatorGrid make_operator_grid(int p, double c, std::size_t n = 4096);

/// Applies the discrete operator to samples of v on the grid.
std::vector<double> apply_L(const OperatorGrid& grid, std::span<const double> v);

/// phi_c(y) = -q_c'/q_c = sqrt(c) tanh((p-1) sqrt(c) y / 2); odd, bounded,
/// with limits +-sqrt(c).
double phi_c(double c, int p, double y);

/// Quadrature-derived coefficients of the reduced (profile-slope-free)
/// modulation functions. With dc = c0 - c and drho = rho0 - rho:
///   f1 = a0'(eps rho) * f1_reduced(c, dc)
///   f2 = a0'(eps rho) * f2_reduced(c, dc, drho)
struct ModulationCoefficients {
  int p = 2;
  double lambda_p = 0.0;
  double mu_p = 0.0;     // leading f2 coefficient (zero for p = 3)
  double nu_p = 0.0;     // f2 coefficient on (c0 - c)
  double xi_p = 0.0;     // f2 coefficient on (rho0 - rho)
  double kappa_p = 0.0;  // f1 coefficient on (c0 - c)
};
const ModulationCoefficients& modulation_coefficients(int p);

double f1_reduced(int p, double c, double dc);
double f2_reduced(int p, double c, double dc, double drho);

/// f2 including the (c0 - c) and (rho0 - rho) corrections, with the
/// profile-slope factor a0'(eps rho) attached.
double compute_f2(const SolitonParams& state, double c0, double rho0,
                  const ControlSpec& spec);

/// Closed-form right-hand side of the corrector equation, normalized by the
/// profile slope: F1t = f1_reduced * dqc/dc + q_c^2 - f2_reduced * q_c'
///                      + (c0-c) (dqc/dc) q_c + (rho0-rho) q_c' q_c.
/// Orthogonal to q_c by construction of f1_reduced.
std::function<double(double)> f1_tilde(const SolitonParams& state, double c0,
                                       double rho0);

/// Samples of f1_tilde on an operator grid.
std::vector<double> build_F1_tilde(const OperatorGrid& grid, const SolitonParams& state,
                                   double c0, double rho0);

/// First-order corrector profile and its decomposition data.
struct Corrector {
  OperatorGrid grid;
  std::vector<double> a;       // samples of the corrector on the grid
  double beta_c = 0.0;         // far-field strength: a(-inf) = -2 sqrt(c) beta_c
  double mu_c = 0.0;           // kernel (q_c') content of the solution
  double delta_c = 0.0;        // dqc/dc content induced by the f2 term
  double f2 = 0.0;             // f2 evaluated at the inputs (slope factor attached)
  double residual_pde = 0.0;   // max-norm of (L a)_y - F1t on the interior
  std::array<double, 2> residual_orth{0.0, 0.0};  // |int a q_c|, |int a y q_c|
  double slack_kernel = 0.0;   // bordered multiplier along q_c' (consistency check)
  double slack_f2 = 0.0;       // bordered multiplier along q_c  (f2 consistency check)
};

/// Solves (L a)_y = F1t with a(+inf) = 0 and both orthogonality conditions
/// int a q_c = int a y q_c = 0 through a bordered dense LU: the two extra
/// columns carry q_c' (kernel direction) and q_c (equivalent to an f2
/// adjustment), the two extra rows carry the orthogonality constraints.
Corrector solve_corrector_rhs(const OperatorGrid& grid,
                              const std::function<double(double)>& rhs,
                              double f2_red = 0.0);

/// Full corrector at state (c, rho) against reference parameters (c0, rho0).
Corrector solve_corrector(const OperatorGrid& grid, const SolitonParams& state,
                          double c0, double rho0, const ControlSpec& spec);

/// Max-norm discrepancy between a direct solve at scaling c and the rescaled
/// unit-scaling solution c^{(7-3p)/(2(p-1))} a_1(sqrt(c) y) in the pure
/// scaling regime c0 = c, rho0 = rho.
double corrector_scaling_check(int p, double c, std::size_t n = 4096);

/// Solves L d = g for a decaying right-hand side orthogonal to the kernel
/// (diagnostic helper; d is normalized to zero kernel content).
std::vector<double> solve_schwartz_rhs(const OperatorGrid& grid,
                                       std::span<const double> g);

/// Pointwise corrector data used by the ansatz and the modulation fit.
struct CorrectorEval {
  double a = 0.0;      // corrector value
  double a_y = 0.0;    // d/dy
  double a_yy = 0.0;   // d2/dy2 (through the operator identity)
  double a_yyy = 0.0;  // d3/dy3 (through the operator identity)
  double a_c = 0.0;    // partial in c at fixed (dc, drho)
  double a_dc = 0.0;   // partial in dc = c0 - c
  double a_drho = 0.0; // partial in drho = rho0 - rho
};

/// Linearity + scaling representation of the corrector family: four unit
/// solves at c = 1 are combined with closed-form coefficients so that
/// evaluation at any admissible (c, dc, drho, y) costs four table lookups.
class CorrectorFamily {
 public:
  CorrectorFamily(int p, std::size_t n = 4096);

  int exponent() const { return p_; }
  CorrectorEval eval(double c, double dc, double drho, double y) const;

  /// Far-field strength of the combined corrector.
  double beta(double c, double dc) const;

  /// Unit solutions (testing hook): index 0..3.
  const Corrector& unit(std::size_t k) const { return units_[k]; }

 private:
  struct Unit {
    UniformTable value;
    UniformTable deriv;
    UniformTable g_eff;           // L u on the reference grid
    std::function<double(double)> rhs;        // (L u)_y closed form
    std::function<double(double)> g_eff_der;  // derivative of g_eff
  };
  int p_ = 2;
  std::array<Corrector, 4> units_{};
  std::array<Unit, 4> tab_{};
  double int_rhs_[4] = {0.0, 0.0, 0.0, 0.0};

  std::array<double, 4> coefficients(double c, double dc, double drho) const;
  std::array<double, 4> coefficients_dc_partial(double c) const;
  std::array<double, 4> coefficients_drho_partial(double c) const;
};

/// Writes (y, a, q_c, F1t) rows as CSV for inspection.
void dump_corrector_csv(const Corrector& corrector, const SolitonParams& state,
                        double c0, double rho0, const std::string& path);

}  // namespace gkdv
