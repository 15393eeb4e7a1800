#pragma once

#include <array>

#include "gkdv/control.hpp"
#include "gkdv/grid.hpp"
#include "gkdv/linearized.hpp"
#include "gkdv/soliton.hpp"

namespace gkdv {

/// Smooth cutoff eta_eps(y) = eta(eps y + 2): identically 0 for y <= -3/eps,
/// identically 1 for y >= -1/eps, built from the integrated C-infinity bump
/// exp(-1/(1 - s^2)). k up to 3 gives y-derivatives.
double cutoff_eta(double eps, double y);
double cutoff_eta_deriv(double eps, double y, int k);

/// The underlying transition eta(s) on [-1, 1] (testing hook).
double cutoff_shape(double s);
double cutoff_shape_deriv(double s, int k);

/// Pointwise data of the localized approximate solution
/// u~ = eta_eps(y) (q_c(y) + eps d A(y)), d = a0'(eps rho).
struct AnsatzPoint {
  double u = 0.0;
  double u_y = 0.0;
  double u_yy = 0.0;
  double u_yyy = 0.0;
  double u_c = 0.0;     // partial in the fitted scaling c
  double u_rho = 0.0;   // explicit partial in rho (profile slope + drho), y fixed
  double u_c0 = 0.0;    // partial in the reference scaling c0
  double u_rho0 = 0.0;  // partial in the reference position rho0
};

/// Localized first-order ansatz around a modulated soliton. The corrector
/// enters through the precomputed family; with_corrector = false ablates it
/// (A = 0) for falsification runs.
class Ansatz {
 public:
  Ansatz(const ControlSpec& spec, const CorrectorFamily& family,
         const SolitonParams& state, double c0, double rho0,
         bool with_corrector = true);

  const SolitonParams& state() const { return state_; }
  double c0() const { return c0_; }
  double rho0() const { return rho0_; }
  double slope() const { return d_; }  // d = a0'(eps rho)
  const ControlSpec& spec() const { return spec_; }

  AnsatzPoint at(double y) const;
  double value(double y) const;

  /// u~ and its x-derivative at a point (cheap pair for fits and norms).
  void value_and_deriv(double y, double& u, double& u_y) const;

  /// Full residual of the controlled equation on the exactly-modulated
  /// trajectory (the finite-dimensional part cancels by construction):
  /// S = u~_t + u~_xxx + p u~^{p-1} u~_x + eps a0'(eps x) q_{c0}(x - rho0) u~.
  double residual_point(double y) const;

  /// Samples u~ onto a periodic grid (y measured from rho).
  GridFunction sample(const GridFunction& grid_template) const;

 private:
  ControlSpec spec_;
  const CorrectorFamily* family_;
  SolitonParams state_;
  double c0_ = 1.0;
  double rho0_ = 0.0;
  double d_ = 0.0;
  bool with_corrector_ = true;

  // rates of the exactly-modulated trajectory
  double c_dot_ = 0.0, rho_dot_ = 0.0, c0_dot_ = 0.0, rho0_dot_ = 0.0;
};

struct ResidualReport {
  // The finite-dimensional part (c' - eps f1, rho' - c - eps f2): identically
  // zero here because the evaluation chains the exactly-modulated rates.
  std::array<double, 2> dynamical{0.0, 0.0};
  double tilde_s_h1 = 0.0;  // H1 norm of the residual on y > -2/eps
  double proj_q = 0.0;      // |int q_c S|
  double proj_yq = 0.0;     // |int y q_c S|
};

/// Measures the residual of the ansatz on a uniform sampling window
/// [-2/eps, 60/sqrt(c)] with 6th-order differencing for the H1 part.
ResidualReport ansatz_residual(const Ansatz& ansatz, double dy = 0.02);

}  // namespace gkdv
