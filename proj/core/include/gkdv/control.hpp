#pragma once

#include <cstddef>
#include <vector>

namespace gkdv {

/// Control configuration: target velocity c_f, slow parameter eps, horizon
/// exponent delta0, profile steepness gamma0, and the derived profile
/// amplitude a_inf that makes the accumulated action land exactly on c_f.
struct ControlSpec {
  int p = 2;
  double c_f = 2.0;
  double eps = 0.05;
  double delta0 = 0.05;
  double gamma0 = 1.0;
  double a_inf = 0.0;  // derived; see make_control_spec

  double c_lower() const;  // c_m = min(c_f, 1) / 2
  double c_upper() const;  // c_M = 2 max(1, c_f)
  double horizon() const;  // eps^{-(1+delta0)}

  /// Concrete profile a0(x) = (a_inf / 2)(1 + tanh(gamma0 x)) and its first
  /// three derivatives. Monotone with the sign of a_inf, saturates to a_inf
  /// on the right, sup |a0| = |a_inf|.
  double a0(double x) const;
  double a0_deriv(double x, int k) const;
};

/// Amplitude that drives the scaling from 1 to c_f:
///   p = 2:    -log(c_f) / lambda_2
///   p = 3, 4: (p-1) / (lambda_p (p-2)) (1 - c_f^{(p-2)/(p-1)}).
/// Zero exactly at c_f = 1; c_f <= 0 is a domain error.
double a_infinity(int p, double c_f, double lambda_p);

/// Validates the inputs and fills in a_inf.
ControlSpec make_control_spec(int p, double c_f, double eps, double delta0 = 0.05,
                              double gamma0 = 1.0);

/// Slow-parameter trajectory (c0, rho0)(t) stored at a uniform stride with
/// local cubic interpolation in between. Immutable after construction.
class ParameterTrajectory {
 public:
  ParameterTrajectory() = default;
  ParameterTrajectory(double stride, std::vector<double> c0, std::vector<double> rho0);

  double t_end() const { return stride_ * static_cast<double>(c0_.size() - 1); }
  double stride() const { return stride_; }
  std::size_t size() const { return c0_.size(); }
  double node_time(std::size_t i) const { return stride_ * static_cast<double>(i); }
  double node_c0(std::size_t i) const { return c0_[i]; }
  double node_rho0(std::size_t i) const { return rho0_[i]; }

  /// Interpolated values; t outside [0, t_end] throws std::out_of_range.
  double c0(double t) const;
  double rho0(double t) const;

 private:
  double stride_ = 0.0;
  std::vector<double> c0_;
  std::vector<double> rho0_;
};

/// Integrates c0' = -eps lambda_p a0'(eps rho0) c0^{p/(p-1)}, rho0' = c0 from
/// (c0, rho0)(0) = (1, -eps^{-(1+delta0)}) up to t_end (plus a small margin so
/// PDE stage times just beyond t_end stay interpolable). Local error 1e-10.
/// The returned nodes are checked against the box bounds
/// c_m <= c0 <= c_M and strict monotonicity of rho0.
ParameterTrajectory integrate_parameter_ode(const ControlSpec& spec, double t_end,
                                            double stride = 0.25);

/// Leading-order closed form of c0 given the accumulated profile value:
///   p = 2:    exp(-lambda_2 a0(eps rho0))
///   p = 3, 4: [1 - lambda_p (p-2)/(p-1) a0(eps rho0)]^{(p-1)/(p-2)}
/// For p = 3, 4 a non-positive bracket is a domain error.
double closed_form_c0(const ControlSpec& spec, double rho0);

/// Exact first integral of the parameter system, accounting for the profile
/// value at the starting position rho0_start (the leading-order form drops it).
double closed_form_c0(const ControlSpec& spec, double rho0, double rho0_start);

/// Space-time control a(t, x) = -eps a0'(eps x) q_{c0(t)}(x - rho0(t)).
double eval_control(const ControlSpec& spec, const ParameterTrajectory& traj,
                    double t, double x);

}  // namespace gkdv
