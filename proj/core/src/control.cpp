#include "gkdv/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gkdv/errors.hpp"
#include "gkdv/numerics.hpp"
#include "gkdv/soliton.hpp"

namespace gkdv {

double ControlSpec::c_lower() const { return 0.5 * std::min(c_f, 1.0); }
double ControlSpec::c_upper() const { return 2.0 * std::max(c_f, 1.0); }
double ControlSpec::horizon() const { return std::pow(eps, -1.0 - delta0); }

double ControlSpec::a0(double x) const {
  return 0.5 * a_inf * (1.0 + std::tanh(gamma0 * x));
}

double ControlSpec::a0_deriv(double x, int k) const {
  if (k < 0 || k > 3) throw std::domain_error("a0_deriv: k must be 0..3");
  if (k == 0) return a0(x);
  const double u = gamma0 * x;
  const double t = std::tanh(u);
  const double s = 1.0 - t * t;  // sech^2
  const double g = gamma0;
  switch (k) {
    case 1: return 0.5 * a_inf * g * s;
    case 2: return -a_inf * g * g * s * t;
    default: return a_inf * g * g * g * s * (2.0 * t * t - s);
  }
}

double a_infinity(int p, double c_f, double lambda_p) {
  validate_exponent(p);
  if (!(c_f > 0.0)) throw std::domain_error("a_infinity: c_f must be positive");
  if (p == 2) return -std::log(c_f) / lambda_p;
  const double expo = static_cast<double>(p - 2) / (p - 1);
  return (p - 1) / (lambda_p * (p - 2)) * (1.0 - std::pow(c_f, expo));
}

ControlSpec make_control_spec(int p, double c_f, double eps, double delta0,
                              double gamma0) {
  validate_exponent(p);
  if (!(c_f > 0.0)) throw std::domain_error("make_control_spec: c_f must be positive");
  if (!(eps > 0.0 && eps < 0.5)) throw std::domain_error("make_control_spec: eps out of range");
  if (!(delta0 > 0.0)) throw std::domain_error("make_control_spec: delta0 must be positive");
  if (!(gamma0 > 0.0)) throw std::domain_error("make_control_spec: gamma0 must be positive");
  ControlSpec spec;
  spec.p = p;
  spec.c_f = c_f;
  spec.eps = eps;
  spec.delta0 = delta0;
  spec.gamma0 = gamma0;
  spec.a_inf = a_infinity(p, c_f, quadrature_constants(p).lambda_p);
  return spec;
}

ParameterTrajectory::ParameterTrajectory(double stride, std::vector<double> c0,
                                         std::vector<double> rho0)
    : stride_(stride), c0_(std::move(c0)), rho0_(std::move(rho0)) {
  if (c0_.size() != rho0_.size() || c0_.size() < 4)
    throw std::invalid_argument("ParameterTrajectory: need >= 4 matching nodes");
}

namespace {

double interp_nodes(const std::vector<double>& v, double stride, double t) {
  const double u = t / stride;
  auto i = static_cast<std::ptrdiff_t>(std::floor(u));
  i = std::clamp<std::ptrdiff_t>(i - 1, 0, static_cast<std::ptrdiff_t>(v.size()) - 4);
  const double s = u - static_cast<double>(i);
  const double s0 = s, s1 = s - 1.0, s2 = s - 2.0, s3 = s - 3.0;
  const auto k = static_cast<std::size_t>(i);
  return -s1 * s2 * s3 / 6.0 * v[k] + s0 * s2 * s3 / 2.0 * v[k + 1] -
         s0 * s1 * s3 / 2.0 * v[k + 2] + s0 * s1 * s2 / 6.0 * v[k + 3];
}

}  // namespace

double ParameterTrajectory::c0(double t) const {
  if (t < -1e-12 || t > t_end() + 1e-12)
    throw std::out_of_range("ParameterTrajectory: time outside stored range");
  return interp_nodes(c0_, stride_, std::clamp(t, 0.0, t_end()));
}

double ParameterTrajectory::rho0(double t) const {
  if (t < -1e-12 || t > t_end() + 1e-12)
    throw std::out_of_range("ParameterTrajectory: time outside stored range");
  return interp_nodes(rho0_, stride_, std::clamp(t, 0.0, t_end()));
}

ParameterTrajectory integrate_parameter_ode(const ControlSpec& spec, double t_end,
                                            double stride) {
  if (!(t_end > 0.0)) throw std::domain_error("integrate_parameter_ode: t_end must be positive");
  const auto& qc = quadrature_constants(spec.p);
  const double lambda = qc.lambda_p;
  const double expo = static_cast<double>(spec.p) / (spec.p - 1);

  // Cover a margin past t_end so stage times of the PDE stepper interpolate.
  const double t_cover = t_end + 4.0 * stride;
  const auto n_nodes = static_cast<std::size_t>(std::ceil(t_cover / stride)) + 1;
  const double t_final = stride * static_cast<double>(n_nodes - 1);

  std::vector<double> c0s, rho0s;
  c0s.reserve(n_nodes);
  rho0s.reserve(n_nodes);

  std::array<double, 2> y{1.0, -spec.horizon()};
  auto rhs = [&spec, lambda, expo](double, std::span<const double> yv, std::span<double> dy) {
    dy[0] = -spec.eps * lambda * spec.a0_deriv(spec.eps * yv[1], 1) * std::pow(yv[0], expo);
    dy[1] = yv[0];
  };
  integrate_ode(rhs, y, 0.0, t_final, stride,
                [&](double, std::span<const double> yv) {
                  c0s.push_back(yv[0]);
                  rho0s.push_back(yv[1]);
                });

  const double c_m = spec.c_lower();
  const double c_M = spec.c_upper();
  for (std::size_t i = 0; i < c0s.size(); ++i) {
    if (c0s[i] < c_m - 1e-9 || c0s[i] > c_M + 1e-9)
      throw integration_error("parameter trajectory left the admissible scaling box");
    if (i > 0 && !(rho0s[i] > rho0s[i - 1]))
      throw integration_error("parameter trajectory position is not increasing");
  }
  return ParameterTrajectory(stride, std::move(c0s), std::move(rho0s));
}

double closed_form_c0(const ControlSpec& spec, double rho0) {
  const double lambda = quadrature_constants(spec.p).lambda_p;
  const double a = spec.a0(spec.eps * rho0);
  if (spec.p == 2) return std::exp(-lambda * a);
  const double bracket = 1.0 - lambda * (spec.p - 2) / (spec.p - 1.0) * a;
  if (!(bracket > 0.0))
    throw std::domain_error("closed_form_c0: profile too large for the power-law branch");
  return std::pow(bracket, (spec.p - 1.0) / (spec.p - 2));
}

double closed_form_c0(const ControlSpec& spec, double rho0, double rho0_start) {
  const double lambda = quadrature_constants(spec.p).lambda_p;
  const double da = spec.a0(spec.eps * rho0) - spec.a0(spec.eps * rho0_start);
  if (spec.p == 2) return std::exp(-lambda * da);
  const double bracket = 1.0 - lambda * (spec.p - 2) / (spec.p - 1.0) * da;
  if (!(bracket > 0.0))
    throw std::domain_error("closed_form_c0: profile too large for the power-law branch");
  return std::pow(bracket, (spec.p - 1.0) / (spec.p - 2));
}

double eval_control(const ControlSpec& spec, const ParameterTrajectory& traj,
                    double t, double x) {
  const double c0 = traj.c0(t);
  const double rho0 = traj.rho0(t);
  SolitonParams params{spec.p, c0, rho0};
  return -spec.eps * spec.a0_deriv(spec.eps * x, 1) * qc(params, x - rho0);
}

}  // namespace gkdv
