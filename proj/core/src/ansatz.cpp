#include "gkdv/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "gkdv/numerics.hpp"

namespace gkdv {

namespace {

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

double bump_deriv(double s, int k) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double b = bump(s);
  const double r = 1.0 - s * s;
  const double l1 = -2.0 * s / (r * r);  // (log b)'
  if (k == 1) return b * l1;
  const double l2 = -2.0 / (r * r) - 8.0 * s * s / (r * r * r);  // (log b)''
  return b * (l1 * l1 + l2);
}

struct CutoffTable {
  UniformTable cdf;
  double total;
  CutoffTable() {
    const std::size_t n = 4097;
    const double h = 2.0 / static_cast<double>(n - 1);
    auto cum = cumulative_integral(bump, -1.0, h, n);
    total = cum.back();
    cdf = UniformTable(-1.0, h, std::move(cum));
  }
};

const CutoffTable& cutoff_table() {
  static CutoffTable table;
  return table;
}

}  // namespace

double cutoff_shape(double s) {
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const auto& t = cutoff_table();
  // clamp away sub-epsilon interpolation wiggle near the flat ends
  return std::clamp(t.cdf(s) / t.total, 0.0, 1.0);
}

double cutoff_shape_deriv(double s, int k) {
  if (k < 0 || k > 3) throw std::domain_error("cutoff_shape_deriv: k must be 0..3");
  if (k == 0) return cutoff_shape(s);
  const auto& t = cutoff_table();
  if (k == 1) return bump(s) / t.total;
  return bump_deriv(s, k - 1) / t.total;
}

double cutoff_eta(double eps, double y) {
  if (!(eps > 0.0)) throw std::domain_error("cutoff_eta: eps must be positive");
  return cutoff_shape(eps * y + 2.0);
}

double cutoff_eta_deriv(double eps, double y, int k) {
  if (!(eps > 0.0)) throw std::domain_error("cutoff_eta_deriv: eps must be positive");
  double scale = 1.0;
  for (int i = 0; i < k; ++i) scale *= eps;
  return scale * cutoff_shape_deriv(eps * y + 2.0, k);
}

Ansatz::Ansatz(const ControlSpec& spec, const CorrectorFamily& family,
               const SolitonParams& state, double c0, double rho0,
               bool with_corrector)
    : spec_(spec),
      family_(&family),
      state_(state),
      c0_(c0),
      rho0_(rho0),
      with_corrector_(with_corrector) {
  validate(state);
  if (family.exponent() != state.p)
    throw std::domain_error("Ansatz: corrector family exponent does not match the state");
  d_ = spec.a0_deriv(spec.eps * state.rho, 1);
  const double dc = c0_ - state_.c;
  const double drho = rho0_ - state_.rho;
  const double f1 = d_ * f1_reduced(state_.p, state_.c, dc);
  const double f2 = d_ * f2_reduced(state_.p, state_.c, dc, drho);
  c_dot_ = spec.eps * f1;
  rho_dot_ = state_.c + spec.eps * f2;
  c0_dot_ = spec.eps * spec.a0_deriv(spec.eps * rho0_, 1) * f1_reduced(state_.p, c0_, 0.0);
  rho0_dot_ = c0_;
}

AnsatzPoint Ansatz::at(double y) const {
  const double eps = spec_.eps;
  const SolitonParams base{state_.p, state_.c, 0.0};
  const double q = qc(base, y);
  const double q1 = qc_deriv(base, y, 1);
  const double q2 = qc_deriv(base, y, 2);
  const double q3 = qc_deriv(base, y, 3);
  const double lam = qc_dc(base, y);

  CorrectorEval a{};
  if (with_corrector_)
    a = family_->eval(state_.c, c0_ - state_.c, rho0_ - state_.rho, y);

  const double w = eps * d_;
  const double v = q + w * a.a;
  const double v_y = q1 + w * a.a_y;
  const double v_yy = q2 + w * a.a_yy;
  const double v_yyy = q3 + w * a.a_yyy;
  const double v_c = lam + w * (a.a_c - a.a_dc);
  const double slope2 = spec_.a0_deriv(spec_.eps * state_.rho, 2);
  const double v_rho = eps * eps * slope2 * a.a - w * a.a_drho;
  const double v_c0 = w * a.a_dc;
  const double v_rho0 = w * a.a_drho;

  const double e0 = cutoff_eta(eps, y);
  const double e1 = cutoff_eta_deriv(eps, y, 1);
  const double e2 = cutoff_eta_deriv(eps, y, 2);
  const double e3 = cutoff_eta_deriv(eps, y, 3);

  AnsatzPoint out;
  out.u = e0 * v;
  out.u_y = e1 * v + e0 * v_y;
  out.u_yy = e2 * v + 2.0 * e1 * v_y + e0 * v_yy;
  out.u_yyy = e3 * v + 3.0 * e2 * v_y + 3.0 * e1 * v_yy + e0 * v_yyy;
  out.u_c = e0 * v_c;
  out.u_rho = e0 * v_rho;
  out.u_c0 = e0 * v_c0;
  out.u_rho0 = e0 * v_rho0;
  return out;
}

double Ansatz::value(double y) const {
  const double eps = spec_.eps;
  const double e0 = cutoff_eta(eps, y);
  if (e0 == 0.0) return 0.0;
  const SolitonParams base{state_.p, state_.c, 0.0};
  double v = qc(base, y);
  if (with_corrector_)
    v += eps * d_ * family_->eval(state_.c, c0_ - state_.c, rho0_ - state_.rho, y).a;
  return e0 * v;
}

void Ansatz::value_and_deriv(double y, double& u, double& u_y) const {
  const double eps = spec_.eps;
  const double e0 = cutoff_eta(eps, y);
  const double e1 = cutoff_eta_deriv(eps, y, 1);
  if (e0 == 0.0 && e1 == 0.0) {
    u = 0.0;
    u_y = 0.0;
    return;
  }
  const SolitonParams base{state_.p, state_.c, 0.0};
  double v = qc(base, y);
  double v_y = qc_deriv(base, y, 1);
  if (with_corrector_) {
    const auto a = family_->eval(state_.c, c0_ - state_.c, rho0_ - state_.rho, y);
    v += eps * d_ * a.a;
    v_y += eps * d_ * a.a_y;
  }
  u = e0 * v;
  u_y = e1 * v + e0 * v_y;
}

double Ansatz::residual_point(double y) const {
  const auto pt = at(y);
  // Chain rule through (c, rho, c0, rho0); position enters as u(y = x - rho).
  const double u_t = -rho_dot_ * pt.u_y + c_dot_ * pt.u_c + rho_dot_ * pt.u_rho +
                     c0_dot_ * pt.u_c0 + rho0_dot_ * pt.u_rho0;
  const double x = y + state_.rho;
  const SolitonParams ref{state_.p, c0_, 0.0};
  const double control = spec_.eps * spec_.a0_deriv(spec_.eps * x, 1) *
                         qc(ref, x - rho0_) * pt.u;
  const double nonlinear = state_.p * std::pow(pt.u, state_.p - 1) * pt.u_y;
  return u_t + pt.u_yyy + nonlinear + control;
}

GridFunction Ansatz::sample(const GridFunction& grid_template) const {
  GridFunction out = grid_template;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = value(out.x(i) - state_.rho);
  return out;
}

ResidualReport ansatz_residual(const Ansatz& ansatz, double dy) {
  const double eps = ansatz.spec().eps;
  const double c = ansatz.state().c;
  const double y_lo = -2.0 / eps;
  const double y_hi = 60.0 / std::sqrt(c);
  const auto n = static_cast<std::size_t>(std::ceil((y_hi - y_lo) / dy)) + 1;
  const double h = (y_hi - y_lo) / static_cast<double>(n - 1);

  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = ansatz.residual_point(y_lo + h * static_cast<double>(i));
  auto sx = derivative_uniform(s, h);

  std::vector<double> s2(n), sx2(n), wq(n), wyq(n);
  const SolitonParams base{ansatz.state().p, c, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double y = y_lo + h * static_cast<double>(i);
    s2[i] = s[i] * s[i];
    sx2[i] = sx[i] * sx[i];
    const double q = qc(base, y);
    wq[i] = q * s[i];
    wyq[i] = y * q * s[i];
  }
  ResidualReport out;
  out.dynamical = {0.0, 0.0};  // rates are chained exactly
  out.tilde_s_h1 = std::sqrt(trapezoid(s2, h) + trapezoid(sx2, h));
  out.proj_q = std::abs(trapezoid(wq, h));
  out.proj_yq = std::abs(trapezoid(wyq, h));
  return out;
}

}  // namespace gkdv
