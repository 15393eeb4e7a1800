#include "gkdv/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gkdv/errors.hpp"
#include "gkdv/numerics.hpp"

namespace gkdv {

namespace {

// Loop bounds for integrals weighted by q_c(y): the weight is below 1e-17
// beyond |y| = 45 / sqrt(c).
std::pair<std::size_t, std::size_t> weight_window(const GridFunction& u, double rho,
                                                  double c) {
  const double reach = 45.0 / std::sqrt(c);
  const double lo = rho - reach;
  const double hi = rho + reach;
  const double dx = u.dx();
  auto i_lo = static_cast<std::ptrdiff_t>(std::floor((lo - u.x0) / dx));
  auto i_hi = static_cast<std::ptrdiff_t>(std::ceil((hi - u.x0) / dx));
  i_lo = std::max<std::ptrdiff_t>(i_lo, 0);
  i_hi = std::min<std::ptrdiff_t>(i_hi, static_cast<std::ptrdiff_t>(u.size()) - 1);
  return {static_cast<std::size_t>(i_lo), static_cast<std::size_t>(i_hi)};
}

}  // namespace

ModulationFit fit_modulation(const GridFunction& u, const SolitonParams& warm_start,
                             const ControlSpec& spec, const ParameterTrajectory& traj,
                             const CorrectorFamily& family, double t) {
  validate(warm_start);
  const double c0 = traj.c0(t);
  const double rho0 = traj.rho0(t);
  const double dx = u.dx();
  const double u_l2 = std::sqrt(integral_sq(u));
  const double tol = 1e-10 * std::max(u_l2, 1e-12);

  double c = warm_start.c;
  double rho = warm_start.rho;
  // fit sanity window: half the lower box bound, twice the upper
  const double c_min = 0.5 * spec.c_lower();
  const double c_max = 2.0 * spec.c_upper();

  ModulationFit fit;
  for (int iter = 0; iter < 25; ++iter) {
    const SolitonParams state{spec.p, c, rho};
    Ansatz ansatz(spec, family, state, c0, rho0);
    const auto [i_lo, i_hi] = weight_window(u, rho, c);

    double j1 = 0.0, j2 = 0.0;
    double j1_c = 0.0, j1_r = 0.0, j2_c = 0.0, j2_r = 0.0;
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
      const double y = u.x(i) - rho;
      const auto pt = ansatz.at(y);
      const SolitonParams base{spec.p, c, 0.0};
      const double q = qc(base, y);
      const double q1 = qc_deriv(base, y, 1);
      const double lam = qc_dc(base, y);
      const double z = u[i] - pt.u;
      const double du_drho = -pt.u_y + pt.u_rho;  // total rho-derivative at fixed x
      j1 += z * y * q;
      j2 += z * q;
      j1_c += -pt.u_c * y * q + z * y * lam;
      j1_r += -du_drho * y * q + z * (-q - y * q1);
      j2_c += -pt.u_c * q + z * lam;
      j2_r += -du_drho * q - z * q1;
    }
    j1 *= dx;
    j2 *= dx;
    j1_c *= dx;
    j1_r *= dx;
    j2_c *= dx;
    j2_r *= dx;

    fit.c = c;
    fit.rho = rho;
    fit.orth_residuals = {std::abs(j2), std::abs(j1)};
    fit.newton_iters = iter;
    if (std::abs(j1) <= tol && std::abs(j2) <= tol) break;
    if (iter == 24)
      throw fit_error("modulation fit did not converge at t=" + std::to_string(t), t);

    std::array<double, 2> delta{};
    if (!solve_2x2({j1_c, j1_r, j2_c, j2_r}, {-j1, -j2}, delta))
      throw fit_error("modulation fit Jacobian is singular at t=" + std::to_string(t), t);
    const double max_dc = 0.2 * c;
    const double max_dr = 2.0 / std::sqrt(c);
    c += std::clamp(delta[0], -max_dc, max_dc);
    rho += std::clamp(delta[1], -max_dr, max_dr);
    if (c < c_min || c > c_max)
      throw fit_error("modulation fit left the sanity window at t=" + std::to_string(t), t);
  }

  // Remainder norm over the full domain; u~ derivatives are analytic so the
  // periodic seam introduces no differentiation noise.
  const SolitonParams state{spec.p, fit.c, fit.rho};
  Ansatz ansatz(spec, family, state, c0, rho0);
  GridFunction ux = spectral_derivative(u, 1);
  double zz = 0.0, zxzx = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double ut, ut_y;
    ansatz.value_and_deriv(u.x(i) - fit.rho, ut, ut_y);
    const double z = u[i] - ut;
    const double zx = ux[i] - ut_y;
    zz += z * z;
    zxzx += zx * zx;
  }
  fit.z_h1 = std::sqrt((zz + zxzx) * dx);
  return fit;
}

// ---------------------------------------------------------------------------
// Virial weights
// ---------------------------------------------------------------------------

namespace {

constexpr double kBlendEnd = 1.45;

struct PsiTable {
  UniformTable cum;   // integral of vir_phi over [1, kBlendEnd]
  double at_blend_end;
  PsiTable() {
    const std::size_t n = 1025;
    const double h = (kBlendEnd - 1.0) / static_cast<double>(n - 1);
    auto values = cumulative_integral([](double x) { return vir_phi(x); }, 1.0, h, n);
    at_blend_end = 1.0 + values.back();
    cum = UniformTable(1.0, h, std::move(values));
  }
};

const PsiTable& psi_table() {
  static PsiTable table;
  return table;
}

}  // namespace

double vir_phi(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return 1.0;
  if (ax >= kBlendEnd) return std::exp(-ax);
  const double s = cutoff_shape(2.0 * (ax - 1.0) / (kBlendEnd - 1.0) - 1.0);
  return std::exp(-ax * s);
}

double vir_psi(double x) {
  const double ax = std::abs(x);
  double val;
  if (ax <= 1.0)
    val = ax;
  else if (ax < kBlendEnd)
    val = 1.0 + psi_table().cum(ax);
  else
    val = psi_table().at_blend_end + std::exp(-kBlendEnd) - std::exp(-ax);
  return x < 0.0 ? -val : val;
}

double vir_psi_infinity() { return psi_table().at_blend_end + std::exp(-kBlendEnd); }

double psi_a(double a0, double x) { return a0 * vir_psi(x / a0); }

double psi_a_deriv(double a0, double x) { return vir_phi(x / a0); }

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

DiagnosticsSample diagnostics(const GridFunction& u, const ModulationFit& fit,
                              const ControlSpec& spec, const ParameterTrajectory& traj,
                              const CorrectorFamily& family, double t,
                              double a0_weight) {
  const SolitonParams state{spec.p, fit.c, fit.rho};
  Ansatz ansatz(spec, family, state, traj.c0(t), traj.rho0(t));
  GridFunction ux = spectral_derivative(u, 1);

  const double dx = u.dx();
  const double shift = a0_weight * vir_psi_infinity();
  double virial = 0.0, weighted = 0.0, quad = 0.0, nonlin = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double y = u.x(i) - fit.rho;
    double ut, ut_y;
    ansatz.value_and_deriv(y, ut, ut_y);
    const double z = u[i] - ut;
    const double zx = ux[i] - ut_y;
    virial += z * z * (shift + psi_a(a0_weight, y));
    weighted += z * z * std::exp(-std::abs(y) / a0_weight);
    quad += zx * zx + fit.c * z * z;
    const double up1 = std::pow(u[i], spec.p + 1);
    const double tp1 = std::pow(ut, spec.p + 1);
    nonlin += up1 - tp1 - (spec.p + 1) * std::pow(ut, spec.p) * z;
  }
  DiagnosticsSample out;
  out.t = t;
  out.virial = virial * dx;
  out.weighted_l2 = weighted * dx;
  out.lyapunov = 0.5 * quad * dx - nonlin * dx / (spec.p + 1);
  return out;
}

double lyapunov(const GridFunction& u, const ModulationFit& fit,
                const ControlSpec& spec, const ParameterTrajectory& traj,
                const CorrectorFamily& family, double t) {
  return diagnostics(u, fit, spec, traj, family, t).lyapunov;
}

void modulation_rates(const std::vector<double>& times, const std::vector<double>& cs,
                      const std::vector<double>& rhos, const ControlSpec& spec,
                      const ParameterTrajectory& traj, std::vector<double>& c1_out,
                      std::vector<double>& rho1_out) {
  const std::size_t n = times.size();
  c1_out.assign(n, 0.0);
  rho1_out.assign(n, 0.0);
  if (n < 3) return;
  for (std::size_t i = 0; i < n; ++i) {
    double c_dot, rho_dot;
    if (i == 0) {
      c_dot = (cs[1] - cs[0]) / (times[1] - times[0]);
      rho_dot = (rhos[1] - rhos[0]) / (times[1] - times[0]);
    } else if (i + 1 == n) {
      c_dot = (cs[n - 1] - cs[n - 2]) / (times[n - 1] - times[n - 2]);
      rho_dot = (rhos[n - 1] - rhos[n - 2]) / (times[n - 1] - times[n - 2]);
    } else {
      c_dot = (cs[i + 1] - cs[i - 1]) / (times[i + 1] - times[i - 1]);
      rho_dot = (rhos[i + 1] - rhos[i - 1]) / (times[i + 1] - times[i - 1]);
    }
    const double dc = traj.c0(times[i]) - cs[i];
    const double drho = traj.rho0(times[i]) - rhos[i];
    const double slope = spec.a0_deriv(spec.eps * rhos[i], 1);
    const double f1 = slope * f1_reduced(spec.p, cs[i], dc);
    const double f2 = slope * f2_reduced(spec.p, cs[i], dc, drho);
    c1_out[i] = std::abs(c_dot - spec.eps * f1);
    rho1_out[i] = std::abs(rho_dot - cs[i] - spec.eps * f2);
  }
}

double h1_error_to_soliton(const GridFunction& u, const SolitonParams& params) {
  GridFunction ux = spectral_derivative(u, 1);
  double zz = 0.0, zxzx = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double y = u.x(i) - params.rho;
    const double z = u[i] - qc(params, y);
    const double zx = ux[i] - qc_deriv(params, y, 1);
    zz += z * z;
    zxzx += zx * zx;
  }
  return std::sqrt((zz + zxzx) * u.dx());
}

}  // namespace gkdv
