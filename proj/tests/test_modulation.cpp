#include <doctest.h>

#include <cmath>

#include "gkdv/errors.hpp"
#include "gkdv/modulation.hpp"
#include "gkdv/numerics.hpp"

using namespace gkdv;

TEST_CASE("fit recovers the parameters of an exact ansatz state") {
  ControlSpec spec = make_control_spec(2, 2.0, 0.05);
  CorrectorFamily family(2, 2048);
  ParameterTrajectory traj = integrate_parameter_ode(spec, 10.0);
  GridFunction grid(traj.rho0(0.0) - 200.0, 512.0, 8192);
  const double t = 6.0;
  SolitonParams truth{2, 1.17, traj.rho0(t) + 0.23};
  Ansatz an(spec, family, truth, traj.c0(t), traj.rho0(t));
  GridFunction u = an.sample(grid);
  ModulationFit fit = fit_modulation(u, {2, 1.0, traj.rho0(t)}, spec, traj, family, t);
  CHECK(std::abs(fit.c - truth.c) < 1e-12);
  CHECK(std::abs(fit.rho - truth.rho) < 1e-12);
  CHECK(fit.z_h1 < 1e-6);  // spectral-derivative floor of interpolated samples
  CHECK(fit.newton_iters <= 6);
  CHECK(fit.orth_residuals[0] < 1e-10 * std::sqrt(integral_sq(u)));
  CHECK(fit.orth_residuals[1] < 1e-10 * std::sqrt(integral_sq(u)));
}

TEST_CASE("fit locates a shifted free soliton from a cold-ish start") {
  ControlSpec spec = make_control_spec(2, 1.0, 0.05);  // flat profile, d = 0
  CorrectorFamily family(2, 2048);
  ParameterTrajectory traj = integrate_parameter_ode(spec, 2.0);
  GridFunction u(-100.0 + spec.horizon() * 0.0, 256.0, 4096);
  SolitonParams truth{2, 1.0, 0.3};
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = qc(truth, u.x(i) - truth.rho);
  ModulationFit fit = fit_modulation(u, {2, 1.0, 0.0}, spec, traj, family, 0.0);
  CHECK(std::abs(fit.c - 1.0) < 1e-10);
  CHECK(std::abs(fit.rho - 0.3) < 1e-10);
}

TEST_CASE("fit is first-order insensitive to orthogonal perturbations") {
  ControlSpec spec = make_control_spec(2, 1.0, 0.05);
  CorrectorFamily family(2, 2048);
  ParameterTrajectory traj = integrate_parameter_ode(spec, 2.0);
  GridFunction u(-100.0, 256.0, 4096);
  const SolitonParams st{2, 1.0, 0.0};
  // bump made orthogonal to q_c and y q_c by subtracting projections
  GridFunction bump = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double y = u.x(i);
    bump[i] = std::exp(-0.25 * (y - 1.0) * (y - 1.0));
  }
  double b_q = 0.0, b_yq = 0.0, q_q = 0.0, yq_yq = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double y = u.x(i);
    const double q = qc(st, y);
    b_q += bump[i] * q;
    b_yq += bump[i] * y * q;
    q_q += q * q;
    yq_yq += y * q * y * q;
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double y = u.x(i);
    const double q = qc(st, y);
    bump[i] -= (b_q / q_q) * q + (b_yq / yq_yq) * y * q;
    norm2 += bump[i] * bump[i];
  }
  const double scale = 1e-3 / std::sqrt(norm2 * u.dx());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = qc(st, u.x(i)) + scale * bump[i];
  ModulationFit fit = fit_modulation(u, {2, 1.0, 0.0}, spec, traj, family, 0.0);
  CHECK(std::abs(fit.c - 1.0) < 1e-6);
  CHECK(std::abs(fit.rho) < 1e-6);
}

TEST_CASE("fit failure raises after the iteration cap") {
  ControlSpec spec = make_control_spec(2, 1.0, 0.05);
  CorrectorFamily family(2, 2048);
  ParameterTrajectory traj = integrate_parameter_ode(spec, 2.0);
  GridFunction u(-100.0, 256.0, 4096);
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = 0.3 * std::sin(0.7 * u.x(i));  // nowhere near the soliton manifold
  CHECK_THROWS_AS(fit_modulation(u, {2, 1.0, 0.0}, spec, traj, family, 0.0), fit_error);
}

TEST_CASE("virial weight: pinched envelope, odd primitive, exact far tail") {
  CHECK(vir_psi(0.0) == 0.0);
  for (int i = 0; i <= 10000; ++i) {
    const double x = -6.0 + 12.0 * i / 10000.0;
    const double phi = vir_phi(x);
    CHECK(phi >= std::exp(-std::abs(x)) - 1e-14);
    CHECK(phi <= 3.0 * std::exp(-std::abs(x)) + 1e-14);
    CHECK(vir_psi(x) == -vir_psi(-x));
  }
  // monotone on the right half line
  double prev = vir_phi(0.0);
  for (double x = 0.01; x <= 6.0; x += 0.01) {
    CHECK(vir_phi(x) <= prev + 1e-14);
    prev = vir_phi(x);
  }
  // psi(inf) - psi(|x|) = e^{-|x|} beyond the blend
  for (double x : {2.0, 3.7, 9.0})
    CHECK(std::abs(vir_psi_infinity() - vir_psi(x) - std::exp(-x)) < 1e-10);
  // scaled weight derivative keeps the envelope
  const double a0 = 20.0;
  for (double y = -80.0; y <= 80.0; y += 0.37) {
    const double d = psi_a_deriv(a0, y);
    CHECK(d >= std::exp(-std::abs(y) / a0) - 1e-14);
    CHECK(d <= 3.0 * std::exp(-std::abs(y) / a0) + 1e-14);
  }
  CHECK(psi_a(a0, 3.0) == doctest::Approx(a0 * vir_psi(3.0 / a0)));
}

TEST_CASE("energy functional: zero remainder, quadratic-form oracle, coercivity") {
  ControlSpec spec = make_control_spec(2, 1.0, 0.05);
  CorrectorFamily family(2, 2048);
  ParameterTrajectory traj = integrate_parameter_ode(spec, 2.0);
  GridFunction u(-100.0, 256.0, 4096);
  const SolitonParams st{2, 1.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = qc(st, u.x(i));

  ModulationFit fit = fit_modulation(u, {2, 1.0, 0.0}, spec, traj, family, 0.0);
  DiagnosticsSample d0 = diagnostics(u, fit, spec, traj, family, 0.0);
  CHECK(std::abs(d0.lyapunov) < 1e-10);
  CHECK(d0.virial >= 0.0);
  CHECK(d0.weighted_l2 >= 0.0);
  CHECK(d0.virial < 1e-10);

  // small orthogonal bump: F ~ (1/2) int (z_x^2 + c z^2) - (p/2) int u~^{p-1} z^2
  GridFunction pert = u;
  const double amp = 1e-4;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double y = u.x(i);
    pert[i] += amp * std::exp(-0.25 * (y - 2.0) * (y - 2.0)) * std::sin(2.0 * y);
  }
  ModulationFit fit2 = fit_modulation(pert, {2, 1.0, 0.0}, spec, traj, family, 0.0);
  DiagnosticsSample d2 = diagnostics(pert, fit2, spec, traj, family, 0.0);
  // quadrature oracle for the quadratic form, using z = pert - u~(fit2)
  Ansatz an(spec, family, {2, fit2.c, fit2.rho}, traj.c0(0.0), traj.rho0(0.0));
  GridFunction ux = spectral_derivative(pert, 1);
  double quad = 0.0;
  for (std::size_t i = 0; i < pert.size(); ++i) {
    double tu, tu_y;
    an.value_and_deriv(pert.x(i) - fit2.rho, tu, tu_y);
    const double z = pert[i] - tu;
    const double zx = ux[i] - tu_y;
    quad += 0.5 * (zx * zx + fit2.c * z * z) - tu * z * z;  // (p/2) u~^{p-1} = u~ here
  }
  quad *= pert.dx();
  CHECK(std::abs(d2.lyapunov - quad) < 20.0 * amp * amp * amp);
  // coercivity with a healthy margin for this localized perturbation
  CHECK(d2.lyapunov / (fit2.z_h1 * fit2.z_h1) > 0.01);
}

TEST_CASE("rate proxies vanish on a flat profile and are finite otherwise") {
  ControlSpec spec = make_control_spec(2, 1.0, 0.05);
  ParameterTrajectory traj = integrate_parameter_ode(spec, 10.0);
  std::vector<double> ts, cs, rhos;
  for (double t = 0.0; t <= 10.0; t += 0.5) {
    ts.push_back(t);
    cs.push_back(1.0);
    rhos.push_back(traj.rho0(t));
  }
  std::vector<double> c1, r1;
  modulation_rates(ts, cs, rhos, spec, traj, c1, r1);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(std::abs(c1[i]) < 1e-9);
    CHECK(std::abs(r1[i]) < 1e-9);
  }
}

TEST_CASE("H1 distance against a displaced soliton is quadratic near the truth") {
  GridFunction u(-100.0, 256.0, 4096);
  const SolitonParams st{2, 1.3, 4.0};
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = qc(st, u.x(i) - st.rho);
  CHECK(h1_error_to_soliton(u, st) < 1e-12);
  CHECK(h1_error_to_soliton(u, {2, 1.3, 4.1}) > 1e-3);
}
