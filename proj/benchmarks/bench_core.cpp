#include <benchmark/benchmark.h>

#include <cmath>

#include "gkdv/ansatz.hpp"
#include "gkdv/experiments.hpp"
#include "gkdv/modulation.hpp"
#include "gkdv/pde.hpp"

using namespace gkdv;

namespace {

GridFunction soliton_state(std::size_t n) {
  GridFunction u(-128.0, 512.0, n);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = qc({2, 1.0, 0.0}, u.x(i));
  return u;
}

void bm_spectral_derivative(benchmark::State& state) {
  GridFunction u = soliton_state(static_cast<std::size_t>(state.range(0)));
  GridFunction out;
  for (auto _ : state) {
    spectral_derivative(u, 1, out);
    benchmark::DoNotOptimize(out.samples.data());
  }
}
BENCHMARK(bm_spectral_derivative)->Arg(4096)->Arg(8192);

void bm_etdrk4_step(benchmark::State& state) {
  ControlSpec spec = make_control_spec(2, 2.0, 0.05, 0.05, 3.0);
  ParameterTrajectory traj = integrate_parameter_ode(spec, 100.0);
  GridFunction u0(traj.rho0(0.0) - 100.0, 512.0,
                  static_cast<std::size_t>(state.range(0)));
  SolitonParams init{2, 1.0, traj.rho0(0.0)};
  for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = qc(init, u0.x(i) - init.rho);
  StepperOptions opts;
  Etdrk4 stepper(spec, traj, u0, opts);
  for (auto _ : state) stepper.step();
}
BENCHMARK(bm_etdrk4_step)->Arg(4096)->Arg(8192);

void bm_corrector_solve(benchmark::State& state) {
  ControlSpec spec = make_control_spec(2, 2.0, 0.05);
  const auto n = static_cast<std::size_t>(state.range(0));
  OperatorGrid grid = make_operator_grid(2, 1.0, n);
  for (auto _ : state) {
    auto cor = solve_corrector(grid, {2, 1.0, 0.0}, 1.0, 0.0, spec);
    benchmark::DoNotOptimize(cor.beta_c);
  }
}
BENCHMARK(bm_corrector_solve)->Arg(2048)->Arg(4096)->Unit(benchmark::kMillisecond);

void bm_family_eval(benchmark::State& state) {
  CorrectorFamily family(2, 2048);
  double y = -40.0;
  for (auto _ : state) {
    auto ev = family.eval(1.3, 0.02, 0.3, y);
    benchmark::DoNotOptimize(ev.a_yyy);
    y += 0.001;
    if (y > 40.0) y = -40.0;
  }
}
BENCHMARK(bm_family_eval);

void bm_modulation_fit(benchmark::State& state) {
  ControlSpec spec = make_control_spec(2, 2.0, 0.05, 0.05, 3.0);
  CorrectorFamily family(2, 2048);
  ParameterTrajectory traj = integrate_parameter_ode(spec, 10.0);
  GridFunction grid(traj.rho0(0.0) - 150.0, 512.0, 8192);
  Ansatz an(spec, family, {2, 1.1, traj.rho0(4.0) + 0.2}, traj.c0(4.0), traj.rho0(4.0));
  GridFunction u = an.sample(grid);
  for (auto _ : state) {
    auto fit = fit_modulation(u, {2, 1.0, traj.rho0(4.0)}, spec, traj, family, 4.0);
    benchmark::DoNotOptimize(fit.c);
  }
}
BENCHMARK(bm_modulation_fit)->Unit(benchmark::kMillisecond);

void bm_ansatz_residual(benchmark::State& state) {
  ControlSpec spec = make_control_spec(2, 2.0, 0.05);
  CorrectorFamily family(2, 2048);
  const double c = closed_form_c0(spec, 0.0, -spec.horizon());
  Ansatz an(spec, family, {2, c, 0.0}, c, 0.0);
  for (auto _ : state) {
    auto r = ansatz_residual(an);
    benchmark::DoNotOptimize(r.tilde_s_h1);
  }
}
BENCHMARK(bm_ansatz_residual)->Unit(benchmark::kMillisecond);

void bm_parameter_ode(benchmark::State& state) {
  ControlSpec spec = make_control_spec(2, 2.0, 0.05, 0.05, 3.0);
  for (auto _ : state) {
    auto traj = integrate_parameter_ode(spec, 3.0 * spec.horizon());
    benchmark::DoNotOptimize(traj.t_end());
  }
}
BENCHMARK(bm_parameter_ode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
