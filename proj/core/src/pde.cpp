#include "gkdv/pde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gkdv/errors.hpp"
#include "gkdv/soliton.hpp"

namespace gkdv {

namespace {

using cplx = std::complex<double>;

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct Etdrk4::Impl {
  std::size_t n = 0;
  std::size_t m = 0;  // padded size (3n/2)
  std::size_t nk = 0;
  std::size_t mk = 0;
  double length = 0.0;
  double x0 = 0.0;

  std::vector<double> real_n;
  std::vector<cplx> spec_n;
  std::vector<double> real_m;
  std::vector<cplx> spec_m;
  fftw_plan fwd_n, bwd_n, fwd_m, bwd_m;

  std::vector<cplx> e_full, e_half;          // exp(h L), exp(h L / 2)
  std::vector<cplx> qcoef, f1, f2, f3;       // contour-averaged phi coefficients
  std::vector<double> mask;                  // 2/3 dealias mask
  std::vector<double> control_slope;         // a0'(eps x) samples
  std::vector<double> sponge;                // per-step damping factors

  std::vector<cplx> v, nv, na, nb, nc, sa, sb, sc;
  std::vector<double> phys, prod;

  Impl(std::size_t n_, double length_, double x0_) : n(n_), length(length_), x0(x0_) {
    m = 3 * n / 2;
    nk = n / 2 + 1;
    mk = m / 2 + 1;
    real_n.resize(n);
    spec_n.resize(nk);
    real_m.resize(m);
    spec_m.resize(mk);
    fwd_n = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_n.data(), as_fftw(spec_n.data()), FFTW_ESTIMATE);
    bwd_n = fftw_plan_dft_c2r_1d(static_cast<int>(n), as_fftw(spec_n.data()), real_n.data(), FFTW_ESTIMATE);
    fwd_m = fftw_plan_dft_r2c_1d(static_cast<int>(m), real_m.data(), as_fftw(spec_m.data()), FFTW_ESTIMATE);
    bwd_m = fftw_plan_dft_c2r_1d(static_cast<int>(m), as_fftw(spec_m.data()), real_m.data(), FFTW_ESTIMATE);
    v.resize(nk);
    nv.resize(nk);
    na.resize(nk);
    nb.resize(nk);
    nc.resize(nk);
    sa.resize(nk);
    sb.resize(nk);
    sc.resize(nk);
    phys.resize(n);
    prod.resize(n);
  }
  ~Impl() {
    fftw_destroy_plan(fwd_n);
    fftw_destroy_plan(bwd_n);
    fftw_destroy_plan(fwd_m);
    fftw_destroy_plan(bwd_m);
  }

  double k_of(std::size_t j) const { return 2.0 * M_PI / length * static_cast<double>(j); }

  void to_spectrum(const std::vector<double>& u, std::vector<cplx>& out) {
    std::copy(u.begin(), u.end(), real_n.begin());
    fftw_execute(fwd_n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < nk; ++j) out[j] = spec_n[j] * inv;
  }

  void to_physical(const std::vector<cplx>& in, std::vector<double>& out) {
    std::copy(in.begin(), in.end(), spec_n.begin());
    fftw_execute(bwd_n);
    std::copy(real_n.begin(), real_n.end(), out.begin());
  }

  // Dealiased p-th power: normalized spectrum in, normalized spectrum of u^p out.
  void dealiased_power(const std::vector<cplx>& in, int p, std::vector<cplx>& out) {
    std::fill(spec_m.begin(), spec_m.end(), cplx(0.0, 0.0));
    std::copy(in.begin(), in.end(), spec_m.begin());
    fftw_execute(bwd_m);
    for (std::size_t i = 0; i < m; ++i) {
      double w = real_m[i];
      double acc = w;
      for (int q = 1; q < p; ++q) acc *= w;
      real_m[i] = acc;
    }
    fftw_execute(fwd_m);
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < nk; ++j) out[j] = spec_m[j] * inv;
  }
};

Etdrk4::Etdrk4(const ControlSpec& spec, const ParameterTrajectory& traj,
               GridFunction u0, const StepperOptions& options)
    : spec_(spec), traj_(&traj), u_(std::move(u0)) {
  const std::size_t n = u_.size();
  impl_ = new Impl(n, u_.length, u_.x0);
  t_ = options.t0;
  dt_ = options.dt > 0.0 ? options.dt : 0.25 * u_.dx();

  // phi-function coefficients through the unit-circle contour average.
  const int contour_points = 32;
  const std::size_t nk = impl_->nk;
  impl_->e_full.resize(nk);
  impl_->e_half.resize(nk);
  impl_->qcoef.resize(nk);
  impl_->f1.resize(nk);
  impl_->f2.resize(nk);
  impl_->f3.resize(nk);
  for (std::size_t j = 0; j < nk; ++j) {
    const double k = impl_->k_of(j);
    const cplx hl = cplx(0.0, dt_ * k * k * k);  // h * (i k^3)
    impl_->e_full[j] = std::exp(hl);
    impl_->e_half[j] = std::exp(0.5 * hl);
    cplx q(0.0), f1(0.0), f2(0.0), f3(0.0);
    // Full-circle contour mean around h L_k; L_k is imaginary so the real-axis
    // half-circle shortcut does not apply.
    for (int s = 0; s < contour_points; ++s) {
      const double th = 2.0 * M_PI * (s + 0.5) / contour_points;
      const cplx z = hl + std::exp(cplx(0.0, th));
      const cplx ez = std::exp(z);
      const cplx z2 = z * z, z3 = z2 * z;
      q += (std::exp(0.5 * z) - 1.0) / z;
      f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
      f2 += (2.0 + z + ez * (-2.0 + z)) / z3;
      f3 += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
    }
    const double inv = 1.0 / contour_points;
    impl_->qcoef[j] = dt_ * q * inv;
    impl_->f1[j] = dt_ * f1 * inv;
    impl_->f2[j] = dt_ * f2 * inv;
    impl_->f3[j] = dt_ * f3 * inv;
  }

  impl_->mask.assign(nk, 1.0);
  const auto cutoff = static_cast<std::size_t>(std::floor(static_cast<double>(n) / 3.0));
  for (std::size_t j = 0; j < nk; ++j)
    if (j > cutoff) impl_->mask[j] = 0.0;

  impl_->control_slope.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    impl_->control_slope[i] = options.control_on
                                  ? spec_.a0_deriv(spec_.eps * u_.x(i), 1)
                                  : 0.0;

  if (options.sponge_on) {
    impl_->sponge.assign(n, 1.0);
    const double width = 50.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dl = u_.x(i) - u_.x0;
      const double dr = (u_.x0 + u_.length) - u_.x(i);
      const double d = std::min(dl, dr);
      if (d < width) {
        const double s = (width - d) / width;
        impl_->sponge[i] = std::exp(-options.sponge_strength * dt_ * s * s);
      }
    }
  }
  overflow_guard_ = options.overflow_guard;
  control_on_ = options.control_on;

  impl_->to_spectrum(u_.samples, impl_->v);
}

Etdrk4::~Etdrk4() { delete impl_; }

const GridFunction& Etdrk4::u() const {
  if (!u_fresh_) {
    impl_->to_physical(impl_->v, u_.samples);
    u_fresh_ = true;
  }
  return u_;
}

void Etdrk4::step() {
  auto& im = *impl_;
  const std::size_t nk = im.nk;
  const std::size_t n = im.n;

  // Nonlinear + control term in spectral space at a stage time.
  auto nonlinear = [&](const std::vector<cplx>& vs, double stage_t,
                       std::vector<cplx>& out, bool check_overflow) {
    im.dealiased_power(vs, spec_.p, out);
    im.to_physical(vs, im.phys);
    if (check_overflow) {
      for (double w : im.phys)
        if (!std::isfinite(w) || std::abs(w) > overflow_guard_)
          throw blowup_error("PDE state overflow", t_);
    }
    if (control_on_) {
      const double c0 = traj_->c0(stage_t);
      const double rho0 = traj_->rho0(stage_t);
      const SolitonParams ref{spec_.p, c0, 0.0};
      const double reach = 45.0 / std::sqrt(spec_.c_lower());
      for (std::size_t i = 0; i < n; ++i) {
        const double x = u_.x0 + u_.dx() * static_cast<double>(i);
        const double dist = x - rho0;
        im.prod[i] = (std::abs(dist) < reach)
                         ? -spec_.eps * im.control_slope[i] * qc(ref, dist) * im.phys[i]
                         : 0.0;
      }
    } else {
      std::fill(im.prod.begin(), im.prod.end(), 0.0);
    }
    std::copy(im.prod.begin(), im.prod.end(), im.real_n.begin());
    fftw_execute(im.fwd_n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < nk; ++j) {
      const double k = im.k_of(j);
      out[j] = (cplx(0.0, -k) * out[j] + im.spec_n[j] * inv) * im.mask[j];
    }
  };

  nonlinear(im.v, t_, im.nv, true);
  for (std::size_t j = 0; j < nk; ++j)
    im.sa[j] = im.e_half[j] * im.v[j] + im.qcoef[j] * im.nv[j];
  nonlinear(im.sa, t_ + 0.5 * dt_, im.na, false);
  for (std::size_t j = 0; j < nk; ++j)
    im.sb[j] = im.e_half[j] * im.v[j] + im.qcoef[j] * im.na[j];
  nonlinear(im.sb, t_ + 0.5 * dt_, im.nb, false);
  for (std::size_t j = 0; j < nk; ++j)
    im.sc[j] = im.e_half[j] * im.sa[j] + im.qcoef[j] * (2.0 * im.nb[j] - im.nv[j]);
  nonlinear(im.sc, t_ + dt_, im.nc, false);

  for (std::size_t j = 0; j < nk; ++j) {
    im.v[j] = im.e_full[j] * im.v[j] + im.f1[j] * im.nv[j] +
              2.0 * im.f2[j] * (im.na[j] + im.nb[j]) + im.f3[j] * im.nc[j];
  }
  if (!impl_->sponge.empty()) {
    im.to_physical(im.v, im.phys);
    for (std::size_t i = 0; i < n; ++i) im.phys[i] *= im.sponge[i];
    im.to_spectrum(im.phys, im.v);
  }
  t_ += dt_;
  u_fresh_ = false;
}

void Etdrk4::advance_to(double t_target) {
  while (t_ < t_target - 0.5 * dt_) step();
}

std::pair<double, double> balance_check(const ControlSpec& spec,
                                        const ParameterTrajectory& traj,
                                        const SimulationState& state,
                                        const StepperOptions& options) {
  StepperOptions opts = options;
  opts.t0 = state.t;
  Etdrk4 stepper(spec, traj, state.u, opts);
  const double dt = stepper.dt();

  std::vector<double> masses, energies;
  std::vector<GridFunction> states;
  masses.reserve(5);
  for (int s = 0; s <= 4; ++s) {
    const GridFunction& u = stepper.u();
    masses.push_back(mass(u));
    energies.push_back(energy(u, spec.p));
    if (s == 2) states.push_back(u);
    if (s < 4) stepper.step();
  }
  const double t_mid = state.t + 2.0 * dt;
  const double dm_dt =
      (-masses[4] + 8.0 * masses[3] - 8.0 * masses[1] + masses[0]) / (12.0 * dt);
  const double de_dt =
      (-energies[4] + 8.0 * energies[3] - 8.0 * energies[1] + energies[0]) / (12.0 * dt);

  const GridFunction& u = states.front();
  const std::size_t n = u.size();
  std::vector<double> a_vals(n, 0.0);
  if (options.control_on) {
    const double c0 = traj.c0(t_mid);
    const double rho0 = traj.rho0(t_mid);
    const SolitonParams ref{spec.p, c0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
      a_vals[i] = -spec.eps * spec.a0_deriv(spec.eps * u.x(i), 1) * qc(ref, u.x(i) - rho0);
  }
  GridFunction ux = spectral_derivative(u, 1);
  double rhs_m = 0.0, rhs_e = 0.0;
  const double c0 = options.control_on ? traj.c0(t_mid) : 1.0;
  const double rho0 = options.control_on ? traj.rho0(t_mid) : 0.0;
  const SolitonParams ref{spec.p, c0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u.x(i);
    const double uu = u[i];
    rhs_m += a_vals[i] * uu * uu;
    if (options.control_on) {
      const double e = spec.eps;
      const double q0 = qc(ref, x - rho0);
      const double q1 = qc_deriv(ref, x - rho0, 1);
      const double q2 = qc_deriv(ref, x - rho0, 2);
      const double a_xx = -e * (e * e * spec.a0_deriv(e * x, 3) * q0 +
                                2.0 * e * spec.a0_deriv(e * x, 2) * q1 +
                                spec.a0_deriv(e * x, 1) * q2);
      rhs_e += -0.5 * a_xx * uu * uu - a_vals[i] * std::pow(uu, spec.p + 1) +
               a_vals[i] * ux[i] * ux[i];
    }
  }
  rhs_m *= u.dx();
  rhs_e *= u.dx();
  return {std::abs(dm_dt - rhs_m), std::abs(de_dt - rhs_e)};
}

void evolve(const ControlSpec& spec, const ParameterTrajectory& traj,
            const GridFunction& u0, double t_end, double stride,
            const StepperOptions& options,
            const std::function<void(double, const GridFunction&)>& observer) {
  Etdrk4 stepper(spec, traj, u0, options);
  observer(0.0, stepper.u());
  double next = stride;
  while (next <= t_end + 0.5 * stepper.dt()) {
    stepper.advance_to(next);
    observer(stepper.t(), stepper.u());
    next += stride;
  }
  if (stepper.t() < t_end - 0.5 * stepper.dt()) {
    stepper.advance_to(t_end);
    observer(stepper.t(), stepper.u());
  }
}

GridFunction make_run_grid(const ControlSpec& spec, const ParameterTrajectory& traj,
                           double t_end, double dx_max) {
  const double rho_start = traj.rho0(0.0);
  const double rho_end = traj.rho0(std::min(t_end, traj.t_end()));
  const double x_lo = rho_start - 250.0;
  const double x_hi = rho_end + 150.0;
  const double span = x_hi - x_lo;
  std::size_t n = 1024;
  while (span / static_cast<double>(n) > dx_max) n *= 2;
  (void)spec;
  return GridFunction(x_lo, span, n);
}

}  // namespace gkdv
