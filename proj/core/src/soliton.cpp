#include "gkdv/soliton.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "gkdv/numerics.hpp"

namespace gkdv {

void validate_exponent(int p) {
  if (p < 2 || p > 4) throw std::domain_error("exponent p must be 2, 3 or 4");
}

void validate(const SolitonParams& params) {
  validate_exponent(params.p);
  if (!(params.c > 0.0)) throw std::domain_error("scaling c must be positive");
}

namespace {

// sech computed through exponentials so large arguments underflow cleanly
// instead of overflowing cosh.
double sech(double x) {
  const double a = std::abs(x);
  const double e = std::exp(-a);
  return 2.0 * e / (1.0 + e * e);
}

}  // namespace

double q_profile(int p, double s) {
  validate_exponent(p);
  const double amp = 0.5 * (p + 1);
  const double sh = sech(0.5 * (p - 1) * s);
  return std::pow(amp * sh * sh, 1.0 / (p - 1));
}

double q_profile_deriv(int p, double s, int k) {
  validate_exponent(p);
  if (k < 0 || k > 3) throw std::domain_error("q_profile_deriv: k must be 0..3");
  const double q = q_profile(p, s);
  if (k == 0) return q;
  const double th = std::tanh(0.5 * (p - 1) * s);
  const double q1 = -th * q;  // log-derivative of q is -tanh((p-1)s/2)
  if (k == 1) return q1;
  if (k == 2) return q - std::pow(q, p);  // q'' = q - q^p
  return q1 - p * std::pow(q, p - 1) * q1;  // q''' = (q - q^p)'
}

double qc(const SolitonParams& params, double y) {
  validate(params);
  const double rc = std::sqrt(params.c);
  return std::pow(params.c, 1.0 / (params.p - 1)) * q_profile(params.p, rc * y);
}

double qc_deriv(const SolitonParams& params, double y, int k) {
  validate(params);
  if (k < 0 || k > 3) throw std::domain_error("qc_deriv: k must be 0..3");
  const double rc = std::sqrt(params.c);
  const double scale = std::pow(params.c, 1.0 / (params.p - 1)) * std::pow(rc, k);
  return scale * q_profile_deriv(params.p, rc * y, k);
}

double qc_dc(const SolitonParams& params, double y) {
  const double q = qc(params, y);
  const double q1 = qc_deriv(params, y, 1);
  return (q / (params.p - 1) + 0.5 * y * q1) / params.c;
}

double qc_dc_deriv(const SolitonParams& params, double y) {
  const double q1 = qc_deriv(params, y, 1);
  const double q2 = qc_deriv(params, y, 2);
  const int p = params.p;
  return (q1 * (p + 1) / (2.0 * (p - 1)) + 0.5 * y * q2) / params.c;
}

double soliton_ode_residual(const SolitonParams& params, const GridFunction& grid_template) {
  validate(params);
  GridFunction u = grid_template;
  const double center = u.x0 + 0.5 * u.length;
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = qc(params, u.x(i) - center);
  GridFunction uyy = spectral_derivative(u, 2);
  double r = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double res = uyy[i] - params.c * u[i] + std::pow(u[i], params.p);
    r = std::max(r, std::abs(res));
  }
  return r;
}

const QuadratureConstants& quadrature_constants(int p) {
  validate_exponent(p);
  static std::array<QuadratureConstants, 3> cache{};
  static std::array<bool, 3> ready{};
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[static_cast<std::size_t>(p - 2)];
  if (!ready[static_cast<std::size_t>(p - 2)]) {
    auto moment = [p](int k) {
      return 2.0 * integrate([p, k](double s) { return std::pow(q_profile(p, s), k); },
                             0.0, 60.0, 120);
    };
    slot.p = p;
    slot.int_q = moment(1);
    slot.int_q2 = moment(2);
    slot.int_q3 = moment(3);
    slot.lambda_p = 4.0 * (p - 1) / (5.0 - p) * slot.int_q3 / slot.int_q2;
    ready[static_cast<std::size_t>(p - 2)] = true;
  }
  return slot;
}

double mass(const GridFunction& u) { return 0.5 * integral_sq(u); }

double energy(const GridFunction& u, int p) {
  validate_exponent(p);
  GridFunction ux = spectral_derivative(u, 1);
  double nonlin = 0.0;
  for (double v : u.samples) nonlin += std::pow(v, p + 1);
  nonlin *= u.dx();
  return 0.5 * integral_sq(ux) - nonlin / (p + 1);
}

double h1_norm(const GridFunction& u) {
  GridFunction ux = spectral_derivative(u, 1);
  return std::sqrt(integral_sq(u) + integral_sq(ux));
}

}  // namespace gkdv
