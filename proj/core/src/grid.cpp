#include "gkdv/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace gkdv {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Cached FFTW plans per transform size. FFTW_ESTIMATE keeps plans
// deterministic across runs, which the reproducibility contract relies on.
struct FftContext {
  std::size_t n;
  std::vector<double> real;
  std::vector<std::complex<double>> spec;
  fftw_plan fwd;
  fftw_plan bwd;

  explicit FftContext(std::size_t n_) : n(n_), real(n_), spec(n_ / 2 + 1) {
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(),
                               reinterpret_cast<fftw_complex*>(spec.data()),
                               FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                               reinterpret_cast<fftw_complex*>(spec.data()),
                               real.data(), FFTW_ESTIMATE);
  }
  ~FftContext() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
};

std::mutex g_fft_mutex;
std::map<std::size_t, std::unique_ptr<FftContext>>& fft_registry() {
  static std::map<std::size_t, std::unique_ptr<FftContext>> reg;
  return reg;
}

FftContext& fft_for(std::size_t n) {
  auto& reg = fft_registry();
  auto it = reg.find(n);
  if (it == reg.end()) it = reg.emplace(n, std::make_unique<FftContext>(n)).first;
  return *it->second;
}

}  // namespace

GridFunction::GridFunction(double x0_, double length_, std::size_t n_points)
    : x0(x0_), length(length_), samples(n_points, 0.0) {
  if (n_points < 16 || !is_pow2(n_points))
    throw std::invalid_argument("GridFunction: n_points must be a power of two >= 16");
  if (!(length_ > 0.0)) throw std::invalid_argument("GridFunction: length must be positive");
}

void spectral_derivative(const GridFunction& u, int order, GridFunction& out) {
  if (order < 1) throw std::invalid_argument("spectral_derivative: order must be >= 1");
  const std::size_t n = u.size();
  std::lock_guard<std::mutex> lock(g_fft_mutex);
  auto& ctx = fft_for(n);
  std::copy(u.samples.begin(), u.samples.end(), ctx.real.begin());
  fftw_execute(ctx.fwd);
  const double k0 = 2.0 * M_PI / u.length;
  const std::complex<double> unit(0.0, 1.0);
  for (std::size_t j = 0; j < ctx.spec.size(); ++j) {
    std::complex<double> ik = unit * (k0 * static_cast<double>(j));
    std::complex<double> mult = 1.0;
    for (int m = 0; m < order; ++m) mult *= ik;
    ctx.spec[j] *= mult / static_cast<double>(n);
  }
  // Zero the unmatched Nyquist mode for odd derivative orders.
  if (order % 2 == 1) ctx.spec.back() = 0.0;
  fftw_execute(ctx.bwd);
  out.x0 = u.x0;
  out.length = u.length;
  out.samples.assign(ctx.real.begin(), ctx.real.end());
}

GridFunction spectral_derivative(const GridFunction& u, int order) {
  GridFunction out;
  spectral_derivative(u, order, out);
  return out;
}

double integral(const GridFunction& u) {
  double s = 0.0;
  for (double v : u.samples) s += v;
  return s * u.dx();
}

double integral_sq(const GridFunction& u) {
  double s = 0.0;
  for (double v : u.samples) s += v * v;
  return s * u.dx();
}

}  // namespace gkdv
