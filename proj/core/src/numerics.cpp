#include "gkdv/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "gkdv/errors.hpp"

extern "C" {
void dgesv_(const int* n, const int* nrhs, double* a, const int* lda, int* ipiv,
            double* b, const int* ldb, int* info);
}

namespace gkdv {

namespace {

// 16-point Gauss-Legendre nodes (positive half) and weights on [-1, 1].
constexpr int kGaussN = 8;
constexpr double kGaussX[kGaussN] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGaussW[kGaussN] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

double gauss_panel(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kGaussN; ++i) {
    const double dx = half * kGaussX[i];
    s += kGaussW[i] * (f(mid + dx) + f(mid - dx));
  }
  return s * half;
}

// Fornberg finite-difference weights for the m-th derivative at x0 given
// nodes x[0..n-1]. Returns weights for derivative order m only.
std::vector<double> fd_weights(double x0, std::span<const double> x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<double> c(static_cast<std::size_t>(n) * (m + 1), 0.0);
  auto C = [&](int i, int j) -> double& {
    return c[static_cast<std::size_t>(i) * (m + 1) + j];
  };
  double c1 = 1.0;
  double c4 = x[0] - x0;
  C(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
        C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
      C(j, 0) = c4 * C(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = C(i, m);
  return w;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels) {
  double s = 0.0;
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) s += gauss_panel(f, a + k * h, a + (k + 1) * h);
  return s;
}

std::vector<double> cumulative_integral(const std::function<double(double)>& f,
                                        double y0, double h, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double a = y0 + h * static_cast<double>(i - 1);
    out[i] = out[i - 1] + gauss_panel(f, a, a + h);
  }
  return out;
}

double trapezoid(std::span<const double> v, double h) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

UniformTable::UniformTable(double x0, double h, std::vector<double> values)
    : x0_(x0), h_(h), n_(values.size()), v_(std::move(values)) {}

double UniformTable::operator()(double x) const {
  const double u = (x - x0_) / h_;
  auto i = static_cast<std::ptrdiff_t>(std::floor(u));
  i = std::clamp<std::ptrdiff_t>(i - 1, 0, static_cast<std::ptrdiff_t>(n_) - 4);
  const double t = u - static_cast<double>(i);  // in [1, 2] for interior x
  const double t0 = t, t1 = t - 1.0, t2 = t - 2.0, t3 = t - 3.0;
  const double w0 = -t1 * t2 * t3 / 6.0;
  const double w1 = t0 * t2 * t3 / 2.0;
  const double w2 = -t0 * t1 * t3 / 2.0;
  const double w3 = t0 * t1 * t2 / 6.0;
  const auto k = static_cast<std::size_t>(i);
  return w0 * v_[k] + w1 * v_[k + 1] + w2 * v_[k + 2] + w3 * v_[k + 3];
}

std::vector<double> derivative_uniform(std::span<const double> v, double h) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n < 7) {
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i]) / h;
    if (n >= 2) d[n - 1] = d[n - 2];
    return d;
  }
  for (std::size_t i = 3; i + 3 < n; ++i) {
    d[i] = (-v[i - 3] + 9.0 * v[i - 2] - 45.0 * v[i - 1] + 45.0 * v[i + 1] -
            9.0 * v[i + 2] + v[i + 3]) /
           (60.0 * h);
  }
  // One-sided 6th-order stencils for the three points at each edge.
  std::array<double, 7> nodes{};
  for (int j = 0; j < 7; ++j) nodes[j] = j;
  for (int i = 0; i < 3; ++i) {
    const auto w = fd_weights(i, nodes, 1);
    double s = 0.0;
    for (int j = 0; j < 7; ++j) s += w[j] * v[j];
    d[static_cast<std::size_t>(i)] = s / h;
    double sr = 0.0;
    for (int j = 0; j < 7; ++j) sr += w[j] * v[n - 1 - static_cast<std::size_t>(j)];
    d[n - 1 - static_cast<std::size_t>(i)] = -sr / h;
  }
  return d;
}

void solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  solve_dense(a, b, n, 1);
}

void solve_dense(std::vector<double>& a, std::vector<double>& b, int n, int nrhs) {
  std::vector<int> ipiv(static_cast<std::size_t>(n));
  int info = 0;
  dgesv_(&n, &nrhs, a.data(), &n, ipiv.data(), b.data(), &n, &info);
  if (info != 0) throw solver_error("dense LU failed, info=" + std::to_string(info));
}

bool solve_2x2(const std::array<double, 4>& m, const std::array<double, 2>& rhs,
               std::array<double, 2>& out) {
  const double det = m[0] * m[3] - m[1] * m[2];
  const double scale = std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]);
  if (std::abs(det) < 1e-300 || std::abs(det) < 1e-14 * scale * scale) return false;
  out[0] = (rhs[0] * m[3] - rhs[1] * m[1]) / det;
  out[1] = (m[0] * rhs[1] - m[2] * rhs[0]) / det;
  return true;
}

void integrate_ode(
    const std::function<void(double, std::span<const double>, std::span<double>)>& f,
    std::span<double> y, double t0, double t1, double stride,
    const std::function<void(double, std::span<const double>)>& emit,
    const OdeOptions& opt) {
  // Dormand-Prince 5(4) coefficients.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), ynew(n);

  double t = t0;
  double h = std::min(opt.h_init, stride);
  double next_emit = t0;
  if (emit) {
    emit(t0, y);
    next_emit = t0 + stride;
  }
  f(t, y, k1);

  while (t < t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
    const double t_cap = emit ? std::min(next_emit, t1) : t1;
    h = std::min(h, t_cap - t);
    if (h < opt.h_min) throw integration_error("step size underflow in ODE integrator");

    auto stage = [&](std::span<double> out, std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = y[i];
        for (const auto& [coef, kv] : terms) acc += h * coef * (*kv)[i];
        out[i] = acc;
      }
    };
    stage(yt, {{a21, &k1}});
    f(t + c2 * h, yt, k2);
    stage(yt, {{a31, &k1}, {a32, &k2}});
    f(t + c3 * h, yt, k3);
    stage(yt, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    f(t + c4 * h, yt, k4);
    stage(yt, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    f(t + c5 * h, yt, k5);
    stage(yt, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    f(t + h, yt, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                             e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei) / sc);
    }

    if (err <= 1.0) {
      t += h;
      std::copy(ynew.begin(), ynew.end(), y.begin());
      std::swap(k1, k7);  // FSAL
      if (emit && t >= next_emit - 1e-12 * std::max(1.0, std::abs(next_emit))) {
        emit(t, y);
        next_emit += stride;
      }
    }
    const double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
    h = std::min(h, t1 - t + stride);
    h = std::max(h, opt.h_min);
  }
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gkdv
