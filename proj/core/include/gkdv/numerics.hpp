#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gkdv {

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Composite 16-point Gauss-Legendre quadrature of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels);

/// Cumulative integrals of a closed-form integrand on a uniform grid:
/// out[i] = \int_{y0}^{y0 + i h} f, computed with per-cell Gauss quadrature.
std::vector<double> cumulative_integral(const std::function<double(double)>& f,
                                        double y0, double h, std::size_t n);

/// Trapezoid weight sum on a uniform grid: h * (half ends, full interior).
double trapezoid(std::span<const double> v, double h);

// ---------------------------------------------------------------------------
// Uniform-grid interpolation and finite differences
// ---------------------------------------------------------------------------

/// Local cubic (4-point Lagrange) interpolation of uniformly sampled values.
/// Nodes are x_i = x0 + i h, i = 0..n-1; x outside the table clamps to the
/// nearest end stencil. Values beyond the table edges extrapolate with the
/// edge cubic, so callers must keep x inside [x0, x0 + (n-1) h].
class UniformTable {
 public:
  UniformTable() = default;
  UniformTable(double x0, double h, std::vector<double> values);

  double operator()(double x) const;
  double x_min() const { return x0_; }
  double x_max() const { return x0_ + h_ * static_cast<double>(n_ - 1); }
  double spacing() const { return h_; }
  std::size_t size() const { return n_; }
  const std::vector<double>& values() const { return v_; }

 private:
  double x0_ = 0.0, h_ = 1.0;
  std::size_t n_ = 0;
  std::vector<double> v_;
};

/// First derivative of uniformly sampled values, 6th-order centered stencils
/// in the interior and one-sided 6th-order stencils at the edges.
std::vector<double> derivative_uniform(std::span<const double> v, double h);

// ---------------------------------------------------------------------------
// Dense linear algebra (LAPACK-backed)
// ---------------------------------------------------------------------------

/// Solves A x = b by dense LU with partial pivoting. A is n x n column-major
/// and is destroyed; b is overwritten with the solution. Throws solver_error
/// when the factorization reports a zero pivot.
void solve_dense(std::vector<double>& a, std::vector<double>& b, int n);

/// Multi right-hand-side variant: b holds nrhs column-major columns.
void solve_dense(std::vector<double>& a, std::vector<double>& b, int n, int nrhs);

/// Solves a 2x2 system; returns false when the determinant underflows.
bool solve_2x2(const std::array<double, 4>& m, const std::array<double, 2>& rhs,
               std::array<double, 2>& out);

// ---------------------------------------------------------------------------
// Embedded Runge-Kutta (Dormand-Prince 5(4)) for small ODE systems
// ---------------------------------------------------------------------------

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h_init = 1e-2;
  double h_min = 1e-14;
};

/// Integrates y' = f(t, y) from t0 to t1 and invokes `emit(t, y)` at dense
/// uniform output times spaced by `stride` (plus the endpoints).
/// Dense output uses the 5th-order continuous extension of the DP pair.
void integrate_ode(
    const std::function<void(double, std::span<const double>, std::span<double>)>& f,
    std::span<double> y, double t0, double t1, double stride,
    const std::function<void(double, std::span<const double>)>& emit,
    const OdeOptions& opt = {});

// ---------------------------------------------------------------------------
// Small statistics helpers
// ---------------------------------------------------------------------------

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace gkdv
