#pragma once

#include <cstddef>
#include <vector>

namespace gkdv {

/// Real samples of a function on a uniform periodic 1-D grid.
///
/// The grid covers [x0, x0 + length) with n_points samples at spacing
/// length / n_points. n_points must be a power of two and at least 16.
struct GridFunction {
  GridFunction() = default;
  GridFunction(double x0, double length, std::size_t n_points);

  double x0 = 0.0;
  double length = 0.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  double dx() const { return length / static_cast<double>(samples.size()); }
  double x(std::size_t i) const { return x0 + dx() * static_cast<double>(i); }

  double& operator[](std::size_t i) { return samples[i]; }
  double operator[](std::size_t i) const { return samples[i]; }
};

/// Spectral derivative of order k (k >= 1) of a periodic grid function.
GridFunction spectral_derivative(const GridFunction& u, int order);

/// In-place variant writing into `out` (resized as needed).
void spectral_derivative(const GridFunction& u, int order, GridFunction& out);

/// \int u dx over one period (trapezoid = spectrally accurate here).
double integral(const GridFunction& u);

/// \int u^2 dx over one period.
double integral_sq(const GridFunction& u);

}  // namespace gkdv
