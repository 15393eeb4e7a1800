#pragma once

#include <stdexcept>
#include <string>

namespace gkdv {

/// Adaptive ODE integration could not reach the requested accuracy.
struct integration_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bordered linear solve failed (singular matrix, bad grid, c outside range).
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// PDE state became non-finite or exceeded the overflow guard.
struct blowup_error : std::runtime_error {
  blowup_error(const std::string& what, double t_fail)
      : std::runtime_error(what), t(t_fail) {}
  double t;
};

/// Modulation fit did not converge within the iteration cap.
struct fit_error : std::runtime_error {
  fit_error(const std::string& what, double t_fail)
      : std::runtime_error(what), t(t_fail) {}
  double t;
};

}  // namespace gkdv
