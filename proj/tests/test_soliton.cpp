#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gkdv/numerics.hpp"
#include "gkdv/soliton.hpp"

using namespace gkdv;

TEST_CASE("profile values at the crest") {
  CHECK(q_profile(2, 0.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(q_profile(3, 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // invalid exponent is a domain error
  CHECK_THROWS_AS(q_profile(5, 0.0), std::domain_error);
  CHECK_THROWS_AS(q_profile(1, 0.0), std::domain_error);
}

TEST_CASE("profile decays like 6 e^{-|s|} for p = 2") {
  const double got = q_profile(2, 10.0);
  CHECK(std::abs(got / (6.0 * std::exp(-10.0)) - 1.0) < 1e-3);
}

TEST_CASE("profile is even and positive") {
  for (int p = 2; p <= 4; ++p)
    for (double s = 0.0; s < 25.0; s += 0.37) {
      CHECK(q_profile(p, s) == q_profile(p, -s));
      CHECK(q_profile(p, s) > 0.0);
    }
}

TEST_CASE("profile derivatives agree with centered differences") {
  const double h = 1e-5;
  for (int p = 2; p <= 4; ++p)
    for (double s : {-3.2, -0.7, 0.0, 1.1, 4.5}) {
      const double fd1 = (q_profile(p, s + h) - q_profile(p, s - h)) / (2.0 * h);
      CHECK(std::abs(q_profile_deriv(p, s, 1) - fd1) < 1e-9);
      const double fd2 =
          (q_profile(p, s + h) - 2.0 * q_profile(p, s) + q_profile(p, s - h)) / (h * h);
      CHECK(std::abs(q_profile_deriv(p, s, 2) - fd2) < 1e-5);
    }
}

TEST_CASE("scaled profile values and reduction at c = 1") {
  CHECK(qc({2, 1.0, 0.0}, 0.0) == doctest::Approx(1.5));
  CHECK(qc({2, 4.0, 0.0}, 0.0) == doctest::Approx(6.0));
  // compose the two closed forms by hand
  const double expect = std::pow(2.0, 1.0 / 3.0) * q_profile(4, std::sqrt(2.0));
  CHECK(qc({4, 2.0, 0.0}, 1.0) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(qc({2, -1.0, 0.0}, 0.0), std::domain_error);
}

TEST_CASE("scaling generator: crest values and finite-difference oracle in c") {
  CHECK(qc_dc({2, 1.0, 0.0}, 0.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(qc_dc({3, 1.0, 0.0}, 0.0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
  const double h = 1e-5;
  for (int p = 2; p <= 4; ++p)
    for (double c : {0.5, 1.0, 2.0})
      for (double y = -20.0; y <= 20.0; y += 1.7) {
        const double fd =
            (qc({p, c + h, 0.0}, y) - qc({p, c - h, 0.0}, y)) / (2.0 * h);
        CHECK(std::abs(qc_dc({p, c, 0.0}, y) - fd) < 1e-8);
      }
}

TEST_CASE("soliton ODE residual is discretization-floor small when resolved") {
  GridFunction g1(0.0, 100.0, 2048);
  CHECK(soliton_ode_residual({2, 1.0, 0.0}, g1) < 1e-8);
  GridFunction g2(0.0, 200.0, 4096);
  CHECK(soliton_ode_residual({3, 0.5, 0.0}, g2) < 1e-8);
  GridFunction g3(0.0, 100.0, 64);  // deliberately under-resolved
  CHECK(soliton_ode_residual({2, 1.0, 0.0}, g3) > 1e-4);
}

TEST_CASE("quadrature constants: exact values for p = 2 and oracle for p = 3") {
  const auto& q2 = quadrature_constants(2);
  CHECK(std::abs(q2.int_q - 6.0) < 1e-10);
  CHECK(std::abs(q2.int_q2 - 6.0) < 1e-10);
  CHECK(std::abs(q2.int_q3 - 36.0 / 5.0) < 1e-10);
  CHECK(std::abs(q2.lambda_p - 8.0 / 5.0) < 1e-10);

  // independent oracle: different panel structure and truncation
  for (int p = 2; p <= 4; ++p) {
    const auto& qc0 = quadrature_constants(p);
    const double i2 =
        2.0 * integrate([p](double s) { return std::pow(q_profile(p, s), 2); }, 0.0, 75.0, 311);
    const double i3 =
        2.0 * integrate([p](double s) { return std::pow(q_profile(p, s), 3); }, 0.0, 75.0, 311);
    CHECK(std::abs(qc0.int_q2 - i2) < 1e-10);
    CHECK(std::abs(qc0.int_q3 - i3) < 1e-10);
    CHECK(std::abs(qc0.lambda_p - 4.0 * (p - 1) / (5.0 - p) * i3 / i2) < 1e-9);
    CHECK(qc0.int_q > 0.0);
  }
}

TEST_CASE("mass, energy and H1 norm") {
  GridFunction zero(0.0, 100.0, 1024);
  CHECK(mass(zero) == 0.0);
  CHECK(energy(zero, 2) == 0.0);
  CHECK(h1_norm(zero) == 0.0);

  GridFunction g(0.0, 100.0, 2048);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = qc({2, 1.0, 0.0}, g.x(i) - 50.0);
  CHECK(mass(g) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("H1 norm of the scaled soliton follows the small-c power law") {
  auto norm_of = [](double c) {
    const double half = 60.0 / std::sqrt(c);
    GridFunction g(0.0, 2.0 * half, 4096);
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = qc({2, c, 0.0}, g.x(i) - half);
    return h1_norm(g);
  };
  const double theta = (5.0 - 2.0) / (4.0 * (2.0 - 1.0));  // exponent for p = 2
  // slope of log||q_c|| against log c within 5% of the predicted power
  const double slope = std::log(norm_of(1.0) / norm_of(0.01)) / std::log(100.0);
  CHECK(std::abs(slope - theta) / theta < 0.05);
  // the prefactor is c-independent on the small-c side to 1%
  const double r1 = norm_of(0.01) / std::pow(0.01, theta);
  const double r2 = norm_of(0.1) / std::pow(0.1, theta);
  CHECK(std::abs(r1 / r2 - 1.0) < 0.01);
}

TEST_CASE("grid invariants are enforced") {
  CHECK_THROWS_AS(GridFunction(0.0, 10.0, 15), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(0.0, 10.0, 100), std::invalid_argument);  // not pow2
  CHECK_THROWS_AS(GridFunction(0.0, -1.0, 64), std::invalid_argument);
}
