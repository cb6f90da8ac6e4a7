#include <doctest.h>

#include <cmath>

#include "geoest/errors.hpp"
#include "geoest/quadrature.hpp"

using namespace geoest;

namespace {

// E g^k for g ~ N(0, 1): (k-1)!! for even k.
double gaussian_moment(int k) {
  if (k % 2) return 0.0;
  double r = 1.0;
  for (int j = k - 1; j > 1; j -= 2) r *= j;
  return r;
}

// E |g|^k = 2^{k/2} Gamma((k+1)/2) / sqrt(pi)
double abs_moment(int k) { return std::pow(2.0, k / 2.0) * std::tgamma((k + 1.0) / 2.0) / std::sqrt(M_PI); }

}  // namespace

TEST_CASE("Gauss-Hermite integrates polynomials exactly") {
  for (int order : {1, 5, 20, 64}) {
    const auto rule = gauss_hermite(order);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
    for (int k = 0; k <= std::min(2 * order - 1, 16); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], k);
      CHECK(std::fabs(s - gaussian_moment(k)) <= 1e-11 * abs_moment(k));
    }
  }
  CHECK_THROWS_AS(gauss_hermite(0), ContractViolation);
}

TEST_CASE("half-range rule integrates |g|^k and sign jumps") {
  const auto rule = half_gauss_hermite(32);
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  CHECK(wsum == doctest::Approx(0.5).epsilon(1e-13));
  for (int k = 0; k <= 9; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], k);
    CHECK(2.0 * s == doctest::Approx(abs_moment(k)).epsilon(1e-12));
  }
  const double e_abs = normal_expectation([](double g) { return g > 0 ? g : -g; }, 32, true);
  CHECK(std::fabs(e_abs - std::sqrt(2.0 / M_PI)) <= 1e-14);
  const double e_step = normal_expectation([](double g) { return g > 0 ? 1.0 : 0.0; }, 16, true);
  CHECK(std::fabs(e_step - 0.5) <= 1e-14);
}

TEST_CASE("Gauss-Legendre and the truncated expectation") {
  const auto rule = gauss_legendre(10);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 18);
  CHECK(s == doctest::Approx(2.0 / 19.0).epsilon(1e-13));
  CHECK(truncated_normal_expectation([](double g) { return g * g; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(truncated_normal_expectation([](double) { return 1.0; }, 1.0) ==
        doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-13));
}
