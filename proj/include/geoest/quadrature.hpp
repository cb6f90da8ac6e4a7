#pragma once

#include <functional>
#include <vector>

namespace geoest {

/// Nodes and weights of a quadrature rule. For the Gaussian rules the weights
/// already include the N(0,1) density, so sum w_i h(x_i) approximates E h(g).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal weight (probabilists' form).
/// Exact for polynomials of degree <= 2*order - 1.
QuadratureRule gauss_hermite(int order);

/// Gauss rule for the half-line weight phi(g) on (0, inf); weights sum to 1/2.
/// Integrates piecewise polynomials with a break at 0 exactly (up to degree
/// 2*order - 1 on each side) when applied to both halves.
QuadratureRule half_gauss_hermite(int order);

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int order);

/// E h(g), g ~ N(0,1). With split_at_zero the two half-lines are integrated
/// separately, which keeps full accuracy for integrands that jump at 0.
double normal_expectation(const std::function<double(double)>& h, int order, bool split_at_zero);

/// E h(g) restricted to |g| <= half_width, by composite Gauss-Legendre split at 0.
double truncated_normal_expectation(const std::function<double(double)>& h, double half_width = 8.0,
                                    int panels_per_side = 64, int order = 16);

}  // namespace geoest
