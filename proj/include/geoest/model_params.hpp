#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "geoest/types.hpp"

namespace geoest {

/// Exact mu, sigma, eta for the models with a known closed form:
/// identity link with Gaussian (or no) noise, and the noiseless sign link.
std::optional<ModelParams> closed_form_params(const ObservationModel& model, double norm_x);

struct QuadratureOptions {
  int order = 64;
  /// Throw DegenerateInputError instead of leaving lambda empty when mu ~ 0.
  bool require_lambda = false;
  bool estimate_psi = true;
};

/// mu, sigma, eta (plus lambda, psi, C_f) by Gauss-Hermite quadrature.
///
/// With Gaussian pre-noise of level nu the pair (g, eps) is rotated into
/// w = (|x| g + eps) / beta, beta = sqrt(|x|^2 + nu^2), which reduces every
/// moment to a one-dimensional integral of f(beta w) against a polynomial in w.
/// Links with a jump at 0 are integrated separately on each half-line.
ModelParams quadrature_params(const ObservationModel& model, double norm_x, const QuadratureOptions& opts = {});

/// Same, for an arbitrary scalar link (used for links outside LinkFunction,
/// e.g. even functions). C_f is not computed.
ModelParams quadrature_params(const std::function<double(double)>& link, bool discontinuous_at_zero,
                              const NoiseDist& pre_noise, const NoiseDist& post_noise, double norm_x,
                              const QuadratureOptions& opts = {});

/// Sampling estimator of the same quantities, with standard errors. psi is
/// estimated from the first min(n_samples, 2e5) draws.
ModelParams monte_carlo_params(const ObservationModel& model, double norm_x, std::int64_t n_samples,
                               std::uint64_t seed);

/// Closed form when available, else quadrature, else Monte Carlo (logistic pre-noise).
ModelParams auto_params(const ObservationModel& model, double norm_x, std::uint64_t seed,
                        std::int64_t mc_samples = 1'000'000);

/// lambda of `p`, or DegenerateInputError when it is undefined (mu ~ 0).
double require_lambda(const ModelParams& p);

/// Candidate values of the link constant C_f = C * (E f(g)^4)^(1/4).
struct CfConstant {
  /// C = 48^(1/4) / Pr(|g| >= 1). This is the constant the argument actually
  /// supports (mu >= |x| f(beta) Pr(|g| >= 1) / beta, sigma, eta <= 3^(1/4) f(beta) M)
  /// and the one used for bounds.
  double value = 0.0;
  /// C = 48^(1/4) * Pr(|g| <= 1), reproducing the commonly quoted 1.8 / 2.36.
  double printed = 0.0;
  /// C = 48^(1/4) * Pr(|g| >= 1), the formula taken literally.
  double literal = 0.0;
  /// M = (E f(g)^4)^(1/4).
  double fourth_moment_root = 0.0;
};

/// Requires f odd and non-decreasing (checked on a grid; PreconditionError otherwise).
CfConstant compute_cf(const LinkFunction& f, int order = 64);
CfConstant compute_cf(const std::function<double(double)>& f, bool discontinuous_at_zero, int order = 64);

/// psi with E exp(y^2 / psi^2) = 2 for y = f(beta w) + delta, the expectation
/// over w truncated to |w| <= 8.
double estimate_psi(const std::function<double(double)>& link, double beta, const NoiseDist& post_noise);

}  // namespace geoest
