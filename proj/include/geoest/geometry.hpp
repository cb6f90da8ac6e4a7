#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geoest/types.hpp"

namespace geoest {

/// Monte Carlo estimate of w(K) (scale_t empty) or w_t(K).
struct WidthEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::optional<double> scale_t;
};

/// sup of <g, u> over u in (K - K) intersected with t B_2, computed exactly.
double width_sup_sample(const FeasibleSet& set, const Vector& g, double t);

/// sup of <g, u> over ||u||_1 <= l1_radius, ||u||_2 <= t.
double l1_l2_support(const Vector& g, double l1_radius, double t);

WidthEstimate local_mean_width(const FeasibleSet& set, double t, std::int64_t n_samples, std::uint64_t seed);

/// Local widths on a grid of scales from one set of Gaussian draws (common
/// random numbers across t). Identical to calling local_mean_width per scale
/// with the same seed.
std::vector<WidthEstimate> local_mean_width_grid(const FeasibleSet& set, const std::vector<double>& t_grid,
                                                 std::int64_t n_samples, std::uint64_t seed);

/// Global width of a bounded set; DomainError for unbounded sets.
WidthEstimate global_mean_width(const FeasibleSet& set, std::int64_t n_samples, std::uint64_t seed);

/// Closed-form width upper bound:
///   LowRankCone  sqrt(2 r (d1 + d2))
///   L1Ball(R)    4 sqrt(2 s log n) with s = R^2
///   SparseCone   sqrt(2 s log(2n/s)) + 2 sqrt(s)   (explicit envelope; constant chosen here)
double width_bound_formula(const FeasibleSet& set);

/// Greedy (t/10)-separated subset of n_candidates random points of K cap tB_2.
/// A lower bound on the local packing number P_t; monotone in n_candidates.
std::int64_t packing_lower_bound(const FeasibleSet& set, double t, std::int64_t n_candidates, std::uint64_t seed);

/// The i-th packing candidate stream point is a deterministic function of
/// (set, t, seed); exposed for tests.
std::vector<Vector> packing_candidates(const FeasibleSet& set, double t, std::int64_t n_candidates,
                                       std::uint64_t seed);

struct MinimaxOptions {
  std::int64_t width_samples = 1000;
  std::int64_t packing_candidates = 1000;
};

/// Upper/lower minimax radii and the width-to-packing ratio alpha. All
/// quantities are estimates: widths are Monte Carlo, packings are greedy
/// lower bounds.
struct MinimaxRadii {
  double delta_lower = 0.0;  ///< inf_t t + nu/sqrt(m) (1 + sqrt(log P_t))
  double delta_upper = 0.0;  ///< inf_t t + nu/sqrt(m) (1 + w_t / t)
  std::optional<double> alpha_sup;       ///< sup over grid of w_t / (t sqrt(log P_t)), P_t >= 2
  std::optional<double> alpha_at_scale;  ///< same ratio at t = delta_upper / 2
  double scale_half = 0.0;               ///< delta_upper / 2
  WidthEstimate width_at_scale;
  std::int64_t packing_at_scale = 0;
  std::vector<double> t_grid;
  std::vector<WidthEstimate> widths;
  std::vector<std::int64_t> packings;
  std::optional<double> diam;
};

MinimaxRadii minimax_radii(const FeasibleSet& set, double nu, std::int64_t m, const std::vector<double>& t_grid,
                           const MinimaxOptions& opts, std::uint64_t seed);

/// count log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);
/// 40 log-spaced points on [1e-3, 10] * (nu / sqrt(m) + 1).
std::vector<double> default_t_grid(double nu, std::int64_t m);

}  // namespace geoest
