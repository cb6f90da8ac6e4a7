#include "geoest/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geoest/errors.hpp"
#include "geoest/projections.hpp"
#include "geoest/rng.hpp"

namespace geoest {

namespace {

// Sorted magnitudes of g with prefix sums, for the l1/l2 support function.
class SortedMagnitudes {
 public:
  explicit SortedMagnitudes(const Vector& g) : a_(static_cast<std::size_t>(g.size())) {
    for (Eigen::Index i = 0; i < g.size(); ++i) a_[static_cast<std::size_t>(i)] = std::fabs(g(i));
    std::sort(a_.begin(), a_.end(), std::greater<>());
    p1_.assign(a_.size() + 1, 0.0);
    p2_.assign(a_.size() + 1, 0.0);
    for (std::size_t i = 0; i < a_.size(); ++i) {
      p1_[i + 1] = p1_[i] + a_[i];
      p2_[i + 1] = p2_[i] + a_[i] * a_[i];
    }
  }

  // sup <g,u> s.t. ||u||_1 <= L, ||u||_2 <= t, via the dual
  //   min_{theta >= 0}  L theta + t ||soft(g, theta)||_2,
  // a convex function of theta whose slope is L - t ||soft||_1 / ||soft||_2.
  double support(double L, double t) const {
    if (a_.empty() || t <= 0.0 || L <= 0.0) return 0.0;
    const double max = a_.front();
    if (max == 0.0) return 0.0;
    const std::size_t n = a_.size();
    const double l1 = p1_[n], l2 = std::sqrt(p2_[n]);
    if (t * l1 <= L * l2) return t * l2;  // l1 constraint inactive
    const std::size_t ties = count_above(max * (1.0 - 1e-15)) ;
    if (L <= t * std::sqrt(static_cast<double>(ties))) return L * max;  // l2 constraint inactive
    double lo = 0.0, hi = max;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * max; ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto [s1, s2] = soft_norms(mid);
      if (t * s1 > L * s2) lo = mid;  // slope negative: move right
      else hi = mid;
    }
    const double theta = 0.5 * (lo + hi);
    return L * theta + t * soft_norms(theta).second;
  }

  double max() const { return a_.empty() ? 0.0 : a_.front(); }

 private:
  std::size_t count_above(double theta) const {
    // a_ is descending: number of entries strictly greater than theta
    return static_cast<std::size_t>(
        std::partition_point(a_.begin(), a_.end(), [theta](double v) { return v > theta; }) - a_.begin());
  }

  std::pair<double, double> soft_norms(double theta) const {
    const std::size_t k = count_above(theta);
    const double kd = static_cast<double>(k);
    const double s1 = p1_[k] - kd * theta;
    double s2sq = 0.0;
    if (k <= 64) {
      for (std::size_t i = 0; i < k; ++i) s2sq += (a_[i] - theta) * (a_[i] - theta);
    } else {
      s2sq = std::max(p2_[k] - 2.0 * theta * p1_[k] + kd * theta * theta, 0.0);
    }
    return {s1, std::sqrt(s2sq)};
  }

  std::vector<double> a_;
  std::vector<double> p1_, p2_;
};

double top_k_sum_squares(Vector sq, Eigen::Index k) {
  k = std::min(k, sq.size());
  if (k == sq.size()) return sq.sum();
  std::nth_element(sq.data(), sq.data() + (k - 1), sq.data() + sq.size(), std::greater<>());
  return sq.head(k).sum();
}

double low_rank_unit_sup(const Vector& g, const LowRankCone& k) {
  Eigen::Map<const Matrix> gm(g.data(), k.d1, k.d2);
  Vector sv;
  if (std::min(k.d1, k.d2) <= 2 * k.r) return g.norm();
  Eigen::BDCSVD<Matrix> svd(gm);
  if (svd.info() != Eigen::Success) throw NumericalError("width_sup_sample: SVD did not converge");
  sv = svd.singularValues();
  return std::sqrt(sv.head(2 * k.r).squaredNorm());
}

void check_g(const FeasibleSet& set, const Vector& g) {
  if (g.size() != set.dim())
    throw ContractViolation("width: g has dimension " + std::to_string(g.size()) + ", set has " +
                            std::to_string(set.dim()));
}

void check_scales(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ContractViolation("width: empty scale grid");
  for (double t : t_grid)
    if (!(t > 0.0) || !std::isfinite(t)) throw ContractViolation("width: scales must be finite and > 0");
}

// Per-sample suprema for every scale in `ts`.
void sample_sups(const FeasibleSet& set, const Vector& g, const std::vector<double>& ts, std::vector<double>& out) {
  out.resize(ts.size());
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparseCone>) {
          const double unit = std::sqrt(top_k_sum_squares(g.array().square().matrix(), 2 * k.s));
          for (std::size_t i = 0; i < ts.size(); ++i) out[i] = ts[i] * unit;
        } else if constexpr (std::is_same_v<T, LowRankCone>) {
          const double unit = low_rank_unit_sup(g, k);
          for (std::size_t i = 0; i < ts.size(); ++i) out[i] = ts[i] * unit;
        } else if constexpr (std::is_same_v<T, L1Ball>) {
          const SortedMagnitudes sm(g);
          for (std::size_t i = 0; i < ts.size(); ++i) out[i] = sm.support(2.0 * k.radius, ts[i]);
        } else if constexpr (std::is_same_v<T, EuclideanBall>) {
          const double nrm = g.norm();
          for (std::size_t i = 0; i < ts.size(); ++i) out[i] = std::min(ts[i], 2.0 * k.radius) * nrm;
        } else {
          const double nrm = g.norm();
          for (std::size_t i = 0; i < ts.size(); ++i) out[i] = ts[i] * nrm;
        }
      },
      set.variant());
}

Vector gaussian_vector(Rng& rng, Eigen::Index n) {
  Vector g(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = rng.normal();
  return g;
}

WidthEstimate finish(long double sum, long double sumsq, std::int64_t n, std::optional<double> t) {
  const long double N = static_cast<long double>(n);
  const long double mean = sum / N;
  const long double var = std::max<long double>((sumsq - N * mean * mean) / (N - 1), 0.0L);
  return WidthEstimate{static_cast<double>(mean), static_cast<double>(std::sqrt(var / N)), n, t};
}

// Random index subset of size s (partial Fisher-Yates).
std::vector<Eigen::Index> random_support(Eigen::Index n, Eigen::Index s, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(s));
  return idx;
}

double ball_radius_draw(Rng& rng, double radius, double dim) { return radius * std::pow(rng.uniform(), 1.0 / dim); }

Vector packing_candidate(const FeasibleSet& set, double t, std::int64_t index, Rng& rng) {
  const Eigen::Index n = set.dim();
  return std::visit(
      [&](const auto& k) -> Vector {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparseCone>) {
          Vector v = Vector::Zero(n);
          if (k.s == 0) return v;
          const auto supp = random_support(n, k.s, rng);
          if (index % 2 == 0) {
            // equal-magnitude s-sparse points of norm t
            const double a = t / std::sqrt(static_cast<double>(k.s));
            for (auto i : supp) v(i) = rng.uniform() < 0.5 ? -a : a;
          } else {
            for (auto i : supp) v(i) = rng.normal();
            v *= ball_radius_draw(rng, t, static_cast<double>(k.s)) / v.norm();
          }
          return v;
        } else if constexpr (std::is_same_v<T, LowRankCone>) {
          const Matrix u = gaussian_vector(rng, k.d1 * k.r).reshaped(k.d1, k.r);
          const Matrix w = gaussian_vector(rng, k.d2 * k.r).reshaped(k.d2, k.r);
          const Matrix m = u * w.transpose();
          const double dim = static_cast<double>(k.r * (k.d1 + k.d2 - k.r));
          Vector v = m.reshaped();
          return v * (ball_radius_draw(rng, t, dim) / v.norm());
        } else if constexpr (std::is_same_v<T, L1Ball>) {
          Vector v = Vector::Zero(n);
          if (index % 2 == 0) {
            const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
            const double a = std::min(k.radius, t);
            v(i) = rng.uniform() < 0.5 ? -a : a;
            return v;
          }
          v = gaussian_vector(rng, n);
          v *= t * std::sqrt(static_cast<double>(n)) * rng.uniform() / v.norm();
          v = project_l1_ball(v, k.radius);
          const double nrm = v.norm();
          if (nrm > t) v *= t / nrm;
          return v;
        } else {
          double radius = t;
          if constexpr (std::is_same_v<T, EuclideanBall>) radius = std::min(t, k.radius);
          Vector v = gaussian_vector(rng, n);
          return v * (ball_radius_draw(rng, radius, static_cast<double>(n)) / v.norm());
        }
      },
      set.variant());
}

}  // namespace

double l1_l2_support(const Vector& g, double l1_radius, double t) {
  return SortedMagnitudes(g).support(l1_radius, t);
}

double width_sup_sample(const FeasibleSet& set, const Vector& g, double t) {
  check_g(set, g);
  if (!(t > 0.0)) throw ContractViolation("width_sup_sample: t must be > 0");
  std::vector<double> out;
  sample_sups(set, g, {t}, out);
  return out[0];
}

std::vector<WidthEstimate> local_mean_width_grid(const FeasibleSet& set, const std::vector<double>& t_grid,
                                                 std::int64_t n_samples, std::uint64_t seed) {
  check_scales(t_grid);
  if (n_samples < 2) throw ContractViolation("local_mean_width: n_samples must be >= 2");
  std::vector<long double> sum(t_grid.size(), 0.0L), sumsq(t_grid.size(), 0.0L);
  std::vector<double> vals;
  Rng rng(seed);
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const Vector g = gaussian_vector(rng, set.dim());
    sample_sups(set, g, t_grid, vals);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      sum[i] += vals[i];
      sumsq[i] += static_cast<long double>(vals[i]) * vals[i];
    }
  }
  std::vector<WidthEstimate> out;
  out.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) out.push_back(finish(sum[i], sumsq[i], n_samples, t_grid[i]));
  return out;
}

WidthEstimate local_mean_width(const FeasibleSet& set, double t, std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw ContractViolation("local_mean_width: n_samples must be >= 100");
  return local_mean_width_grid(set, {t}, n_samples, seed).front();
}

WidthEstimate global_mean_width(const FeasibleSet& set, std::int64_t n_samples, std::uint64_t seed) {
  if (!set.is_bounded())
    throw DomainError("global_mean_width: " + set.name() + " is unbounded, its global width is infinite");
  if (n_samples < 2) throw ContractViolation("global_mean_width: n_samples must be >= 2");
  Rng rng(seed);
  long double sum = 0, sumsq = 0;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const Vector g = gaussian_vector(rng, set.dim());
    double v = 0.0;
    if (auto* b = std::get_if<L1Ball>(&set.variant())) v = 2.0 * b->radius * g.lpNorm<Eigen::Infinity>();
    else if (auto* e = std::get_if<EuclideanBall>(&set.variant())) v = 2.0 * e->radius * g.norm();
    sum += v;
    sumsq += static_cast<long double>(v) * v;
  }
  return finish(sum, sumsq, n_samples, std::nullopt);
}

double width_bound_formula(const FeasibleSet& set) {
  const double n = static_cast<double>(set.dim());
  if (auto* k = std::get_if<LowRankCone>(&set.variant()))
    return std::sqrt(2.0 * static_cast<double>(k->r) * static_cast<double>(k->d1 + k->d2));
  if (auto* b = std::get_if<L1Ball>(&set.variant())) {
    const double s = b->radius * b->radius;
    return 4.0 * std::sqrt(2.0 * s * std::log(n));
  }
  if (auto* k = std::get_if<SparseCone>(&set.variant())) {
    const double s = static_cast<double>(k->s);
    if (s == 0.0) return 0.0;
    return std::sqrt(2.0 * s * std::log(2.0 * n / s)) + 2.0 * std::sqrt(s);
  }
  throw DomainError("width_bound_formula: no closed-form width bound for " + set.name());
}

std::vector<Vector> packing_candidates(const FeasibleSet& set, double t, std::int64_t n_candidates,
                                       std::uint64_t seed) {
  if (!(t > 0.0)) throw ContractViolation("packing: t must be > 0");
  Rng rng(seed);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n_candidates, 0)));
  for (std::int64_t k = 0; k < n_candidates; ++k) out.push_back(packing_candidate(set, t, k, rng));
  return out;
}

std::int64_t packing_lower_bound(const FeasibleSet& set, double t, std::int64_t n_candidates, std::uint64_t seed) {
  if (!(t > 0.0)) throw ContractViolation("packing_lower_bound: t must be > 0");
  const double sep2 = (t / 10.0) * (t / 10.0);
  Rng rng(seed);
  std::vector<Vector> accepted;
  for (std::int64_t k = 0; k < n_candidates; ++k) {
    Vector c = packing_candidate(set, t, k, rng);
    bool ok = true;
    for (const auto& a : accepted) {
      if ((a - c).squaredNorm() <= sep2) {
        ok = false;
        break;
      }
    }
    if (ok) accepted.push_back(std::move(c));
  }
  return std::max<std::int64_t>(static_cast<std::int64_t>(accepted.size()), 1);
}

MinimaxRadii minimax_radii(const FeasibleSet& set, double nu, std::int64_t m, const std::vector<double>& t_grid,
                           const MinimaxOptions& opts, std::uint64_t seed) {
  if (t_grid.empty()) throw ContractViolation("minimax_radii: empty t grid");
  check_scales(t_grid);
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw ContractViolation("minimax_radii: t grid must be sorted");
  if (!(nu > 0.0)) throw ContractViolation("minimax_radii: nu must be > 0");
  if (m < 1) throw ContractViolation("minimax_radii: m must be >= 1");

  const std::uint64_t width_seed = derive_seed(seed, 1);
  const std::uint64_t packing_seed = derive_seed(seed, 2);
  MinimaxRadii out;
  out.t_grid = t_grid;
  out.diam = set.diameter();
  out.widths = local_mean_width_grid(set, t_grid, opts.width_samples, width_seed);

  // Packing candidates of a cone scale exactly with t, so one greedy pass serves every scale.
  std::optional<std::int64_t> cone_packing;
  if (set.is_cone()) cone_packing = packing_lower_bound(set, 1.0, opts.packing_candidates, packing_seed);
  auto packing_at = [&](double t) {
    return cone_packing ? *cone_packing : packing_lower_bound(set, t, opts.packing_candidates, packing_seed);
  };

  const double noise = nu / std::sqrt(static_cast<double>(m));
  out.delta_upper = std::numeric_limits<double>::infinity();
  out.delta_lower = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const std::int64_t p = packing_at(t);
    out.packings.push_back(p);
    const double log_p = std::log(static_cast<double>(p));
    out.delta_upper = std::min(out.delta_upper, t + noise * (1.0 + out.widths[i].value / t));
    out.delta_lower = std::min(out.delta_lower, t + noise * (1.0 + std::sqrt(log_p)));
    if (p >= 2) {
      const double ratio = out.widths[i].value / (t * std::sqrt(log_p));
      out.alpha_sup = out.alpha_sup ? std::max(*out.alpha_sup, ratio) : ratio;
    }
  }
  out.scale_half = 0.5 * out.delta_upper;
  out.width_at_scale = local_mean_width_grid(set, {out.scale_half}, opts.width_samples, width_seed).front();
  out.packing_at_scale = packing_at(out.scale_half);
  if (out.packing_at_scale >= 2)
    out.alpha_at_scale =
        out.width_at_scale.value / (out.scale_half * std::sqrt(std::log(static_cast<double>(out.packing_at_scale))));
  return out;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw ContractViolation("log_grid: need 0 < lo <= hi, count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  return out;
}

std::vector<double> default_t_grid(double nu, std::int64_t m) {
  const double scale = nu / std::sqrt(static_cast<double>(m)) + 1.0;
  return log_grid(1e-3 * scale, 10.0 * scale, 40);
}

}  // namespace geoest
