#include "geoest/bench/matcomp.hpp"

#include <cmath>

#include "geoest/errors.hpp"
#include "geoest/estimators.hpp"
#include "geoest/rng.hpp"
#include "geoest/sampler.hpp"

namespace geoest::bench {

Matrix completion_truth(std::int64_t d, std::int64_t r, double zeta, std::uint64_t seed) {
  Rng rng(seed);
  Matrix u(d, r), v(d, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < d; ++i) u(i, j) = rng.normal();
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < d; ++i) v(i, j) = rng.normal();
  Matrix x = u * v.transpose();
  const double peak = x.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) throw DegenerateInputError("completion_truth: drew the zero matrix");
  return x * (zeta / peak);
}

MatCompTrial run_matcomp_trial(const MatCompConfig& c, std::size_t p_index, std::int64_t trial_index) {
  if (p_index >= c.p_grid.size()) throw ContractViolation("run_matcomp_trial: p index out of range");
  MatCompTrial t;
  t.p = c.p_grid[p_index];
  t.trial = trial_index;
  t.seed = derive_seed(c.master_seed, static_cast<std::uint64_t>(p_index), static_cast<std::uint64_t>(trial_index));
  const Matrix x = completion_truth(c.d, c.r, c.zeta, derive_seed(t.seed, 1));
  const CompletionMask mask = gen_mask(c.d, t.p, derive_seed(t.seed, 2));
  const Matrix observed = observe_completion(Signal::from_matrix(x), mask, c.nu, derive_seed(t.seed, 3));
  const Signal xhat = completion_estimator(observed, mask, c.r);
  const double err = (xhat.as_matrix() - x).norm();
  t.observed = mask.count();
  t.entry_error = err / static_cast<double>(c.d);
  t.relative_error = err / x.norm();
  return t;
}

MatCompResult run_matcomp(const MatCompConfig& c, int threads) {
  MatCompResult r;
  r.config = c;
  const auto n_p = static_cast<std::int64_t>(c.p_grid.size());
  const std::int64_t total = n_p * c.trials;
  std::vector<MatCompTrial> out(static_cast<std::size_t>(total));
  std::vector<char> done;
  try {
    parallel_for(
        total, threads,
        [&](std::int64_t i) {
          out[static_cast<std::size_t>(i)] = run_matcomp_trial(c, static_cast<std::size_t>(i / c.trials), i % c.trials);
        },
        &done);
  } catch (const std::exception& e) {
    r.valid = false;
    r.error = e.what();
  }

  const double d = static_cast<double>(c.d);
  std::vector<double> ms, means;
  std::vector<std::optional<double>> ses;
  for (std::int64_t pi = 0; pi < n_p; ++pi) {
    MatCompPerP pp;
    pp.p = c.p_grid[static_cast<std::size_t>(pi)];
    pp.m = pp.p * d * d;
    pp.below_d_log_d = pp.m < d * std::log(d);
    pp.bound = kCompletionEnvelope * std::sqrt(static_cast<double>(c.r) * d / pp.m) * (c.zeta + c.nu);
    std::vector<double> ee, re;
    for (std::int64_t ti = 0; ti < c.trials; ++ti) {
      const auto idx = static_cast<std::size_t>(pi * c.trials + ti);
      pp.trial_seeds.push_back(
          derive_seed(c.master_seed, static_cast<std::uint64_t>(pi), static_cast<std::uint64_t>(ti)));
      if (!done[idx]) continue;
      ee.push_back(out[idx].entry_error);
      re.push_back(out[idx].relative_error);
      r.trials.push_back(out[idx]);
    }
    pp.entry_error = summarize(ee);
    pp.relative_error = summarize(re);
    ms.push_back(pp.m);
    means.push_back(pp.entry_error.mean);
    ses.push_back(pp.entry_error.std_error);
    r.per_p.push_back(std::move(pp));
  }
  r.fit = fit_loglog(ms, means, ses);
  return r;
}

}  // namespace geoest::bench
