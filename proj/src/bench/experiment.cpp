#include "geoest/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "geoest/errors.hpp"
#include "geoest/estimators.hpp"
#include "geoest/model_params.hpp"
#include "geoest/projections.hpp"
#include "geoest/rng.hpp"
#include "geoest/sampler.hpp"

namespace geoest::bench {

namespace {

constexpr std::uint64_t kParamsStream = 0x706172616d73ULL;  // "params"
constexpr std::uint64_t kWidthStream = 0x7769647468ULL;     // "width"

bool wants(const ExperimentConfig& c, const char* metric) {
  return std::find(c.metrics.begin(), c.metrics.end(), metric) != c.metrics.end();
}

Vector gaussian(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

Vector unit(Vector v) {
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw DegenerateInputError("random signal: drew the zero vector");
  return v / nrm;
}

Vector sparse_direction(Rng& rng, Eigen::Index n, Eigen::Index k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Vector v = Vector::Zero(n);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    v(idx[static_cast<std::size_t>(i)]) = rng.normal();
  }
  return unit(std::move(v));
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::int64_t m, std::int64_t trial_index) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial_index));
}

void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& task,
                  std::vector<char>* done) {
  if (done) done->assign(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)), 0);
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::int64_t failed_index = std::numeric_limits<std::int64_t>::max();
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
        if (done) (*done)[static_cast<std::size_t>(i)] = 1;
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
        stop.store(true);
      }
    }
  };

  const int n_workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(count, 1)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  std::vector<double> ok;
  for (double v : values) {
    if (std::isfinite(v)) ok.push_back(v);
    else ++s.n_failed;
  }
  s.n_valid = static_cast<std::int64_t>(ok.size());
  if (ok.empty()) {
    s.mean = s.q50 = s.q90 = s.q95 = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  long double sum = 0.0L;
  for (double v : ok) sum += v;
  const long double mean = sum / static_cast<long double>(ok.size());
  s.mean = static_cast<double>(mean);
  if (ok.size() >= 2) {
    long double ss = 0.0L;
    for (double v : ok) ss += (v - mean) * (v - mean);
    const long double var = ss / static_cast<long double>(ok.size() - 1);
    s.std_error = static_cast<double>(std::sqrt(var / static_cast<long double>(ok.size())));
  }
  std::sort(ok.begin(), ok.end());
  s.q50 = quantile(ok, 0.50);
  s.q90 = quantile(ok, 0.90);
  s.q95 = quantile(ok, 0.95);
  return s;
}

std::optional<SlopeFit> fit_loglog(const std::vector<double>& x, const std::vector<double>& means,
                                   const std::vector<std::optional<double>>& std_errors) {
  std::vector<double> lx, ly;
  std::vector<std::optional<double>> rel;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(means[i] > 0.0) || !std::isfinite(means[i])) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(means[i]));
    rel.push_back(std_errors[i] ? std::optional<double>(*std_errors[i] / means[i]) : std::nullopt);
  }
  if (lx.size() < 2) return std::nullopt;
  const double k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // delta method: Var(log mean) ~ (se / mean)^2
  double var = 0.0;
  bool have_all = true;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    if (!rel[i]) {
      have_all = false;
      break;
    }
    const double c = (lx[i] - mx) / sxx;
    var += c * c * (*rel[i]) * (*rel[i]);
  }
  if (have_all) f.half_width = 1.96 * std::sqrt(var);
  return f;
}

// ---------------------------------------------------------------------------

Experiment::Experiment(ExperimentConfig config) : cfg_(std::move(config)) {
  const std::string where = cfg_.id + ": ";
  if (auto* k = std::get_if<SparseCone>(&cfg_.set.variant()); k && k->s == 0)
    throw ConfigError(where + "SparseCone with s = 0 contains only the zero signal");

  params_ = auto_params(cfg_.model, cfg_.norm_x, derive_seed(cfg_.master_seed, kParamsStream), cfg_.mc_samples);
  if (!(std::fabs(params_.mu) > 1e-12))
    throw ConfigError(where + "mu is 0 for this model, so mu * xbar carries no information about x");
  if (wants(cfg_, "scaled_error") && !params_.lambda)
    throw ConfigError(where + "scaled_error needs lambda = |x| / mu, which is undefined here");

  const double mu = std::fabs(params_.mu);
  if (cfg_.set.is_bounded()) {
    const double radius = *cfg_.set.diameter() / 2.0;
    if (cfg_.fixed_signal) {
      const Vector target = mu * (*cfg_.fixed_signal / cfg_.fixed_signal->norm());
      if (!contains(cfg_.set, Signal(target), 1e-9))
        throw ConfigError(where + "mu * xbar is not in " + cfg_.set.name());
    } else if (mu > radius * (1.0 + 1e-12)) {
      throw ConfigError(where + "no unit direction xbar has mu * xbar in " + cfg_.set.name() + " (mu = " +
                        std::to_string(mu) + ")");
    }
  }

  if (!cfg_.t_grid.empty()) {
    t_grid_ = cfg_.t_grid;
  } else {
    const double scale = std::max({mu, params_.eta, 1e-6});
    t_grid_ = log_grid(1e-4 * scale, 1e2 * scale, 61);
  }
  width_seed_ = derive_seed(cfg_.master_seed, kWidthStream);
  widths_ = local_mean_width_grid(cfg_.set, t_grid_, cfg_.width_samples, width_seed_);
  if (cfg_.set.is_cone()) w1_ = local_mean_width_grid(cfg_.set, {1.0}, cfg_.width_samples, width_seed_).front();
  if (cfg_.set.is_bounded()) wglobal_ = global_mean_width(cfg_.set, cfg_.width_samples, width_seed_);
}

Vector Experiment::draw_direction(std::uint64_t seed) const {
  if (cfg_.fixed_signal) return *cfg_.fixed_signal / cfg_.fixed_signal->norm();
  Rng rng(derive_seed(seed, 1));
  const Eigen::Index n = cfg_.set.dim();
  return std::visit(
      [&](const auto& k) -> Vector {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparseCone>) {
          return sparse_direction(rng, n, k.s);
        } else if constexpr (std::is_same_v<T, LowRankCone>) {
          const Matrix u = gaussian(rng, k.d1 * k.r).reshaped(k.d1, k.r);
          const Matrix v = gaussian(rng, k.d2 * k.r).reshaped(k.d2, k.r);
          const Matrix x = u * v.transpose();
          return unit(x.reshaped());
        } else if constexpr (std::is_same_v<T, L1Ball>) {
          // mu xbar in R B_1 needs ||xbar||_1 <= R / mu; a unit vector on k coordinates has
          // ||xbar||_1 <= sqrt(k). A quarter of the draws are vertices, the hardest case.
          const double ratio = k.radius / std::fabs(params_.mu);
          if (rng.uniform() < 0.25) return sparse_direction(rng, n, 1);
          const auto support = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(ratio * ratio)), 1, n);
          return sparse_direction(rng, n, support);
        } else {
          return unit(gaussian(rng, n));
        }
      },
      cfg_.set.variant());
}

TrialOutcome Experiment::run_trial(std::int64_t m, std::int64_t trial_index) const {
  if (m < 1) throw ContractViolation("run_trial: m must be >= 1");
  if (trial_index < 0) throw ContractViolation("run_trial: trial index must be >= 0");
  TrialOutcome out;
  out.m = m;
  out.trial = trial_index;
  out.seed = trial_seed(cfg_.master_seed, m, trial_index);

  const Vector xbar = draw_direction(out.seed);
  const Vector x = cfg_.norm_x * xbar;
  const auto shape = [&](Vector v) {
    if (auto* k = std::get_if<LowRankCone>(&cfg_.set.variant())) return Signal(std::move(v), MatrixShape{k->d1, k->d2});
    return Signal(std::move(v));
  };

  const MeasurementBatch batch = gen_measurements(cfg_.set.dim(), m, derive_seed(out.seed, 2));
  const Vector y = gen_observations(batch, Signal(x), cfg_.model, derive_seed(out.seed, 3));
  const Vector target = params_.mu * xbar;

  const Signal xlin = linear_estimator(batch, y);
  const double lin_err = (xlin.values() - target).norm();
  if (wants(cfg_, "linear_error")) out.values["linear_error"] = lin_err;
  if (wants(cfg_, "linear_error_sq")) out.values["linear_error_sq"] = lin_err * lin_err;

  const bool need_proj = wants(cfg_, "projected_error") || wants(cfg_, "direction_error") ||
                         (wants(cfg_, "scaled_error") && cfg_.set.is_cone());
  if (!need_proj) return out;
  const Signal xhat = project(cfg_.set, shape(xlin.values()));
  if (wants(cfg_, "projected_error")) out.values["projected_error"] = (xhat.values() - target).norm();
  if (wants(cfg_, "direction_error")) {
    const double nrm = xhat.norm();
    out.values["direction_error"] =
        nrm > 0.0 ? (xhat.values() / nrm - xbar).norm() : std::numeric_limits<double>::quiet_NaN();
  }
  if (wants(cfg_, "scaled_error")) {
    const double lambda = *params_.lambda;
    const Vector scaled = cfg_.set.is_cone()
                              ? Vector(lambda * xhat.values())
                              : project(cfg_.set.scaled(std::fabs(lambda)), shape(lambda * xlin.values())).values();
    out.values["scaled_error"] = (scaled - x).norm();
  }
  return out;
}

std::map<std::string, double> Experiment::bounds_for(std::int64_t m) const {
  std::map<std::string, double> b;
  const double rm = std::sqrt(static_cast<double>(m));
  const double mu = std::fabs(params_.mu), sigma = params_.sigma, eta = params_.eta;
  auto grid_min = [&](auto&& term) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t_grid_.size(); ++i) best = std::min(best, term(t_grid_[i], widths_[i].value));
    return best;
  };

  b["thm_main"] = grid_min([&](double t, double w) { return t + 2.0 / rm * (sigma + eta * w / t); });
  if (wglobal_) b["global_width"] = 2.0 * sigma / rm + 2.0 * std::sqrt(2.0) * std::sqrt(eta * wglobal_->value / rm);
  const double gamma = std::sqrt(2.0 * M_PI) * sigma + 2.0 * eta;
  if (w1_) {
    b["cone_simplified"] = gamma * w1_->value / rm;
    b["direction"] = 2.0 * gamma / mu * w1_->value / rm;
  }

  const auto& model = cfg_.model;
  const bool gaussian_or_none = model.pre_noise.kind != NoiseDist::Kind::Logistic &&
                                model.post_noise.kind != NoiseDist::Kind::Logistic;
  if (model.link.kind() == LinkFunction::Kind::Identity && gaussian_or_none) {
    const double nu = std::sqrt(model.pre_noise.variance() + model.post_noise.variance());
    const double scale = cfg_.norm_x + nu;
    b["corollary_noisy_linear"] =
        grid_min([&](double t, double w) { return t + kNoisyLinearC * scale / rm * (1.0 + w / t); });
    if (w1_) b["corollary_noisy_linear_cone"] = kNoisyLinearConeC * scale * w1_->value / rm;
  }
  if (model.link.kind() == LinkFunction::Kind::Sign && model.pre_noise.is_none() && model.post_noise.is_none() && w1_) {
    b["corollary_binary"] = kBinaryC * w1_->value / rm;
    b["corollary_binary_direction"] = 2.0 / mu * kBinaryC * w1_->value / rm;
  }
  if (params_.psi && eta > 0.0) {
    // failure probability 2 exp(-c s^2 eta^4 / psi^4) <= 0.05 with c = 1
    const double psi = *params_.psi;
    const double s = std::min(psi * psi / (eta * eta) * std::sqrt(std::log(40.0)), rm);
    b["whp_95"] = grid_min([&](double t, double w) { return t + 4.0 * eta / rm * (s + w / t); });
  }
  return b;
}

ExperimentResult Experiment::run(int threads) const {
  ExperimentResult r;
  r.config = cfg_;
  r.params = params_;
  r.t_grid = t_grid_;
  r.widths = widths_;
  r.width_unit = w1_;
  r.width_global = wglobal_;
  r.width_seed = width_seed_;

  const auto n_m = static_cast<std::int64_t>(cfg_.m_grid.size());
  const std::int64_t total = n_m * cfg_.trials;
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(total));
  std::vector<char> done;
  try {
    parallel_for(
        total, threads,
        [&](std::int64_t i) {
          const std::int64_t mi = i / cfg_.trials, ti = i % cfg_.trials;
          outcomes[static_cast<std::size_t>(i)] = run_trial(cfg_.m_grid[static_cast<std::size_t>(mi)], ti);
        },
        &done);
  } catch (const std::exception& e) {
    r.valid = false;
    r.error = e.what();
  }

  for (std::int64_t mi = 0; mi < n_m; ++mi) {
    PerM pm;
    pm.m = cfg_.m_grid[static_cast<std::size_t>(mi)];
    std::map<std::string, std::vector<double>> vals;
    for (std::int64_t ti = 0; ti < cfg_.trials; ++ti) {
      const auto idx = static_cast<std::size_t>(mi * cfg_.trials + ti);
      pm.trial_seeds.push_back(trial_seed(cfg_.master_seed, pm.m, ti));
      if (!done[idx]) continue;
      for (const auto& [k, v] : outcomes[idx].values) vals[k].push_back(v);
      r.trials.push_back(outcomes[idx]);
    }
    for (const auto& [k, v] : vals) pm.metrics[k] = summarize(v);
    pm.bounds = bounds_for(pm.m);
    r.per_m.push_back(std::move(pm));
  }

  for (const auto& metric : cfg_.metrics) {
    std::vector<double> xs, means;
    std::vector<std::optional<double>> ses;
    for (const auto& pm : r.per_m) {
      auto it = pm.metrics.find(metric);
      if (it == pm.metrics.end()) continue;
      xs.push_back(static_cast<double>(pm.m));
      means.push_back(it->second.mean);
      ses.push_back(it->second.std_error);
    }
    if (auto f = fit_loglog(xs, means, ses)) r.fits[metric] = *f;
  }
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int threads) {
  return Experiment(config).run(threads);
}

}  // namespace geoest::bench
