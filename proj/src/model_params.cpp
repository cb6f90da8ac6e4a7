#include "geoest/model_params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "geoest/errors.hpp"
#include "geoest/quadrature.hpp"
#include "geoest/rng.hpp"
#include "geoest/sampler.hpp"

namespace geoest {

namespace {

constexpr double kMuFloor = 1e-12;

double checked_norm(double norm_x) {
  if (!(norm_x >= 0.0) || !std::isfinite(norm_x)) throw ContractViolation("model params: norm_x must be >= 0");
  return norm_x;
}

void set_lambda(ModelParams& p, double norm_x, bool require) {
  if (std::fabs(p.mu) >= kMuFloor) {
    p.lambda = norm_x / p.mu;
  } else {
    p.lambda.reset();
    if (require)
      throw DegenerateInputError("degenerate scale: |mu| = " + std::to_string(std::fabs(p.mu)) +
                                 " < 1e-12, lambda = |x|/mu is undefined");
  }
}

void check_cauchy_schwarz(const ModelParams& p) {
  if (std::fabs(p.mu) > p.eta * (1.0 + 1e-9) + 1e-12)
    throw NumericalError("model params: |mu| > eta violates Cauchy-Schwarz (mu=" + std::to_string(p.mu) +
                         ", eta=" + std::to_string(p.eta) + ")");
}

// E over the post-noise delta of exp((y0 + delta)^2 / s^2).
double post_noise_mgf(double y0, double s, const NoiseDist& post) {
  const double s2 = s * s;
  switch (post.kind) {
    case NoiseDist::Kind::None:
      return std::exp(std::min(y0 * y0 / s2, 700.0));
    case NoiseDist::Kind::Gaussian: {
      const double t2 = post.scale * post.scale;
      if (s2 <= 2.0 * t2) return std::numeric_limits<double>::infinity();
      return std::exp(std::min(y0 * y0 / (s2 - 2.0 * t2), 700.0)) / std::sqrt(1.0 - 2.0 * t2 / s2);
    }
    case NoiseDist::Kind::Logistic: {
      static const QuadratureRule gl = gauss_legendre(8);
      const double half = 8.0 * std::sqrt(post.variance());
      const int panels = 32;
      const double width = 2.0 * half / panels;
      double acc = 0.0;
      for (int p = 0; p < panels; ++p) {
        const double a = -half + p * width;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
          const double d = a + 0.5 * width * (gl.nodes[i] + 1.0);
          const double z = d / post.scale;
          const double ez = std::exp(-std::fabs(z));
          const double density = ez / (post.scale * (1.0 + ez) * (1.0 + ez));
          const double y = y0 + d;
          acc += 0.5 * width * gl.weights[i] * density * std::exp(std::min(y * y / s2, 700.0));
        }
      }
      return acc;
    }
  }
  return 0.0;
}

// Solve F(s) = 2 for decreasing F by bisection on log s.
double solve_psi(const std::function<double(double)>& F, double scale_hint) {
  double hi = std::max(scale_hint, 1e-150) * 2.0;
  for (int i = 0; i < 400 && !(F(hi) < 2.0); ++i) hi *= 2.0;
  if (!(F(hi) < 2.0)) throw NumericalError("estimate_psi: could not bracket E exp(y^2/psi^2) = 2");
  double lo = hi;
  for (int i = 0; i < 400 && F(lo) < 2.0; ++i) lo *= 0.5;
  if (F(lo) < 2.0) return lo;
  for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-13; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (F(mid) >= 2.0) lo = mid;
    else hi = mid;
  }
  return std::sqrt(lo * hi);
}

void check_odd_nondecreasing(const std::function<double(double)>& f) {
  const int n = 4000;
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double u = -20.0 + 40.0 * i / n;
    const double fu = f(u);
    if (!std::isfinite(fu)) throw PreconditionError("compute_cf: link is not finite on [-20, 20]");
    if (fu < prev) throw PreconditionError("compute_cf: link is not non-decreasing");
    const double fm = f(-u);
    if (std::fabs(fm + fu) > 1e-12 * std::max(1.0, std::fabs(fu)))
      throw PreconditionError("compute_cf: link is not odd");
    prev = fu;
  }
}

ModelParams quadrature_core(const std::function<double(double)>& link, bool split, const NoiseDist& pre,
                            const NoiseDist& post, double norm_x, const QuadratureOptions& opts) {
  checked_norm(norm_x);
  if (opts.order < 20) throw ContractViolation("quadrature_params: order must be >= 20");
  if (pre.kind == NoiseDist::Kind::Logistic)
    throw DomainError("quadrature_params: logistic pre-noise has no Gauss-Hermite form; use monte_carlo_params");
  const double nu = pre.kind == NoiseDist::Kind::Gaussian ? pre.scale : 0.0;
  const double beta = std::hypot(norm_x, nu);
  const double tau2 = post.variance();

  ModelParams p;
  p.method = "quadrature";
  if (beta == 0.0) {
    p.mu = 0.0;
    p.eta = std::sqrt(tau2);
    p.sigma = std::sqrt(tau2);
  } else {
    const double rho = norm_x / beta;
    auto F = [&](double w) { return link(beta * w); };
    const double m1 = normal_expectation([&](double w) { return F(w) * w; }, opts.order, split);
    const double m_f2 = normal_expectation([&](double w) { const double f = F(w); return f * f; }, opts.order, split);
    const double m_f2w2 =
        normal_expectation([&](double w) { const double f = F(w); return f * f * w * w; }, opts.order, split);
    p.mu = rho * m1;
    const double second = rho * rho * m_f2w2 + (1.0 - rho * rho) * m_f2 + tau2;
    double var = second - p.mu * p.mu;
    if (var < 0.0) {
      if (var < -1e-12 * std::max(1.0, second))
        throw NumericalError("quadrature_params: negative variance " + std::to_string(var));
      var = 0.0;
    }
    p.sigma = std::sqrt(var);
    p.eta = std::sqrt(m_f2 + tau2);
  }
  set_lambda(p, norm_x, opts.require_lambda);
  if (opts.estimate_psi) p.psi = estimate_psi(link, beta, post);
  check_cauchy_schwarz(p);
  return p;
}

}  // namespace

double estimate_psi(const std::function<double(double)>& link, double beta, const NoiseDist& post_noise) {
  if (post_noise.kind == NoiseDist::Kind::None && beta == 0.0) return 0.0;
  // Precompute f(beta w) at the quadrature nodes; F(s) is then a weighted sum.
  const QuadratureRule gl = gauss_legendre(16);
  const int panels = 64;
  const double half = 8.0;
  const double width = half / panels;
  std::vector<double> ys, ws;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double a = pnl * width;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double w = a + 0.5 * width * (gl.nodes[i] + 1.0);
      const double weight = 0.5 * width * gl.weights[i] * std::exp(-0.5 * w * w) / std::sqrt(2.0 * M_PI);
      ys.push_back(link(beta * w));
      ws.push_back(weight);
      ys.push_back(link(-beta * w));
      ws.push_back(weight);
    }
  }
  double second = post_noise.variance();
  for (std::size_t i = 0; i < ys.size(); ++i) second += ws[i] * ys[i] * ys[i];
  if (second == 0.0) return 0.0;
  auto F = [&](double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) acc += ws[i] * post_noise_mgf(ys[i], s, post_noise);
    return acc;
  };
  return solve_psi(F, std::sqrt(second));
}

std::optional<ModelParams> closed_form_params(const ObservationModel& model, double norm_x) {
  checked_norm(norm_x);
  const auto& f = model.link;
  const bool pre_ok = model.pre_noise.kind != NoiseDist::Kind::Logistic;
  const bool post_ok = model.post_noise.kind != NoiseDist::Kind::Logistic;
  ModelParams p;
  p.method = "closed_form";
  if (f.kind() == LinkFunction::Kind::Identity && pre_ok && post_ok) {
    // y = |x| g + (eps + delta) with total noise variance nu^2.
    const double nu2 = model.pre_noise.variance() + model.post_noise.variance();
    p.mu = norm_x;
    p.sigma = std::sqrt(2.0 * norm_x * norm_x + nu2);
    p.eta = std::sqrt(norm_x * norm_x + nu2);
    // y is N(0, eta^2): E exp(y^2/psi^2) = (1 - 2 eta^2/psi^2)^(-1/2) = 2.
    p.psi = std::sqrt(8.0 / 3.0) * p.eta;
  } else if (f.kind() == LinkFunction::Kind::Sign && model.pre_noise.is_none() && model.post_noise.is_none()) {
    if (norm_x > 0.0) {
      // y <a, xbar> = |g|.
      p.mu = std::sqrt(2.0 / M_PI);
      p.sigma = std::sqrt(1.0 - 2.0 / M_PI);
      p.eta = 1.0;
      p.psi = 1.0 / std::sqrt(std::log(2.0));
    } else {
      p.psi = 0.0;
    }
  } else {
    return std::nullopt;
  }
  set_lambda(p, norm_x, false);
  p.c_f = compute_cf(f).value;
  return p;
}

ModelParams quadrature_params(const ObservationModel& model, double norm_x, const QuadratureOptions& opts) {
  const LinkFunction& f = model.link;
  ModelParams p = quadrature_core([&f](double u) { return f(u); }, f.discontinuous_at_zero(), model.pre_noise,
                                  model.post_noise, norm_x, opts);
  p.c_f = compute_cf(f, std::max(opts.order, 20)).value;
  return p;
}

ModelParams quadrature_params(const std::function<double(double)>& link, bool discontinuous_at_zero,
                              const NoiseDist& pre_noise, const NoiseDist& post_noise, double norm_x,
                              const QuadratureOptions& opts) {
  return quadrature_core(link, discontinuous_at_zero, pre_noise, post_noise, norm_x, opts);
}

ModelParams monte_carlo_params(const ObservationModel& model, double norm_x, std::int64_t n_samples,
                               std::uint64_t seed) {
  checked_norm(norm_x);
  if (n_samples < 1000) throw ContractViolation("monte_carlo_params: n_samples must be >= 1000");
  Rng rng(seed);
  const std::int64_t psi_samples = std::min<std::int64_t>(n_samples, 200'000);
  std::vector<double> y2_head;
  y2_head.reserve(static_cast<std::size_t>(psi_samples));
  // Shifted power sums keep the variance estimates well conditioned.
  long double s1 = 0, s2 = 0, s3 = 0, s4 = 0, q1 = 0, q2 = 0;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const double g = rng.normal();
    const double eps = draw_noise(model.pre_noise, rng);
    const double delta = draw_noise(model.post_noise, rng);
    const double y = model.link(norm_x * g + eps) + delta;
    const long double z = static_cast<long double>(y) * g;
    s1 += z;
    s2 += z * z;
    s3 += z * z * z;
    s4 += z * z * z * z;
    const long double yy = static_cast<long double>(y) * y;
    q1 += yy;
    q2 += yy * yy;
    if (k < psi_samples) y2_head.push_back(static_cast<double>(yy));
  }
  const long double N = static_cast<long double>(n_samples);
  const long double mean_z = s1 / N;
  const long double var_z = std::max<long double>(s2 / N - mean_z * mean_z, 0.0L);
  const long double m4c = s4 / N - 4 * mean_z * s3 / N + 6 * mean_z * mean_z * s2 / N - 3 * mean_z * mean_z * mean_z * mean_z;
  const long double mean_y2 = q1 / N;
  const long double var_y2 = std::max<long double>(q2 / N - mean_y2 * mean_y2, 0.0L);

  ModelParams p;
  p.method = "monte_carlo";
  p.mu = static_cast<double>(mean_z);
  p.sigma = std::sqrt(static_cast<double>(var_z * N / (N - 1)));
  p.eta = std::sqrt(static_cast<double>(mean_y2));
  ParamStdErr se;
  se.mu = std::sqrt(static_cast<double>(var_z / N));
  const double se_sigma2 = std::sqrt(std::max(0.0, static_cast<double>((m4c - var_z * var_z) / N)));
  se.sigma = p.sigma > 0.0 ? se_sigma2 / (2.0 * p.sigma) : std::sqrt(se_sigma2);
  const double se_eta2 = std::sqrt(static_cast<double>(var_y2 / N));
  se.eta = p.eta > 0.0 ? se_eta2 / (2.0 * p.eta) : std::sqrt(se_eta2);
  p.std_errors = se;
  set_lambda(p, norm_x, false);

  if (mean_y2 > 0.0L) {
    auto F = [&](double s) {
      const double inv = 1.0 / (s * s);
      long double acc = 0;
      for (double v : y2_head) acc += std::exp(std::min(v * inv, 700.0));
      return static_cast<double>(acc / static_cast<long double>(y2_head.size()));
    };
    p.psi = solve_psi(F, p.eta);
  } else {
    p.psi = 0.0;
  }
  try {
    p.c_f = compute_cf(model.link).value;
  } catch (const PreconditionError&) {
  }
  return p;
}

ModelParams auto_params(const ObservationModel& model, double norm_x, std::uint64_t seed, std::int64_t mc_samples) {
  if (auto cf = closed_form_params(model, norm_x)) return *cf;
  if (model.pre_noise.kind != NoiseDist::Kind::Logistic) return quadrature_params(model, norm_x);
  return monte_carlo_params(model, norm_x, mc_samples, seed);
}

double require_lambda(const ModelParams& p) {
  if (!p.lambda)
    throw DegenerateInputError("degenerate scale: mu = " + std::to_string(p.mu) + ", lambda is undefined");
  return *p.lambda;
}

CfConstant compute_cf(const std::function<double(double)>& f, bool discontinuous_at_zero, int order) {
  check_odd_nondecreasing(f);
  const double m4 = normal_expectation(
      [&](double u) {
        const double v = f(u);
        return v * v * v * v;
      },
      order, discontinuous_at_zero);
  const double p_outside = std::erfc(1.0 / std::sqrt(2.0));  // Pr(|g| >= 1)
  const double c48 = std::pow(48.0, 0.25);
  CfConstant c;
  c.fourth_moment_root = std::pow(m4, 0.25);
  c.value = c48 / p_outside * c.fourth_moment_root;
  c.printed = c48 * (1.0 - p_outside) * c.fourth_moment_root;
  c.literal = c48 * p_outside * c.fourth_moment_root;
  return c;
}

CfConstant compute_cf(const LinkFunction& f, int order) {
  return compute_cf([&f](double u) { return f(u); }, f.discontinuous_at_zero(), order);
}

}  // namespace geoest
