#include "geoest/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>

#include "geoest/errors.hpp"

namespace geoest {

namespace {

// Golub-Welsch: eigen-decomposition of the Jacobi matrix of the three-term
// recurrence; weights are mass * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mass) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("golub_welsch: tridiagonal eigensolve failed");
  QuadratureRule rule;
  const auto n = diag.size();
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = mass * v0 * v0;
  }
  return rule;
}

void check_order(int order) {
  if (order < 1 || order > 400) throw ContractViolation("quadrature order must lie in [1, 400]");
}

}  // namespace

QuadratureRule gauss_hermite(int order) {
  check_order(order);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd off(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  return golub_welsch(diag, off, 1.0);
}

QuadratureRule gauss_legendre(int order) {
  check_order(order);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd off(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(diag, off, 2.0);
}

QuadratureRule half_gauss_hermite(int order) {
  check_order(order);
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(order); it != cache.end()) return it->second;
  }

  // Discretized Stieltjes procedure: the half-normal weight is replaced by a
  // composite Gauss-Legendre discretization of [0, 40], which reproduces its
  // inner products of polynomials up to the degrees needed here to round-off.
  const QuadratureRule gl = gauss_legendre(32);
  const double upper = 40.0;
  const int panels = 320;
  const double h = upper / panels;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
  std::vector<double> xs, ws;
  xs.reserve(static_cast<std::size_t>(panels) * gl.nodes.size());
  ws.reserve(xs.capacity());
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double x = a + 0.5 * h * (gl.nodes[i] + 1.0);
      xs.push_back(x);
      ws.push_back(0.5 * h * gl.weights[i] * inv_sqrt_2pi * std::exp(-0.5 * x * x));
    }
  }
  const std::size_t npts = xs.size();
  Eigen::VectorXd alpha(order), beta(order);
  std::vector<double> p_prev(npts, 0.0), p_cur(npts, 1.0), p_next(npts);
  double norm_prev = 1.0;
  double norm_cur = 0.0;
  for (std::size_t j = 0; j < npts; ++j) norm_cur += ws[j];
  const double mass = norm_cur;
  for (int k = 0; k < order; ++k) {
    double num = 0.0;
    for (std::size_t j = 0; j < npts; ++j) num += ws[j] * xs[j] * p_cur[j] * p_cur[j];
    alpha(k) = num / norm_cur;
    beta(k) = k == 0 ? mass : norm_cur / norm_prev;
    double norm_next = 0.0;
    for (std::size_t j = 0; j < npts; ++j) {
      p_next[j] = (xs[j] - alpha(k)) * p_cur[j] - (k == 0 ? 0.0 : beta(k)) * p_prev[j];
      norm_next += ws[j] * p_next[j] * p_next[j];
    }
    // Rescale the monic polynomials to avoid overflow; the recurrence
    // coefficients only depend on ratios.
    const double scale = 1.0 / std::sqrt(norm_next);
    for (std::size_t j = 0; j < npts; ++j) {
      p_prev[j] = p_cur[j] * scale;
      p_cur[j] = p_next[j] * scale;
    }
    norm_prev = norm_cur * scale * scale;
    norm_cur = 1.0;
  }
  Eigen::VectorXd off(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) off(k - 1) = std::sqrt(beta(k));
  QuadratureRule rule = golub_welsch(alpha, off, mass);
  std::lock_guard lock(mu);
  cache.emplace(order, rule);
  return rule;
}

double normal_expectation(const std::function<double(double)>& h, int order, bool split_at_zero) {
  double acc = 0.0;
  if (split_at_zero) {
    const QuadratureRule rule = half_gauss_hermite(order);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * (h(rule.nodes[i]) + h(-rule.nodes[i]));
  } else {
    const QuadratureRule rule = gauss_hermite(order);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * h(rule.nodes[i]);
  }
  return acc;
}

double truncated_normal_expectation(const std::function<double(double)>& h, double half_width,
                                    int panels_per_side, int order) {
  const QuadratureRule gl = gauss_legendre(order);
  const double width = half_width / panels_per_side;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
  double acc = 0.0;
  for (int p = 0; p < panels_per_side; ++p) {
    const double a = p * width;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double x = a + 0.5 * width * (gl.nodes[i] + 1.0);
      const double w = 0.5 * width * gl.weights[i] * inv_sqrt_2pi * std::exp(-0.5 * x * x);
      acc += w * (h(x) + h(-x));
    }
  }
  return acc;
}

}  // namespace geoest
