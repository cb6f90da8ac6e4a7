#include "geoest/bench/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "geoest/errors.hpp"

namespace geoest::oracle {

Vector l1_projection_kkt(const Vector& v, double radius) {
  const Eigen::Index n = v.size();
  if (n > 20) throw ContractViolation("l1_projection_kkt: n too large for enumeration");
  if (v.lpNorm<1>() <= radius) return v;
  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double sum = 0.0;
    int k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask >> i & 1) {
        sum += std::fabs(v(i));
        ++k;
      }
    const double theta = (sum - radius) / k;
    if (theta < 0.0) continue;
    bool ok = true;
    Vector z = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n && ok; ++i) {
      const double a = std::fabs(v(i));
      if (mask >> i & 1) {
        if (a < theta) ok = false;
        else z(i) = (v(i) > 0 ? 1.0 : -1.0) * (a - theta);
      } else if (a > theta) {
        ok = false;
      }
    }
    if (!ok) continue;
    const double dist = (v - z).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = z;
    }
  }
  if (best.size() == 0) throw NumericalError("l1_projection_kkt: no support satisfied the KKT conditions");
  return best;
}

Vector best_sparse_by_enumeration(const Vector& v, Eigen::Index s) {
  const Eigen::Index n = v.size();
  if (n > 20) throw ContractViolation("best_sparse_by_enumeration: n too large");
  if (s < 0 || s > n) throw ContractViolation("best_sparse_by_enumeration: need 0 <= s <= n");
  Vector best = Vector::Zero(n);
  double best_dist = v.squaredNorm();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (std::popcount(mask) != s) continue;
    Vector z = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask >> i & 1) z(i) = v(i);
    const double dist = (v - z).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = z;
    }
  }
  return best;
}

Vector jacobi_eigenvalues(Matrix a, double tol, int max_sweeps) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw ContractViolation("jacobi_eigenvalues: matrix must be square");
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= tol * tol * std::max(a.squaredNorm(), std::numeric_limits<double>::min())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector ev = a.diagonal();
  std::sort(ev.data(), ev.data() + n, std::greater<>());
  return ev;
}

double eckart_young_error(const Matrix& a, Eigen::Index r) {
  const Matrix gram = a.rows() >= a.cols() ? Matrix(a.transpose() * a) : Matrix(a * a.transpose());
  const Vector ev = jacobi_eigenvalues(gram);
  double tail = 0.0;
  for (Eigen::Index i = r; i < ev.size(); ++i) tail += std::max(ev(i), 0.0);
  return std::sqrt(tail);
}

double l1_l2_support_enumeration(const Vector& g, double l1_radius, double t) {
  // The maximiser is either t g / ||g|| (l1 slack), a multiple of a signed vertex
  // (l2 slack), or lies on both boundaries, where on its support S with signs
  // sign(g) it has the form a sign(g_S) + b g_S. Solve for (a, b) on each S.
  const Eigen::Index n = g.size();
  if (n > 12) throw ContractViolation("l1_l2_support_enumeration: n too large");
  double best = 0.0;
  auto feasible = [&](const Vector& u) { return u.lpNorm<1>() <= l1_radius * (1 + 1e-12) && u.norm() <= t * (1 + 1e-12); };
  auto consider = [&](const Vector& u) {
    if (feasible(u)) best = std::max(best, g.dot(u));
  };
  if (g.norm() > 0.0) consider(t * g / g.norm());
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector u = Vector::Zero(n);
    u(i) = (g(i) >= 0 ? 1.0 : -1.0) * std::min(l1_radius, t);
    consider(u);
  }
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const int k = std::popcount(mask);
    double s1 = 0.0, s2 = 0.0;
    Vector sg = Vector::Zero(n), gs = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask >> i & 1) {
        sg(i) = g(i) >= 0 ? 1.0 : -1.0;
        gs(i) = g(i);
        s1 += std::fabs(g(i));
        s2 += g(i) * g(i);
      }
    // u = a sg + b gs:  ||u||_1 = a k + b s1 = L,  ||u||_2^2 = a^2 k + 2 a b s1 + b^2 s2 = t^2
    // Substituting a = (L - b s1) / k leaves b^2 (s2 - s1^2 / k) = t^2 - L^2 / k.
    const double L = l1_radius;
    const double qa = s2 - s1 * s1 / k;
    if (qa <= 1e-14) continue;
    const double disc = (t * t - L * L / k) / qa;
    if (disc < 0.0) continue;
    for (double b : {std::sqrt(disc), -std::sqrt(disc)}) {
      const double a = (L - b * s1) / k;
      const Vector u = a * sg + b * gs;
      bool signs_ok = true;
      for (Eigen::Index i = 0; i < n; ++i)
        if ((mask >> i & 1) && u(i) * sg(i) < -1e-12) signs_ok = false;
      if (signs_ok) consider(u);
    }
  }
  return best;
}

double expected_gaussian_norm(Eigen::Index n) {
  const double nd = static_cast<double>(n);
  return std::sqrt(2.0) * std::exp(std::lgamma((nd + 1.0) / 2.0) - std::lgamma(nd / 2.0));
}

}  // namespace geoest::oracle
