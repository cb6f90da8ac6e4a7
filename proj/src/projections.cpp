#include "geoest/projections.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "geoest/errors.hpp"

namespace geoest {

Vector hard_threshold(const Vector& v, Eigen::Index s) {
  const Eigen::Index n = v.size();
  if (s < 0 || s > n) throw ContractViolation("hard_threshold: need 0 <= s <= n");
  Vector out = Vector::Zero(n);
  if (s == 0) return out;
  if (s == n) return v;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  auto by_magnitude = [&](Eigen::Index a, Eigen::Index b) {
    const double fa = std::fabs(v(a)), fb = std::fabs(v(b));
    return fa > fb || (fa == fb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + (s - 1), idx.end(), by_magnitude);
  for (Eigen::Index k = 0; k < s; ++k) out(idx[k]) = v(idx[k]);
  return out;
}

Matrix svd_hard_threshold(const Matrix& m, Eigen::Index r) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  if (r < 1 || r > k) throw ContractViolation("svd_hard_threshold: need 1 <= r <= min(d1, d2)");
  if (!m.allFinite()) throw NumericalError("svd_hard_threshold: input has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericalError("svd_hard_threshold: SVD of " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " matrix did not converge (Eigen info code " +
                         std::to_string(static_cast<int>(svd.info())) + ")");
  const Vector& sv = svd.singularValues();
  Matrix out = svd.matrixU().leftCols(r) * sv.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
  if (!out.allFinite()) throw NumericalError("svd_hard_threshold: non-finite reconstruction");
  return out;
}

Signal svd_hard_threshold(const Signal& vmat, Eigen::Index r) {
  if (!vmat.is_matrix()) throw ContractViolation("svd_hard_threshold: signal has no matrix shape");
  return Signal::from_matrix(svd_hard_threshold(Matrix(vmat.as_matrix()), r));
}

double l1_projection_threshold(const Vector& v, double radius) {
  std::vector<double> mag(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) mag[static_cast<std::size_t>(i)] = std::fabs(v(i));
  std::sort(mag.begin(), mag.end(), std::greater<>());
  // theta = (sum of top k magnitudes - radius) / k for the largest k with mag[k-1] > theta.
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    cumsum += mag[k];
    const double candidate = (cumsum - radius) / static_cast<double>(k + 1);
    if (mag[k] > candidate) theta = candidate;
    else break;
  }
  return std::max(theta, 0.0);
}

Vector project_l1_ball(const Vector& v, double radius) {
  if (!(radius > 0.0)) throw ContractViolation("project_l1_ball: radius must be > 0");
  if (v.lpNorm<1>() <= radius) return v;
  const double theta = l1_projection_threshold(v, radius);
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::fabs(v(i)) - theta;
    out(i) = a > 0.0 ? std::copysign(a, v(i)) : 0.0;
  }
  return out;
}

Vector normalize_to_sphere(const Vector& v) {
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw DegenerateInputError("normalize_to_sphere: zero vector has no direction");
  return v / nrm;
}

Signal project(const FeasibleSet& set, const Signal& v) {
  if (v.dim() != set.dim())
    throw ContractViolation("project: signal dimension " + std::to_string(v.dim()) +
                            " does not match set dimension " + std::to_string(set.dim()));
  auto with_shape = [&](Vector out) {
    return v.shape() ? Signal(std::move(out), *v.shape()) : Signal(std::move(out));
  };
  return std::visit(
      [&](const auto& k) -> Signal {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparseCone>) {
          return with_shape(hard_threshold(v.values(), k.s));
        } else if constexpr (std::is_same_v<T, LowRankCone>) {
          Eigen::Map<const Matrix> m(v.values().data(), k.d1, k.d2);
          Matrix p = svd_hard_threshold(Matrix(m), k.r);
          return Signal(Eigen::Map<const Vector>(p.data(), p.size()), MatrixShape{k.d1, k.d2});
        } else if constexpr (std::is_same_v<T, L1Ball>) {
          return with_shape(project_l1_ball(v.values(), k.radius));
        } else if constexpr (std::is_same_v<T, EuclideanBall>) {
          const double nrm = v.norm();
          if (nrm <= k.radius) return v;
          return with_shape(v.values() * (k.radius / nrm));
        } else {
          return v;
        }
      },
      set.variant());
}

}  // namespace geoest
