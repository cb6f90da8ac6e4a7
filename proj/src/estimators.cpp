#include "geoest/estimators.hpp"

#include <cmath>

#include "geoest/errors.hpp"
#include "geoest/projections.hpp"

namespace geoest {

namespace {

Signal shaped_like(const FeasibleSet& set, Vector v) {
  if (auto* k = std::get_if<LowRankCone>(&set.variant())) return Signal(std::move(v), MatrixShape{k->d1, k->d2});
  return Signal(std::move(v));
}

}  // namespace

Signal linear_estimator(const MeasurementBatch& batch, const Vector& y) {
  if (y.size() != batch.m())
    throw ContractViolation("linear_estimator: y has length " + std::to_string(y.size()) + ", batch has m = " +
                            std::to_string(batch.m()));
  if (batch.m() < 1) throw ContractViolation("linear_estimator: empty batch");
  Vector x = batch.a.transpose() * y;
  x /= static_cast<double>(batch.m());
  return Signal(std::move(x));
}

Signal projected_estimator(const MeasurementBatch& batch, const Vector& y, const FeasibleSet& set) {
  if (set.dim() != batch.n())
    throw ContractViolation("projected_estimator: set dimension does not match measurement dimension");
  return project(set, shaped_like(set, linear_estimator(batch, y).values()));
}

Signal rescaled_estimator(const MeasurementBatch& batch, const Vector& y, const FeasibleSet& set, double lambda) {
  if (lambda == 0.0) throw DegenerateInputError("rescaled_estimator: lambda is 0");
  if (!std::isfinite(lambda)) throw ContractViolation("rescaled_estimator: lambda must be finite");
  if (set.is_cone()) {
    const Signal p = projected_estimator(batch, y, set);
    return shaped_like(set, lambda * p.values());
  }
  if (set.dim() != batch.n())
    throw ContractViolation("rescaled_estimator: set dimension does not match measurement dimension");
  const Vector xl = lambda * linear_estimator(batch, y).values();
  return project(set.scaled(std::fabs(lambda)), shaped_like(set, xl));
}

Signal direction_estimator(const MeasurementBatch& batch, const Vector& y, const FeasibleSet& set) {
  const Signal p = projected_estimator(batch, y, set);
  return shaped_like(set, normalize_to_sphere(p.values()));
}

Signal completion_estimator(const Matrix& observed, const CompletionMask& mask, Eigen::Index r) {
  if (r < 1) throw PreconditionError("completion_estimator: rank must be >= 1");
  if (!(mask.p > 0.0)) throw PreconditionError("completion_estimator: sampling probability must be > 0");
  if (observed.rows() != mask.d || observed.cols() != mask.d)
    throw ContractViolation("completion_estimator: observed matrix does not match mask dimension");
  if (r > mask.d) throw PreconditionError("completion_estimator: rank exceeds dimension");
  return Signal::from_matrix(svd_hard_threshold(Matrix(observed / mask.p), r));
}

}  // namespace geoest
