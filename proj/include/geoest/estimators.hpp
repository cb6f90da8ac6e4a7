#pragma once

#include "geoest/sampler.hpp"
#include "geoest/types.hpp"

namespace geoest {

/// (1/m) A^T y. Unbiased for mu * xbar.
Signal linear_estimator(const MeasurementBatch& batch, const Vector& y);

/// P_K applied to the linear estimator.
Signal projected_estimator(const MeasurementBatch& batch, const Vector& y, const FeasibleSet& set);

/// Estimate of x itself. Cones: lambda * P_K(xlin). Balls: P_{|lambda| K}(lambda * xlin).
Signal rescaled_estimator(const MeasurementBatch& batch, const Vector& y, const FeasibleSet& set, double lambda);

/// P_K(xlin) / ||P_K(xlin)||; DegenerateInputError when the projection is zero.
Signal direction_estimator(const MeasurementBatch& batch, const Vector& y, const FeasibleSet& set);

/// Rank-r truncation of observed / p. `observed` is zero off the mask.
Signal completion_estimator(const Matrix& observed, const CompletionMask& mask, Eigen::Index r);

}  // namespace geoest
