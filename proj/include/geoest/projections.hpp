#pragma once

#include "geoest/types.hpp"

namespace geoest {

/// Metric projection onto `set`: a minimizer of ||v - z||_2 over z in the set.
Signal project(const FeasibleSet& set, const Signal& v);

/// Keep the s largest-magnitude entries in place, zero the rest. Ties at the
/// cutoff keep the lower index.
Vector hard_threshold(const Vector& v, Eigen::Index s);

/// Best rank-r approximation in Frobenius norm (truncated SVD).
Signal svd_hard_threshold(const Signal& vmat, Eigen::Index r);
Matrix svd_hard_threshold(const Matrix& m, Eigen::Index r);

/// Euclidean projection onto the l1 ball of the given radius (sort-and-shift).
Vector project_l1_ball(const Vector& v, double radius);

/// Soft threshold level theta with ||soft(v, theta)||_1 == radius, assuming
/// ||v||_1 > radius.
double l1_projection_threshold(const Vector& v, double radius);

/// v / ||v||_2; DegenerateInputError for the zero vector.
Vector normalize_to_sphere(const Vector& v);

}  // namespace geoest
