#pragma once

#include "geoest/types.hpp"

// Slow reference solutions, independent of the production routines. Used by
// the acceptance suite and the tests.
namespace geoest::oracle {

/// l1-ball projection by enumerating supports and checking the KKT conditions
/// (soft threshold theta >= 0 equalising the l1 norm, off-support entries
/// below theta). Exponential in n; intended for n <= 12.
Vector l1_projection_kkt(const Vector& v, double radius);

/// Best s-sparse approximation by trying every support of size s.
Vector best_sparse_by_enumeration(const Vector& v, Eigen::Index s);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
Vector jacobi_eigenvalues(Matrix a, double tol = 1e-15, int max_sweeps = 100);

/// sqrt(sum of the squared singular values beyond r), from the eigenvalues of
/// A^T A (or A A^T, whichever is smaller).
double eckart_young_error(const Matrix& a, Eigen::Index r);

/// sup <g, u> over ||u||_1 <= L, ||u||_2 <= t by enumerating the support and
/// sign pattern of the maximiser. Exponential in n; intended for n <= 6.
double l1_l2_support_enumeration(const Vector& g, double l1_radius, double t);

/// E ||g||_2 for g ~ N(0, I_n): sqrt(2) Gamma((n+1)/2) / Gamma(n/2).
double expected_gaussian_norm(Eigen::Index n);

}  // namespace geoest::oracle
