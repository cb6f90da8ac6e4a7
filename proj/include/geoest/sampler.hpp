#pragma once

#include <cstdint>

#include "geoest/types.hpp"

namespace geoest {

class Rng;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// m x n matrix whose rows are the measurement vectors a_i^T.
struct MeasurementBatch {
  RowMatrix a;
  std::uint64_t seed = 0;

  Eigen::Index m() const { return a.rows(); }
  Eigen::Index n() const { return a.cols(); }
};

/// Bernoulli(p) entry mask for d x d matrix completion.
struct CompletionMask {
  Eigen::Index d = 0;
  BoolMatrix included;
  double p = 1.0;
  std::uint64_t seed = 0;

  Eigen::Index count() const { return included.count(); }
};

/// Rows i.i.d. N(0, I_n); row i is the i-th block of n draws of the stream.
MeasurementBatch gen_measurements(Eigen::Index n, Eigen::Index m, std::uint64_t seed);

/// y_i = f(<a_i, x> + eps_i) + delta_i. The noise stream only ever sees the
/// scalar <a_i, x>; eps_i and delta_i are drawn in that order for each i.
Vector gen_observations(const MeasurementBatch& batch, const Signal& x, const ObservationModel& model,
                       std::uint64_t seed);

/// Same as gen_observations but from precomputed inner products <a_i, x>.
Vector observe_inner_products(const Vector& inner, const ObservationModel& model, std::uint64_t seed);

CompletionMask gen_mask(Eigen::Index d, double p, std::uint64_t seed);

/// Entry (i, j) is X_ij + N(0, nu^2) on the mask and 0 elsewhere.
Matrix observe_completion(const Signal& xmat, const CompletionMask& mask, double noise_nu, std::uint64_t seed);

/// Draw one value of `dist` (0 for None).
double draw_noise(const NoiseDist& dist, Rng& rng);

}  // namespace geoest
