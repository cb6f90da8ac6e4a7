#include "geoest/sampler.hpp"

#include <cmath>
#include <limits>

#include "geoest/errors.hpp"
#include "geoest/rng.hpp"

namespace geoest {

MeasurementBatch gen_measurements(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ContractViolation("gen_measurements: n and m must be >= 1");
  constexpr auto kMaxEntries = std::numeric_limits<Eigen::Index>::max() / static_cast<Eigen::Index>(sizeof(double));
  if (n > kMaxEntries / m)
    throw ResourceError("gen_measurements: n*m = " + std::to_string(n) + "*" + std::to_string(m) +
                        " exceeds addressable size");
  MeasurementBatch batch;
  batch.seed = seed;
  batch.a.resize(m, n);
  Rng rng(seed);
  double* p = batch.a.data();
  const Eigen::Index total = n * m;
  for (Eigen::Index k = 0; k < total; ++k) p[k] = rng.normal();
  return batch;
}

double draw_noise(const NoiseDist& dist, Rng& rng) {
  switch (dist.kind) {
    case NoiseDist::Kind::None:
      return 0.0;
    case NoiseDist::Kind::Gaussian:
      return dist.scale * rng.normal();
    case NoiseDist::Kind::Logistic:
      return rng.logistic(dist.scale);
  }
  return 0.0;
}

Vector observe_inner_products(const Vector& inner, const ObservationModel& model, std::uint64_t seed) {
  Rng rng(seed);
  Vector y(inner.size());
  for (Eigen::Index i = 0; i < inner.size(); ++i) {
    const double eps = draw_noise(model.pre_noise, rng);
    const double delta = draw_noise(model.post_noise, rng);
    y(i) = model.link(inner(i) + eps) + delta;
  }
  return y;
}

Vector gen_observations(const MeasurementBatch& batch, const Signal& x, const ObservationModel& model,
                       std::uint64_t seed) {
  if (x.dim() != batch.n())
    throw ContractViolation("gen_observations: signal dimension " + std::to_string(x.dim()) +
                            " does not match measurement dimension " + std::to_string(batch.n()));
  const Vector inner = batch.a * x.values();
  return observe_inner_products(inner, model, seed);
}

CompletionMask gen_mask(Eigen::Index d, double p, std::uint64_t seed) {
  if (d < 1) throw ContractViolation("gen_mask: d must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw ContractViolation("gen_mask: p must lie in (0, 1]");
  CompletionMask mask;
  mask.d = d;
  mask.p = p;
  mask.seed = seed;
  mask.included.resize(d, d);
  Rng rng(seed);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) mask.included(i, j) = rng.uniform() < p;
  return mask;
}

Matrix observe_completion(const Signal& xmat, const CompletionMask& mask, double noise_nu, std::uint64_t seed) {
  if (!xmat.is_matrix() || xmat.shape()->rows != mask.d || xmat.shape()->cols != mask.d)
    throw ContractViolation("observe_completion: signal must be a " + std::to_string(mask.d) + "x" +
                            std::to_string(mask.d) + " matrix");
  if (!(noise_nu >= 0.0)) throw ContractViolation("observe_completion: noise_nu must be >= 0");
  const auto x = xmat.as_matrix();
  Matrix out = Matrix::Zero(mask.d, mask.d);
  Rng rng(seed);
  for (Eigen::Index j = 0; j < mask.d; ++j)
    for (Eigen::Index i = 0; i < mask.d; ++i)
      if (mask.included(i, j)) out(i, j) = x(i, j) + (noise_nu > 0.0 ? noise_nu * rng.normal() : 0.0);
  return out;
}

}  // namespace geoest
