#include <doctest.h>

#include <cmath>

#include "geoest/errors.hpp"
#include "geoest/estimators.hpp"
#include "geoest/model_params.hpp"
#include "geoest/projections.hpp"
#include "geoest/rng.hpp"
#include "geoest/sampler.hpp"

using namespace geoest;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

MeasurementBatch batch_of(Matrix a) {
  MeasurementBatch b;
  b.a = a;
  return b;
}

Vector unit_direction(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v / v.norm();
}

}  // namespace

TEST_CASE("linear estimator examples") {
  Matrix a(1, 2);
  a << 1, 0;
  CHECK(linear_estimator(batch_of(a), vec({2})).values() == vec({2, 0}));
  const auto b = gen_measurements(5, 8, 1);
  CHECK(linear_estimator(b, Vector::Zero(8)).values() == Vector::Zero(5));
  CHECK_THROWS_AS(linear_estimator(b, Vector::Zero(7)), ContractViolation);
}

TEST_CASE("linear estimator is unbiased for mu xbar") {
  const Eigen::Index n = 50, m = 100;
  const Vector xbar = unit_direction(n, 2);
  const ObservationModel model;
  Vector sum = Vector::Zero(n), sumsq = Vector::Zero(n);
  const int trials = 2000;
  for (int k = 0; k < trials; ++k) {
    const auto b = gen_measurements(n, m, derive_seed(3, k, 1));
    const Vector y = gen_observations(b, Signal(xbar), model, derive_seed(3, k, 2));
    const Vector est = linear_estimator(b, y).values();
    sum += est;
    sumsq += est.cwiseProduct(est);
  }
  const Vector mean = sum / trials;
  const Vector var = sumsq / trials - mean.cwiseProduct(mean);
  for (Eigen::Index i = 0; i < n; ++i) CHECK(std::fabs(mean(i) - xbar(i)) <= 4.0 * std::sqrt(var(i) / trials));
}

TEST_CASE("linear estimator mean squared error identity") {
  const Eigen::Index n = 30, m = 60;
  const std::vector<ObservationModel> models = {
      {LinkFunction::identity(), {}, {}},
      {LinkFunction::sign(), {}, {}},
      {LinkFunction::odd_monomial(3), NoiseDist::gaussian(0.3), NoiseDist::gaussian(0.5)}};
  for (const auto& model : models) {
    const double nx = 1.5;
    const auto p = quadrature_params(model, nx);
    const double expect = (p.sigma * p.sigma + p.eta * p.eta * (n - 1)) / m;
    const Vector x = nx * unit_direction(n, 4);
    const Vector target = p.mu * x / nx;
    const int trials = 3000;
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < trials; ++k) {
      const auto b = gen_measurements(n, m, derive_seed(5, k, 1));
      const Vector y = gen_observations(b, Signal(x), model, derive_seed(5, k, 2));
      const double e = (linear_estimator(b, y).values() - target).squaredNorm();
      s += e;
      s2 += e * e;
    }
    const double mean = s / trials;
    const double se = std::sqrt((s2 / trials - mean * mean) / trials);
    CAPTURE(model.link.name());
    CHECK(std::fabs(mean - expect) <= 4.0 * se);
  }
}

TEST_CASE("projected estimator") {
  const auto b = gen_measurements(20, 15, 6);
  Rng rng(7);
  Vector y(15);
  for (Eigen::Index i = 0; i < 15; ++i) y(i) = rng.normal();
  const Signal lin = linear_estimator(b, y);
  CHECK(projected_estimator(b, y, FeasibleSet::full_space(20)).values() == lin.values());
  const Signal sp = projected_estimator(b, y, FeasibleSet::sparse_cone(20, 3));
  CHECK((sp.values().array() != 0.0).count() <= 3);
  // Already in the set: unchanged.
  const auto ball = FeasibleSet::euclidean_ball(20, lin.norm() * 2.0);
  CHECK(projected_estimator(b, y, ball).values() == lin.values());
}

TEST_CASE("rescaled estimator") {
  const auto b = gen_measurements(20, 15, 8);
  Rng rng(9);
  Vector y(15);
  for (Eigen::Index i = 0; i < 15; ++i) y(i) = rng.normal();
  const auto cone = FeasibleSet::sparse_cone(20, 4);
  const Vector p = projected_estimator(b, y, cone).values();
  CHECK(rescaled_estimator(b, y, cone, 1.0).values() == p);
  CHECK((rescaled_estimator(b, y, cone, 2.0).values() - 2.0 * p).norm() <= 1e-14);
  const auto l1 = FeasibleSet::l1_ball(20, 0.2);
  CHECK(rescaled_estimator(b, y, l1, 1.0).values() == projected_estimator(b, y, l1).values());
  const Vector r = rescaled_estimator(b, y, l1, 3.0).values();
  CHECK(r.lpNorm<1>() <= 0.6 + 1e-12);
  CHECK((r - project_l1_ball(3.0 * linear_estimator(b, y).values(), 0.6)).norm() <= 1e-14);
  CHECK_THROWS_AS(rescaled_estimator(b, y, cone, 0.0), DegenerateInputError);

  const auto sg = closed_form_params({LinkFunction::sign(), {}, {}}, 1.0).value();
  CHECK(sg.lambda.value() == doctest::Approx(1.0 / std::sqrt(2.0 / M_PI)));
}

TEST_CASE("direction estimator") {
  const auto b = gen_measurements(20, 15, 10);
  Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    Vector y(15);
    for (Eigen::Index i = 0; i < 15; ++i) y(i) = rng.normal();
    const Signal d = direction_estimator(b, y, FeasibleSet::sparse_cone(20, 3));
    CHECK(std::fabs(d.norm() - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(direction_estimator(b, Vector::Zero(15), FeasibleSet::sparse_cone(20, 3)), DegenerateInputError);
  // A unit projection is left unchanged.
  Matrix a = Matrix::Identity(2, 2);
  const Signal u = direction_estimator(batch_of(a), vec({1.2, 1.6}), FeasibleSet::full_space(2));
  CHECK((u.values() - vec({0.6, 0.8})).norm() <= 1e-15);
}

TEST_CASE("matrix completion") {
  const Eigen::Index d = 12;
  Rng rng(12);
  Matrix u(d, 2), v(d, 2);
  for (Eigen::Index i = 0; i < d; ++i)
    for (int j = 0; j < 2; ++j) u(i, j) = rng.normal(), v(i, j) = rng.normal();
  const Matrix x = u * v.transpose();
  const auto full = gen_mask(d, 1.0, 13);
  CHECK(full.count() == d * d);
  const Matrix obs = observe_completion(Signal::from_matrix(x), full, 0.0, 14);
  const Signal est = completion_estimator(obs, full, 2);
  CHECK((est.as_matrix() - x).norm() <= 1e-9 * x.norm());
  CHECK_THROWS_AS(completion_estimator(obs, full, 0), PreconditionError);

  const auto half = gen_mask(d, 0.5, 15);
  const Matrix obs_half = observe_completion(Signal::from_matrix(x), half, 0.0, 16);
  const Signal est_half = completion_estimator(obs_half, half, 2);
  CHECK((est_half.as_matrix() - svd_hard_threshold(Matrix(obs_half / 0.5), 2)).norm() <= 1e-12);
}
