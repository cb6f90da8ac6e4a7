#include <doctest.h>

#include <cmath>
#include <set>

#include "geoest/errors.hpp"
#include "geoest/rng.hpp"
#include "geoest/sampler.hpp"

using namespace geoest;

TEST_CASE("uniforms lie strictly inside (0, 1) and streams are reproducible") {
  Rng a(5), b(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
  }
}

TEST_CASE("normal quantile inverts the normal cdf") {
  for (double p : {1e-300, 1e-12, 0.001, 0.1, 0.3, 0.5, 0.75, 0.975, 1 - 1e-10}) {
    const double x = normal_quantile(p);
    CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.5) == 0.0);
}

TEST_CASE("normal draws have unit variance and logistic draws the right variance") {
  Rng rng(6);
  const int n = 200000;
  double s1 = 0, s2 = 0, l2 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.normal();
    s1 += g;
    s2 += g * g;
    const double l = rng.logistic(1.0);
    l2 += l * l;
  }
  CHECK(std::fabs(s1 / n) <= 4.0 / std::sqrt(n));
  CHECK(std::fabs(s2 / n - 1.0) <= 4.0 * std::sqrt(2.0 / n));
  const double logistic_var = M_PI * M_PI / 3.0;
  CHECK(std::fabs(l2 / n - logistic_var) <= 0.05 * logistic_var);
}

TEST_CASE("below is unbiased over a small range") {
  Rng rng(7);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) counts[rng.below(6)]++;
  for (int c : counts) CHECK(std::abs(c - 10000) <= 4 * 92);  // sd = sqrt(60000 * 1/6 * 5/6)
}

TEST_CASE("derived seeds do not collide across trials") {
  std::set<std::vector<std::uint64_t>> heads;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    Rng rng(derive_seed(42, t));
    heads.insert({rng.next_u64(), rng.next_u64(), rng.next_u64(), rng.next_u64()});
  }
  CHECK(heads.size() == 10000);
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("measurement batches") {
  const auto a = gen_measurements(3, 2, 7), b = gen_measurements(3, 2, 7);
  CHECK(a.a == b.a);
  CHECK(a.m() == 2);
  CHECK(a.n() == 3);

  const auto big = gen_measurements(100, 10000, 1);
  const Vector means = big.a.colwise().mean();
  // 10000 * sum of squared column means is chi-square with 100 degrees of freedom.
  const double chi2 = 10000.0 * means.squaredNorm();
  CHECK(chi2 >= 100.0 - 4.0 * std::sqrt(200.0));
  CHECK(chi2 <= 100.0 + 4.0 * std::sqrt(200.0));
  CHECK(means.cwiseAbs().maxCoeff() <= 5.0 / std::sqrt(10000.0));

  const auto col = gen_measurements(1, 100000, 2);
  const double mean = col.a.mean();
  const double var = (col.a.array() - mean).square().sum() / (100000 - 1);
  CHECK(var >= 0.96);
  CHECK(var <= 1.04);
}

TEST_CASE("observations") {
  const auto batch = gen_measurements(4, 50, 3);
  Vector e1 = Vector::Zero(4);
  e1(0) = 1.0;
  ObservationModel linear;
  const Vector y = gen_observations(batch, Signal(e1), linear, 9);
  CHECK(y == batch.a.col(0));

  ObservationModel onebit;
  onebit.link = LinkFunction::sign();
  const Vector s = gen_observations(batch, Signal(e1), onebit, 9);
  for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(std::fabs(s(i)) == 1.0);

  ObservationModel noisy;
  noisy.pre_noise = NoiseDist::gaussian(1.0);
  const auto tall = gen_measurements(2, 100000, 4);
  const Vector yn = gen_observations(tall, Signal(Vector::Zero(2)), noisy, 5);
  const double var = (yn.array() - yn.mean()).square().sum() / (yn.size() - 1);
  CHECK(std::fabs(var - 1.0) <= 0.1);

  CHECK_THROWS_AS(gen_observations(batch, Signal(Vector::Zero(3)), linear, 1), ContractViolation);
}

TEST_CASE("observations depend on a_i only through the inner product") {
  const auto batch = gen_measurements(6, 30, 8);
  Vector x(6);
  x << 1, -2, 0.5, 0, 3, 1;
  ObservationModel m;
  m.link = LinkFunction::odd_monomial(3);
  m.pre_noise = NoiseDist::gaussian(0.3);
  m.post_noise = NoiseDist::logistic(0.2);
  const Vector inner = batch.a * x;
  CHECK(gen_observations(batch, Signal(x), m, 77) == observe_inner_products(inner, m, 77));
}

TEST_CASE("completion masks and observations") {
  const auto full = gen_mask(10, 1.0, 1);
  CHECK(full.count() == 100);
  const auto half = gen_mask(100, 0.5, 3);
  CHECK(half.count() >= 4800);
  CHECK(half.count() <= 5200);
  CHECK(gen_mask(100, 0.5, 3).included == half.included);
  CHECK_THROWS_AS(gen_mask(10, 0.0, 1), ContractViolation);

  Matrix x = Matrix::Random(6, 6);
  const Signal xs = Signal::from_matrix(x);
  CHECK(observe_completion(xs, gen_mask(6, 1.0, 2), 0.0, 3) == x);
  const auto mask = gen_mask(6, 0.4, 5);
  const Matrix obs = observe_completion(xs, mask, 0.0, 3);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) CHECK(obs(i, j) == (mask.included(i, j) ? x(i, j) : 0.0));

  const Matrix noise = observe_completion(Signal::from_matrix(Matrix::Zero(100, 100)), gen_mask(100, 1.0, 1), 1.0, 4);
  CHECK(std::fabs(noise.squaredNorm() / 10000.0 - 1.0) <= 0.1);
}
