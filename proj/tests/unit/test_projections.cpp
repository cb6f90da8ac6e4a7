#include <doctest.h>

#include <cmath>

#include "geoest/bench/oracles.hpp"
#include "geoest/errors.hpp"
#include "geoest/projections.hpp"
#include "geoest/rng.hpp"

using namespace geoest;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Vector gaussian(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
  return v;
}

Signal shaped(const FeasibleSet& set, Vector v) {
  if (auto* k = std::get_if<LowRankCone>(&set.variant())) return Signal(std::move(v), MatrixShape{k->d1, k->d2});
  return Signal(std::move(v));
}

std::vector<FeasibleSet> sets() {
  return {FeasibleSet::sparse_cone(10, 3), FeasibleSet::low_rank_cone(5, 4, 2), FeasibleSet::l1_ball(10, 1.3),
          FeasibleSet::euclidean_ball(10, 0.8), FeasibleSet::full_space(10)};
}

}  // namespace

TEST_CASE("projection examples") {
  const Vector v = vec({0.3, -7.0, 2.0});
  CHECK(project(FeasibleSet::full_space(3), Signal(v)).values() == v);
  const Vector r = project(FeasibleSet::euclidean_ball(2, 1.0), Signal(vec({3, 4}))).values();
  CHECK(r(0) == doctest::Approx(0.6));
  CHECK(r(1) == doctest::Approx(0.8));
  CHECK_THROWS_AS(project(FeasibleSet::full_space(2), Signal(v)), ContractViolation);
}

TEST_CASE("hard threshold examples and ties") {
  CHECK(hard_threshold(vec({3, -1, 2, 0.5}), 2) == vec({3, 0, 2, 0}));
  CHECK(hard_threshold(vec({3, -1, 2}), 0) == Vector::Zero(3));
  CHECK(hard_threshold(vec({1, -1, 1, 1}), 2) == vec({1, -1, 0, 0}));  // ties keep the lower index
}

TEST_CASE("hard threshold matches support enumeration") {
  Rng rng(21);
  for (int k = 0; k < 1000; ++k) {
    const Vector v = gaussian(rng, 8);
    const Vector h = hard_threshold(v, 3);
    CHECK(h == oracle::best_sparse_by_enumeration(v, 3));
    CHECK((h.array() != 0.0).count() <= 3);
  }
}

TEST_CASE("svd threshold examples") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3, 2, 1;
  Matrix expect = Matrix::Zero(3, 3);
  expect.diagonal() << 3, 2, 0;
  CHECK((svd_hard_threshold(d, 2) - expect).norm() <= 1e-12);

  const Matrix rank1 = vec({1, 2, 3}) * vec({4, -1, 0.5, 2}).transpose();
  CHECK((svd_hard_threshold(rank1, 1) - rank1).norm() <= 1e-10 * rank1.norm());
  CHECK_THROWS_AS(svd_hard_threshold(rank1, 4), ContractViolation);
  CHECK_THROWS_AS(svd_hard_threshold(rank1, 0), ContractViolation);
  const Signal s = svd_hard_threshold(Signal::from_matrix(rank1), 1);
  CHECK(s.shape()->rows == 3);
}

TEST_CASE("svd threshold attains the Eckart-Young error") {
  Rng rng(22);
  for (int k = 0; k < 200; ++k) {
    const Matrix a = gaussian(rng, 20).reshaped(5, 4);
    const double err = (a - svd_hard_threshold(a, 2)).norm();
    CHECK(std::fabs(err - oracle::eckart_young_error(a, 2)) <= 1e-9);
  }
}

TEST_CASE("the Jacobi oracle agrees with known spectra") {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const Vector ev = oracle::jacobi_eigenvalues(a);
  CHECK(ev(0) == doctest::Approx(3.0));
  CHECK(ev(1) == doctest::Approx(1.0));
}

TEST_CASE("l1 projection examples") {
  CHECK(project_l1_ball(vec({0.5, 0.3}), 1.0) == vec({0.5, 0.3}));
  CHECK((project_l1_ball(vec({2, 0}), 1.0) - vec({1, 0})).norm() <= 1e-15);
  CHECK((project_l1_ball(vec({3, 1}), 1.0) - vec({1, 0})).norm() <= 1e-15);
  CHECK((oracle::l1_projection_kkt(vec({3, 1}), 1.0) - vec({1, 0})).norm() <= 1e-15);
  CHECK(l1_projection_threshold(vec({3, 1}), 1.0) == doctest::Approx(2.0));
}

TEST_CASE("l1 projection matches KKT enumeration and is feasible") {
  Rng rng(23);
  for (int k = 0; k < 1000; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(6));
    const Vector v = gaussian(rng, n, 2.0);
    const double radius = 0.1 + 3.0 * rng.uniform();
    const Vector p = project_l1_ball(v, radius);
    CHECK((p - oracle::l1_projection_kkt(v, radius)).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK(p.lpNorm<1>() <= radius + 1e-10);
    if (v.lpNorm<1>() > radius) CHECK(std::fabs(p.lpNorm<1>() - radius) <= 1e-10);
  }
}

TEST_CASE("normalize to sphere") {
  CHECK(normalize_to_sphere(vec({0, 2, 0})) == vec({0, 1, 0}));
  CHECK((normalize_to_sphere(vec({3, 4})) - vec({0.6, 0.8})).norm() <= 1e-15);
  CHECK_THROWS_AS(normalize_to_sphere(Vector::Zero(3)), DegenerateInputError);
}

TEST_CASE("projections are idempotent and optimal") {
  Rng rng(24);
  for (const auto& set : sets()) {
    CAPTURE(set.name());
    std::vector<Signal> members;
    for (int k = 0; k < 200; ++k) members.push_back(project(set, shaped(set, gaussian(rng, set.dim(), 1.5))));
    for (int k = 0; k < 1000; ++k) {
      const Signal v = shaped(set, gaussian(rng, set.dim(), 2.0));
      const Signal p = project(set, v);
      CHECK(contains(set, p));
      CHECK((project(set, p).values() - p.values()).norm() <= 1e-12 * std::max(1.0, p.norm()));
      if (k < 50) {
        const double d = (v.values() - p.values()).norm();
        for (const auto& z : members) CHECK(d <= (v.values() - z.values()).norm() + 1e-12);
      }
    }
  }
}

TEST_CASE("projections onto convex sets are non-expansive") {
  Rng rng(25);
  for (const auto& set : {FeasibleSet::l1_ball(10, 1.3), FeasibleSet::euclidean_ball(10, 0.8), FeasibleSet::full_space(10)}) {
    for (int k = 0; k < 1000; ++k) {
      const Signal u(gaussian(rng, 10, 2.0)), v(gaussian(rng, 10, 2.0));
      const double lhs = (project(set, u).values() - project(set, v).values()).norm();
      CHECK(lhs <= (u.values() - v.values()).norm() + 1e-12);
    }
  }
}

TEST_CASE("hard threshold keeps only the largest magnitudes") {
  Rng rng(26);
  for (int k = 0; k < 500; ++k) {
    const Vector v = gaussian(rng, 15);
    const Vector h = hard_threshold(v, 4);
    Vector mags = v.cwiseAbs();
    std::sort(mags.data(), mags.data() + mags.size(), std::greater<>());
    for (Eigen::Index i = 0; i < 15; ++i)
      if (h(i) != 0.0) CHECK(std::fabs(v(i)) >= mags(3));
  }
}
