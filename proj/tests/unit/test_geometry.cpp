#include <doctest.h>

#include <cmath>

#include "geoest/bench/oracles.hpp"
#include "geoest/errors.hpp"
#include "geoest/geometry.hpp"
#include "geoest/rng.hpp"

using namespace geoest;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Vector gaussian(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

std::vector<FeasibleSet> cones() {
  return {FeasibleSet::sparse_cone(40, 3), FeasibleSet::low_rank_cone(6, 5, 1), FeasibleSet::full_space(12)};
}

}  // namespace

TEST_CASE("per-sample suprema") {
  CHECK(width_sup_sample(FeasibleSet::sparse_cone(3, 1), vec({3, -4, 1}), 1.0) == doctest::Approx(5.0));
  const Vector g = vec({0.3, -1.2, 2.0, 0.7});
  CHECK(width_sup_sample(FeasibleSet::full_space(4), g, 2.0) == doctest::Approx(2.0 * g.norm()));
  CHECK(width_sup_sample(FeasibleSet::l1_ball(4, 1e6), g, 0.01) == doctest::Approx(0.01 * g.norm()));
  CHECK(width_sup_sample(FeasibleSet::euclidean_ball(4, 0.5), g, 3.0) == doctest::Approx(1.0 * g.norm()));
  // A small l1 radius caps the supremum at 2R ||g||_inf.
  CHECK(width_sup_sample(FeasibleSet::l1_ball(4, 0.1), g, 10.0) == doctest::Approx(0.2 * 2.0));
}

TEST_CASE("low-rank per-sample supremum uses the top 2r singular values") {
  Rng rng(31);
  const Vector g = gaussian(rng, 30);
  const Matrix gm = Eigen::Map<const Matrix>(g.data(), 6, 5);
  Vector ev = oracle::jacobi_eigenvalues(gm.transpose() * gm);
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
  CHECK(width_sup_sample(FeasibleSet::low_rank_cone(6, 5, 1), g, 1.5) ==
        doctest::Approx(1.5 * std::sqrt(ev(0) + ev(1))).epsilon(1e-10));
}

TEST_CASE("l1/l2 support matches the enumeration oracle") {
  Rng rng(32);
  for (int k = 0; k < 500; ++k) {
    const Vector g = gaussian(rng, 3);
    const double l1 = 0.2 + 2.0 * rng.uniform();
    const double t = 0.1 + 2.0 * rng.uniform();
    CHECK(std::fabs(l1_l2_support(g, l1, t) - oracle::l1_l2_support_enumeration(g, l1, t)) <= 1e-6);
  }
  for (int k = 0; k < 200; ++k) {
    const Vector g = gaussian(rng, 6);
    CHECK(std::fabs(l1_l2_support(g, 1.3, 0.8) - oracle::l1_l2_support_enumeration(g, 1.3, 0.8)) <= 1e-9);
  }
}

TEST_CASE("full-space width is the expected Gaussian norm") {
  for (Eigen::Index n : {1, 5, 40}) {
    const auto w = local_mean_width(FeasibleSet::full_space(n), 1.0, 20000, 33);
    const double e = oracle::expected_gaussian_norm(n);
    CHECK(e <= std::sqrt(static_cast<double>(n)));
    CHECK(e >= std::sqrt(static_cast<double>(n)) * (1.0 - 1.0 / (2.0 * n)));
    CHECK(std::fabs(w.value - e) <= 3.0 * w.std_error);
  }
  CHECK(oracle::expected_gaussian_norm(1) == doctest::Approx(std::sqrt(2.0 / M_PI)));
  CHECK_THROWS_AS(local_mean_width(FeasibleSet::full_space(3), 1.0, 99, 1), ContractViolation);
}

TEST_CASE("cone widths are homogeneous in t") {
  for (const auto& set : cones()) {
    const auto ws = local_mean_width_grid(set, {0.5, 1.0, 2.0}, 2000, 34);
    CHECK(ws[0].value / 0.5 == doctest::Approx(ws[1].value).epsilon(1e-12));
    CHECK(ws[2].value / 2.0 == doctest::Approx(ws[1].value).epsilon(1e-12));
    // Independent draws agree within sampling error.
    const auto w2 = local_mean_width(set, 2.0, 2000, 35);
    CHECK(std::fabs(w2.value / 2.0 - ws[1].value) <= 3.0 * std::hypot(w2.std_error / 2.0, ws[1].std_error));
  }
}

TEST_CASE("the grid evaluation equals per-scale evaluation") {
  const auto set = FeasibleSet::l1_ball(30, 1.5);
  const std::vector<double> grid = {0.1, 0.7, 3.0};
  const auto ws = local_mean_width_grid(set, grid, 500, 36);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto w = local_mean_width(set, grid[i], 500, 36);
    CHECK(w.value == ws[i].value);
    CHECK(w.scale_t.value() == grid[i]);
  }
}

TEST_CASE("sparse width sits within the stated constants") {
  const double base = std::sqrt(10.0 * std::log(200.0));
  const auto w = local_mean_width(FeasibleSet::sparse_cone(1000, 10), 1.0, 2000, 37);
  CHECK(w.value <= 2.0 * base);
  CHECK(w.value >= 0.5 * base);
}

TEST_CASE("global width") {
  Rng rng(38);
  const auto w = global_mean_width(FeasibleSet::l1_ball(10000, 1.0), 400, 39);
  CHECK(w.value <= 4.0 * std::sqrt(2.0 * std::log(10000.0)) * 1.01);
  const auto we = global_mean_width(FeasibleSet::euclidean_ball(7, 1.0), 20000, 40);
  CHECK(std::fabs(we.value - 2.0 * oracle::expected_gaussian_norm(7)) <= 3.0 * we.std_error);
  CHECK_THROWS_AS(global_mean_width(FeasibleSet::sparse_cone(10, 2), 100, 1), DomainError);
  CHECK_THROWS_AS(global_mean_width(FeasibleSet::full_space(10), 100, 1), DomainError);
}

TEST_CASE("width bound formulas") {
  CHECK(width_bound_formula(FeasibleSet::low_rank_cone(50, 50, 2)) == doctest::Approx(20.0));
  // n = e gives log n = 1; the formula only uses log n, so check it through n = 3 scaling.
  CHECK(width_bound_formula(FeasibleSet::l1_ball(3, 1.0)) == doctest::Approx(4.0 * std::sqrt(2.0 * std::log(3.0))));
  CHECK(width_bound_formula(FeasibleSet::l1_ball(3, 2.0)) == doctest::Approx(8.0 * std::sqrt(2.0 * std::log(3.0))));
  CHECK(width_bound_formula(FeasibleSet::sparse_cone(100, 4)) ==
        doctest::Approx(std::sqrt(8.0 * std::log(50.0)) + 4.0));
  CHECK_THROWS_AS(width_bound_formula(FeasibleSet::full_space(3)), DomainError);
  CHECK_THROWS_AS(width_bound_formula(FeasibleSet::euclidean_ball(3, 1.0)), DomainError);
}

TEST_CASE("Monte Carlo widths stay below the sparse and l1 formulas") {
  for (const auto& set : {FeasibleSet::sparse_cone(200, 3), FeasibleSet::sparse_cone(50, 10), FeasibleSet::l1_ball(100, 1.0),
                          FeasibleSet::l1_ball(400, 2.0)}) {
    CAPTURE(set.name());
    const auto w = local_mean_width(set, 1.0, 2000, 41);
    CHECK(w.value <= width_bound_formula(set) + 3.0 * w.std_error);
  }
}

TEST_CASE("low-rank width relations") {
  const auto set = FeasibleSet::low_rank_cone(50, 50, 2);
  const auto w = local_mean_width(set, 1.0, 400, 42);
  // Differences of rank-r matrices have rank 2r; the formula at rank 2r dominates.
  CHECK(w.value <= width_bound_formula(FeasibleSet::low_rank_cone(50, 50, 4)) + 3.0 * w.std_error);
  // The printed rank-r value is smaller than the two-sided width.
  CHECK(w.value > width_bound_formula(set));
  // The one-sided width over rank-r unit matrices (top r singular values) is below it.
  Rng rng(43);
  double one_sided = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vector g = gaussian(rng, 2500);
    one_sided += width_sup_sample(FeasibleSet::low_rank_cone(50, 50, 1), g, 1.0);
  }
  CHECK(one_sided / 200.0 <= width_bound_formula(set));
}

TEST_CASE("width invariants") {
  Rng rng(44);
  const auto l1 = FeasibleSet::l1_ball(50, 1.0);
  const std::vector<double> grid = {0.05, 0.1, 0.3, 1.0, 3.0};
  const auto ws = local_mean_width_grid(l1, grid, 2000, 45);
  const auto wg = global_mean_width(l1, 2000, 46);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(ws[i].value <= grid[i] * std::sqrt(50.0));
    CHECK(ws[i].value <= wg.value + 3.0 * std::hypot(ws[i].std_error, wg.std_error));
    if (i > 0) CHECK(ws[i].value / grid[i] <= ws[i - 1].value / grid[i - 1] + 3.0 * ws[i].std_error / grid[i]);
  }
  for (const auto& set : cones()) {
    const auto w = local_mean_width(set, 1.0, 2000, 47);
    CHECK(w.value >= std::sqrt(2.0 / M_PI) - 3.0 * w.std_error);
  }
}

TEST_CASE("packing lower bounds") {
  CHECK(packing_lower_bound(FeasibleSet::euclidean_ball(1, 1.0), 1.0, 500, 48) >= 10);
  CHECK(packing_lower_bound(FeasibleSet::sparse_cone(20, 1), 1.0, 2000, 49) >= 20);
  for (const auto& set : {FeasibleSet::sparse_cone(20, 2), FeasibleSet::l1_ball(10, 1.0), FeasibleSet::low_rank_cone(4, 4, 1)}) {
    std::int64_t prev = 0;
    for (std::int64_t c : {10, 50, 200, 800}) {
      const auto p = packing_lower_bound(set, 0.7, c, 50);
      CHECK(p >= prev);
      CHECK(p >= 1);
      prev = p;
    }
  }
}

TEST_CASE("packing candidates lie in K cap tB2 and are pairwise separated after greedy selection") {
  for (const auto& set : {FeasibleSet::sparse_cone(20, 2), FeasibleSet::l1_ball(10, 1.0), FeasibleSet::euclidean_ball(5, 0.5)}) {
    const auto cands = packing_candidates(set, 0.7, 300, 51);
    for (const auto& c : cands) {
      CHECK(c.norm() <= 0.7 + 1e-12);
      CHECK(contains(set, Signal(c)));
    }
    // Independent greedy count with the oracle distance test.
    std::vector<Vector> kept;
    for (const auto& c : cands) {
      bool far = true;
      for (const auto& k : kept) far = far && (c - k).norm() > 0.07;
      if (far) kept.push_back(c);
    }
    CHECK(static_cast<std::int64_t>(kept.size()) == packing_lower_bound(set, 0.7, 300, 51));
  }
}

TEST_CASE("Sudakov direction") {
  for (const auto& set : {FeasibleSet::sparse_cone(30, 2), FeasibleSet::l1_ball(30, 1.0)}) {
    for (double t : {0.3, 1.0}) {
      const auto w = local_mean_width(set, t, 1000, 52);
      const auto p = packing_lower_bound(set, t, 1000, 53);
      CHECK(t * std::sqrt(std::log(static_cast<double>(p))) <= w.value / 0.2);
    }
  }
}

TEST_CASE("minimax radii") {
  const auto set = FeasibleSet::sparse_cone(20, 2);
  const auto grid = log_grid(0.01, 10.0, 25);
  MinimaxOptions opts{400, 400};
  const auto a = minimax_radii(set, 1.0, 50, grid, opts, 54);
  const auto b = minimax_radii(set, 2.0, 200, grid, opts, 54);
  CHECK(a.delta_upper == doctest::Approx(b.delta_upper).epsilon(1e-12));
  CHECK(a.delta_lower == doctest::Approx(b.delta_lower).epsilon(1e-12));
  CHECK(a.delta_lower <= a.delta_upper);
  REQUIRE(a.alpha_at_scale.has_value());
  CHECK(*a.alpha_at_scale <= 10.0);
  CHECK_FALSE(a.diam.has_value());

  const auto tiny = minimax_radii(set, 1e-9, 50, grid, opts, 54);
  CHECK(tiny.delta_upper == doctest::Approx(grid.front()).epsilon(1e-6));

  const auto ball = minimax_radii(FeasibleSet::l1_ball(20, 1.5), 1.0, 50, grid, opts, 55);
  CHECK(ball.diam.value() == doctest::Approx(3.0));
  CHECK_THROWS_AS(minimax_radii(set, 1.0, 50, {}, opts, 1), ContractViolation);
}

TEST_CASE("grids") {
  const auto g = log_grid(1e-3, 10.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g.back() == doctest::Approx(10.0));
  CHECK(g[2] == doctest::Approx(0.1));
  const auto d = default_t_grid(2.0, 4);
  CHECK(d.size() == 40);
  CHECK(d.front() == doctest::Approx(2e-3));
  CHECK(d.back() == doctest::Approx(20.0));
}
