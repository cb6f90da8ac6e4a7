#include <doctest.h>

#include <cmath>
#include <string>

#include "geoest/bench/config.hpp"
#include "geoest/bench/experiment.hpp"
#include "geoest/bench/matcomp.hpp"
#include "geoest/bench/report.hpp"
#include "geoest/errors.hpp"

using namespace geoest;
using namespace geoest::bench;
using nlohmann::json;

namespace {

json base_config() {
  return json{{"id", "unit"},
              {"n", 30},
              {"set", {{"type", "sparse_cone"}, {"s", 3}}},
              {"model", {{"link", "sign"}}},
              {"m_grid", {40, 80}},
              {"trials", 6},
              {"master_seed", 17},
              {"width_samples", 300},
              {"metrics", {"linear_error", "projected_error", "direction_error", "scaled_error"}}};
}

std::string error_of(const std::string& text) {
  try {
    parse_experiment(ConfigSource(text, "cfg.json"));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config errors point at the offending line") {
  const std::string bad_trials =
      "{\n"
      "  \"n\": 10,\n"
      "  \"set\": {\"type\": \"sparse_cone\", \"s\": 2},\n"
      "  \"model\": {\"link\": \"sign\"},\n"
      "  \"m_grid\": [10],\n"
      "  \"trials\": 0\n"
      "}\n";
  CHECK(error_of(bad_trials).rfind("cfg.json:6: trials:", 0) == 0);

  const std::string unknown =
      "{\n"
      "  \"n\": 10,\n"
      "  \"set\": {\"type\": \"sparse_cone\", \"s\": 2},\n"
      "  \"model\": {\"link\": \"sign\"},\n"
      "  \"m_grid\": [10],\n"
      "  \"bogus\": 1\n"
      "}\n";
  CHECK(error_of(unknown).find("cfg.json:6:") == 0);
  CHECK(error_of(unknown).find("bogus") != std::string::npos);

  const std::string bad_link =
      "{\n"
      "  \"n\": 10,\n"
      "  \"set\": {\"type\": \"sparse_cone\", \"s\": 2},\n"
      "  \"model\": {\n"
      "    \"link\": \"tanh\"\n"
      "  },\n"
      "  \"m_grid\": [10]\n"
      "}\n";
  CHECK(error_of(bad_link).find("cfg.json:5:") == 0);

  CHECK(error_of("{ not json").find("cfg.json:") == 0);
  CHECK(error_of("{\"n\": 10, \"set\": \"full_space\", \"model\": {\"link\": \"sign\"}}").find("m_grid") !=
        std::string::npos);

  json outside = base_config();
  outside["signal"] = {{"type", "fixed"}, {"values", std::vector<double>(30, 1.0)}};
  CHECK_THROWS_AS(experiment_from_json(outside), ConfigError);
}

TEST_CASE("config round trip") {
  const auto c = experiment_from_json(base_config());
  CHECK(c.id == "unit");
  CHECK(c.set.dim() == 30);
  CHECK(c.m_grid == std::vector<std::int64_t>{40, 80});
  CHECK(c.master_seed == 17);
  CHECK(set_to_json(c.set) == json{{"type", "sparse_cone"}, {"n", 30}, {"s", 3}});
  CHECK(link_to_json(c.model.link) == "sign");
  json grid = base_config();
  grid["t_grid"] = {{"min", 0.01}, {"max", 1.0}, {"count", 3}};
  const auto g = experiment_from_json(grid);
  REQUIRE(g.t_grid.size() == 3);
  CHECK(g.t_grid[1] == doctest::Approx(0.1));
}

TEST_CASE("experiments are deterministic and thread independent") {
  const auto c = experiment_from_json(base_config());
  const auto a = run_experiment(c, 1);
  const auto b = run_experiment(c, 4);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(dump(to_json(a)) == dump(to_json(b)));
  const Experiment e(c);
  const auto t1 = e.run_trial(40, 3);
  const auto t2 = e.run_trial(40, 3);
  CHECK(t1.values == t2.values);
  CHECK(t1.seed == trial_seed(17, 40, 3));
}

TEST_CASE("doubling trials reproduces the first half") {
  json j = base_config();
  const auto small = run_experiment(experiment_from_json(j));
  j["trials"] = 12;
  const auto large = run_experiment(experiment_from_json(j));
  for (const auto& t : small.trials) {
    bool found = false;
    for (const auto& u : large.trials)
      if (u.m == t.m && u.trial == t.trial) {
        found = true;
        CHECK(u.values == t.values);
      }
    CHECK(found);
  }
}

TEST_CASE("a single trial has no standard error") {
  json j = base_config();
  j["trials"] = 1;
  const auto r = run_experiment(experiment_from_json(j));
  for (const auto& pm : r.per_m)
    for (const auto& [name, s] : pm.metrics) CHECK_FALSE(s.std_error.has_value());
  const json out = to_json(r);
  CHECK(out.dump().find("\"stderr\":null") != std::string::npos);
}

TEST_CASE("identity link on the full space: projection changes nothing") {
  const json j{{"n", 10},
               {"set", "full_space"},
               {"model", {{"link", "identity"}}},
               {"m_grid", {200}},
               {"trials", 5},
               {"width_samples", 100}};
  const auto r = run_experiment(experiment_from_json(j));
  for (const auto& t : r.trials) CHECK(t.values.at("linear_error") == t.values.at("projected_error"));
}

TEST_CASE("CSV rows") {
  const auto r = run_experiment(experiment_from_json(base_config()));
  const std::string csv = to_csv(r);
  CHECK(csv.rfind("experiment_id,m,trial,metric,value\n", 0) == 0);
  std::size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 1 + 2 * 6 * 4);
  CHECK(csv.find("unit,40,0,projected_error,") != std::string::npos);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("result JSON carries provenance") {
  const auto r = run_experiment(experiment_from_json(base_config()));
  const json out = to_json(r);
  CHECK(out.at("provenance").contains("config"));
  CHECK(out.dump().find("\"master_seed\":17") != std::string::npos);
  CHECK(out.at("provenance").contains("version"));
  CHECK(r.valid);
  CHECK(r.per_m.size() == 2);
  CHECK(r.per_m[0].trial_seeds.size() == 6);
  for (const auto& pm : r.per_m) {
    for (const auto& [name, s] : pm.metrics) {
      CHECK(s.q50 <= s.q90);
      CHECK(s.q90 <= s.q95);
      if (s.std_error) CHECK(*s.std_error >= 0.0);
    }
    for (const auto& [name, v] : pm.bounds) CHECK(std::isfinite(v));
  }
}

TEST_CASE("cone bounds use the unit width") {
  const Experiment e(experiment_from_json(base_config()));
  const auto& p = e.params();
  const auto b = e.bounds_for(80);
  const auto r = e.run(1);
  REQUIRE(r.width_unit.has_value());
  const double gamma = std::sqrt(2.0 * M_PI) * p.sigma + 2.0 * p.eta;
  CHECK(b.at("cone_simplified") == doctest::Approx(gamma * r.width_unit->value / std::sqrt(80.0)));
  CHECK(b.at("corollary_binary") == doctest::Approx(kBinaryC * r.width_unit->value / std::sqrt(80.0)));
  CHECK(b.at("thm_main") <= b.at("cone_simplified") * (1.0 + 1e-9) + r.t_grid.front());
}

TEST_CASE("the noisy-linear bound dominates the observed error") {
  const json j{{"n", 50},
               {"set", {{"type", "sparse_cone"}, {"s", 5}}},
               {"model", {{"link", "identity"}, {"pre_noise", {{"type", "gaussian"}, {"nu", 1.0}}}}},
               {"m_grid", {200}},
               {"trials", 500},
               {"master_seed", 3},
               {"width_samples", 1000}};
  const auto r = run_experiment(experiment_from_json(j), 4);
  const auto& pm = r.per_m.front();
  CHECK(pm.bounds.at("corollary_noisy_linear_cone") >= pm.metrics.at("projected_error").mean);
  CHECK(pm.bounds.at("thm_main") >= pm.metrics.at("projected_error").mean);
}

TEST_CASE("summaries and fits") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0, 5.0});
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.std_error.value() == doctest::Approx(std::sqrt(2.5 / 5.0)));
  CHECK(s.q50 == doctest::Approx(3.0));
  CHECK(s.q90 == doctest::Approx(4.6));
  CHECK(s.q95 == doctest::Approx(4.8));
  const auto f = summarize({1.0, std::nan(""), 3.0});
  CHECK(f.n_valid == 2);
  CHECK(f.n_failed == 1);

  const std::vector<double> m = {100, 200, 400, 800};
  std::vector<double> means;
  for (double x : m) means.push_back(3.0 * std::pow(x, -0.5));
  const auto fit = fit_loglog(m, means, {0.01, 0.01, 0.01, 0.01});
  REQUIRE(fit.has_value());
  CHECK(fit->slope == doctest::Approx(-0.5));
  CHECK(std::exp(fit->intercept) == doctest::Approx(3.0));
  CHECK(fit->half_width.has_value());
  CHECK_FALSE(fit_loglog({100}, {1.0}, {std::nullopt}).has_value());
}

TEST_CASE("parallel_for rethrows the first failure by index") {
  std::vector<char> done;
  try {
    parallel_for(20, 4, [](std::int64_t i) {
      if (i == 7) throw NumericalError("seven");
      if (i == 12) throw NumericalError("twelve");
    }, &done);
    FAIL("no exception");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()) == "seven");
  }
  CHECK(done.size() == 20);
  CHECK(done[0]);
  CHECK_FALSE(done[7]);
}

TEST_CASE("exact matrix completion") {
  const auto c = matcomp_from_json(json{{"d", 20}, {"r", 2}, {"p_grid", {1.0}}, {"nu", 0.0}, {"trials", 2}});
  const auto r = run_matcomp(c);
  for (const auto& t : r.trials) CHECK(t.relative_error <= 1e-9);
  const Matrix x = completion_truth(20, 2, 0.7, 4);
  CHECK(x.cwiseAbs().maxCoeff() == doctest::Approx(0.7));
  CHECK_THROWS_AS(matcomp_from_json(json{{"d", 20}, {"r", 30}, {"p_grid", {0.5}}}), ConfigError);
  CHECK(r.per_p.front().bound == doctest::Approx(3.0 * std::sqrt(2.0 * 20.0 / 400.0) * 1.0));
}
