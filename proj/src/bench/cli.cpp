#include "geoest/bench/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "geoest/bench/acceptance.hpp"
#include "geoest/bench/config.hpp"
#include "geoest/bench/experiment.hpp"
#include "geoest/bench/matcomp.hpp"
#include "geoest/bench/report.hpp"
#include "geoest/errors.hpp"
#include "geoest/geometry.hpp"
#include "geoest/model_params.hpp"

#ifndef GEOEST_VERSION
#define GEOEST_VERSION "unknown"
#endif

namespace geoest::bench {

using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string format = "json";
};

int effective_threads(int requested) {
  if (const char* env = std::getenv("GEOEST_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("GEOEST_THREADS:0: expected a positive integer, got \"" + std::string(env) + "\"");
  }
  if (requested < 1) throw ConfigError("--threads:0: expected a positive integer");
  return requested;
}

void emit(const Common& c, const std::string& name, const json& j, const std::optional<std::string>& csv) {
  if (c.format == "csv" && !csv) throw ConfigError("--format:0: csv output is only available for simulate and matcomp");
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    write_text(c.out + "/" + name + ".json", dump(j));
    if (csv) write_text(c.out + "/" + name + ".csv", *csv);
    return;
  }
  std::cout << (c.format == "csv" ? *csv : dump(j));
}

std::uint64_t seed_or(const Common& c, const ConfigSource& src, std::uint64_t fallback) {
  if (c.seed) return *c.seed;
  if (src.root().contains("seed")) return src.unsigned_integer(src.root()["seed"], "seed");
  return fallback;
}

std::optional<std::int64_t> optional_n(const ConfigSource& src) {
  if (src.root().contains("n")) return src.integer(src.root()["n"], "n");
  return std::nullopt;
}

int cmd_simulate(const Common& c) {
  ExperimentConfig cfg = parse_experiment(ConfigSource::from_file(c.config));
  if (c.seed) {
    cfg.master_seed = *c.seed;
    cfg.echo["master_seed"] = *c.seed;
  }
  const ExperimentResult res = run_experiment(cfg, effective_threads(c.threads));
  emit(c, cfg.id, to_json(res), to_csv(res));
  if (!res.valid) {
    std::cerr << "geoest: experiment aborted, partial results flagged invalid: " << res.error << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_matcomp(const Common& c) {
  MatCompConfig cfg = parse_matcomp(ConfigSource::from_file(c.config));
  if (c.seed) {
    cfg.master_seed = *c.seed;
    cfg.echo["master_seed"] = *c.seed;
  }
  const MatCompResult res = run_matcomp(cfg, effective_threads(c.threads));
  for (const auto& pp : res.per_p)
    if (pp.below_d_log_d)
      std::cerr << "geoest: warning: p = " << pp.p << " gives m = " << pp.m << " < d log d\n";
  emit(c, cfg.id, to_json(res), to_csv(res));
  if (!res.valid) {
    std::cerr << "geoest: experiment aborted, partial results flagged invalid: " << res.error << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_params(const Common& c) {
  const ConfigSource src = ConfigSource::from_file(c.config);
  const json& j = src.root();
  const ObservationModel model = parse_model(src, src.require(j, "", "model"), "model");
  const double norm_x = j.contains("norm_x") ? src.number(j["norm_x"], "norm_x") : 1.0;
  if (!(norm_x >= 0.0)) src.fail("norm_x", "norm_x must be >= 0");
  const std::string method = j.contains("method") ? src.string(j["method"], "method") : "auto";
  const std::int64_t mc = j.contains("mc_samples") ? src.integer(j["mc_samples"], "mc_samples") : 1'000'000;
  const std::uint64_t seed = seed_or(c, src, 0);
  ModelParams p;
  if (method == "auto") {
    p = auto_params(model, norm_x, seed, mc);
  } else if (method == "closed_form") {
    auto cf = closed_form_params(model, norm_x);
    if (!cf) src.fail("method", "no closed form for this model");
    p = *cf;
  } else if (method == "quadrature") {
    QuadratureOptions q;
    if (j.contains("order")) q.order = static_cast<int>(src.integer(j["order"], "order"));
    p = quadrature_params(model, norm_x, q);
  } else if (method == "monte_carlo") {
    p = monte_carlo_params(model, norm_x, mc, seed);
  } else {
    src.fail("method", "expected auto, closed_form, quadrature or monte_carlo");
  }
  json out = to_json(p);
  out["model"] = model_to_json(model);
  out["norm_x"] = norm_x;
  out["version"] = GEOEST_VERSION;
  emit(c, "params", out, std::nullopt);
  return kExitOk;
}

int cmd_width(const Common& c) {
  const ConfigSource src = ConfigSource::from_file(c.config);
  const json& j = src.root();
  const FeasibleSet set = parse_set(src, src.require(j, "", "set"), "set", optional_n(src));
  const std::int64_t samples = j.contains("samples") ? src.integer(j["samples"], "samples") : 2000;
  if (samples < 100) src.fail("samples", "samples must be >= 100");
  const std::uint64_t seed = seed_or(c, src, 0);
  const std::vector<double> ts = j.contains("t_grid") ? parse_t_grid(src, j["t_grid"], "t_grid") : std::vector<double>{1.0};
  json widths = json::array();
  for (const auto& w : local_mean_width_grid(set, ts, samples, seed)) widths.push_back(to_json(w));
  json out = {{"set", set_to_json(set)}, {"seed", seed}, {"samples", samples}, {"t_grid", ts}, {"local", widths},
              {"version", GEOEST_VERSION}};
  out["global"] = set.is_bounded() ? to_json(global_mean_width(set, samples, seed)) : json(nullptr);
  try {
    out["bound_formula"] = width_bound_formula(set);
  } catch (const DomainError&) {
    out["bound_formula"] = nullptr;
  }
  emit(c, "width", out, std::nullopt);
  return kExitOk;
}

int cmd_lowerbound(const Common& c) {
  const ConfigSource src = ConfigSource::from_file(c.config);
  const json& j = src.root();
  const FeasibleSet set = parse_set(src, src.require(j, "", "set"), "set", optional_n(src));
  const double nu = src.number(src.require(j, "", "nu"), "nu");
  if (!(nu > 0.0)) src.fail("nu", "nu must be > 0");
  const std::int64_t m = src.integer(src.require(j, "", "m"), "m");
  if (m < 1) src.fail("m", "m must be >= 1");
  MinimaxOptions o;
  if (j.contains("width_samples")) o.width_samples = src.integer(j["width_samples"], "width_samples");
  if (j.contains("packing_candidates")) o.packing_candidates = src.integer(j["packing_candidates"], "packing_candidates");
  if (o.width_samples < 2) src.fail("width_samples", "width_samples must be >= 2");
  if (o.packing_candidates < 1) src.fail("packing_candidates", "packing_candidates must be >= 1");
  const std::vector<double> ts = j.contains("t_grid") ? parse_t_grid(src, j["t_grid"], "t_grid") : default_t_grid(nu, m);
  const std::uint64_t seed = seed_or(c, src, 0);
  json out = to_json(minimax_radii(set, nu, m, ts, o, seed));
  out["set"] = set_to_json(set);
  out["nu"] = nu;
  out["m"] = m;
  out["seed"] = seed;
  out["version"] = GEOEST_VERSION;
  emit(c, "lowerbound", out, std::nullopt);
  return kExitOk;
}

int cmd_bench(const Common& c, const std::vector<int>& criteria) {
  AcceptanceOptions opts;
  opts.threads = effective_threads(c.threads);
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    opts.out_dir = c.out;
  }
  bool all = true;
  for (int id : criteria.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10} : criteria) {
    if (id < 1 || id > kCriterionCount) throw ConfigError("--criteria:0: no criterion " + std::to_string(id));
    const CriterionResult r = run_criterion(id, opts);
    std::cout << format_result(r) << std::flush;
    all = all && r.passed();
  }
  return all ? kExitOk : kExitCriteriaFailed;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Estimation from single-index observations: simulation and bounds", "geoest"};
  app.set_version_flag("--version", GEOEST_VERSION);
  app.require_subcommand(1);

  Common c;
  std::vector<int> criteria;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", c.config, "JSON configuration file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "directory for result files (stdout when omitted)");
    sub->add_option("--seed", c.seed, "override the configured seed");
    sub->add_option("--threads", c.threads, "worker threads (GEOEST_THREADS takes precedence)");
    sub->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto* simulate = app.add_subcommand("simulate", "run one experiment");
  auto* params = app.add_subcommand("params", "model parameters mu, sigma, eta, lambda, psi, C_f");
  auto* width = app.add_subcommand("width", "local and global mean width estimates");
  auto* matcomp = app.add_subcommand("matcomp", "matrix completion experiment");
  auto* lowerbound = app.add_subcommand("lowerbound", "minimax radii and the alpha ratio");
  auto* bench = app.add_subcommand("bench", "run the acceptance suite");
  for (auto* s : {simulate, params, width, matcomp, lowerbound}) add_common(s, true);
  add_common(bench, false);
  bench->add_option("--criteria", criteria, "criterion numbers (default all)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadConfig;
  }

  try {
    if (*simulate) return cmd_simulate(c);
    if (*params) return cmd_params(c);
    if (*width) return cmd_width(c);
    if (*matcomp) return cmd_matcomp(c);
    if (*lowerbound) return cmd_lowerbound(c);
    if (*bench) return cmd_bench(c, criteria);
  } catch (const ConfigError& e) {
    std::cerr << "geoest: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "geoest: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "geoest: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "geoest: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace geoest::bench
