#include "geoest/bench/acceptance.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "geoest/bench/config.hpp"
#include "geoest/bench/experiment.hpp"
#include "geoest/bench/matcomp.hpp"
#include "geoest/bench/oracles.hpp"
#include "geoest/bench/report.hpp"
#include "geoest/errors.hpp"
#include "geoest/geometry.hpp"
#include "geoest/model_params.hpp"
#include "geoest/projections.hpp"
#include "geoest/rng.hpp"

namespace geoest::bench {

using nlohmann::json;

namespace {

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void add(CriterionResult& r, std::string name, bool ok, std::string detail) {
  r.checks.push_back({std::move(name), ok, std::move(detail)});
}

double se_or_zero(const MetricSummary& s) { return s.std_error.value_or(0.0); }

// mean <= bound + 4 SE
void check_dominated(CriterionResult& r, const std::string& label, const MetricSummary& s, double bound) {
  const double slack = 4.0 * se_or_zero(s);
  add(r, label, s.mean <= bound + slack, "mean " + g(s.mean) + " <= bound " + g(bound) + " + 4 SE (" + g(slack) + ")");
}

void maybe_write(const AcceptanceOptions& opts, const std::string& id, const std::string& json_text,
                 const std::string& csv_text) {
  if (!opts.out_dir) return;
  write_text(*opts.out_dir + "/" + id + ".json", json_text);
  write_text(*opts.out_dir + "/" + id + ".csv", csv_text);
}

ExperimentResult run_and_store(const json& cfg, const AcceptanceOptions& opts) {
  ExperimentResult res = run_experiment(experiment_from_json(cfg, cfg["id"].get<std::string>()), opts.threads);
  maybe_write(opts, res.config.id, dump(to_json(res)), to_csv(res));
  if (!res.valid) throw NumericalError(res.config.id + ": " + res.error);
  return res;
}

MatCompResult run_matcomp_and_store(const json& cfg, const AcceptanceOptions& opts) {
  MatCompResult res = run_matcomp(matcomp_from_json(cfg, cfg["id"].get<std::string>()), opts.threads);
  maybe_write(opts, res.config.id, dump(to_json(res)), to_csv(res));
  if (!res.valid) throw NumericalError(res.config.id + ": " + res.error);
  return res;
}

void check_slope(CriterionResult& r, const std::string& label, const std::optional<SlopeFit>& fit, double lo, double hi) {
  if (!fit) {
    add(r, label, false, "no fit available");
    return;
  }
  const std::string hw = fit->half_width ? " +- " + g(*fit->half_width) : "";
  add(r, label, fit->slope >= lo && fit->slope <= hi,
      "slope " + g(fit->slope) + hw + " in [" + g(lo) + ", " + g(hi) + "]");
}

// ---------------------------------------------------------------------------

json c1_config(const std::string& id, const json& model) {
  return {{"id", id},        {"n", 50},         {"set", "full_space"},    {"model", model},
          {"norm_x", 1.0},   {"m_grid", {100}}, {"trials", 2000},         {"master_seed", 1001},
          {"metrics", {"linear_error_sq"}},     {"width_samples", 200}};
}

CriterionResult criterion1(const AcceptanceOptions& opts) {
  CriterionResult r{1, "mean squared error of the linear estimator", {}, {}};
  struct Case {
    std::string id;
    json model;
    double target;
  };
  const std::vector<Case> cases = {
      {"c1_identity", {{"link", "identity"}}, 0.51},
      {"c1_noisy_linear", {{"link", "identity"}, {"pre_noise", {{"type", "gaussian"}, {"nu", 1.0}}}}, 1.01},
      {"c1_sign", {{"link", "sign"}}, (1.0 - 2.0 / M_PI + 49.0) / 100.0},
  };
  for (const auto& c : cases) {
    const ExperimentResult res = run_and_store(c1_config(c.id, c.model), opts);
    const ModelParams& p = res.params;
    const double from_params = (p.sigma * p.sigma + p.eta * p.eta * 49.0) / 100.0;
    add(r, c.id + " params", std::fabs(from_params - c.target) <= 1e-12,
        "(sigma^2 + 49 eta^2) / 100 = " + g(from_params) + " vs " + g(c.target));
    const MetricSummary& s = res.per_m.front().metrics.at("linear_error_sq");
    const double se = se_or_zero(s);
    add(r, c.id + " mse", std::fabs(s.mean - c.target) <= 4.0 * se,
        "mean " + g(s.mean) + " vs " + g(c.target) + ", |diff| = " + g(std::fabs(s.mean - c.target)) + " <= 4 SE (" +
            g(4.0 * se) + ")");
  }
  return r;
}

CriterionResult criterion2(const AcceptanceOptions&) {
  CriterionResult r{2, "mu of the 1-bit model by quadrature", {}, {}};
  ObservationModel m;
  m.link = LinkFunction::sign();
  const ModelParams p = quadrature_params(m, 1.0);
  const double target = std::sqrt(2.0 / M_PI);
  char buf[64];
  std::snprintf(buf, sizeof buf, "mu = %.12f, |mu - sqrt(2/pi)| = %.3e", p.mu, std::fabs(p.mu - target));
  add(r, "quadrature mu", std::fabs(p.mu - target) <= 1e-8, buf);
  return r;
}

json one_bit_config() {
  return {{"id", "c3_one_bit_sparse"},
          {"n", 500},
          {"set", {{"type", "sparse_cone"}, {"s", 5}}},
          {"model", {{"link", "sign"}}},
          {"norm_x", 1.0},
          {"m_grid", {100, 200, 400, 800, 1600, 3200}},
          {"trials", 200},
          {"master_seed", 1003},
          {"metrics", {"linear_error", "projected_error", "direction_error"}}};
}

CriterionResult criterion3(const AcceptanceOptions& opts) {
  CriterionResult r{3, "1-bit sparse recovery rate", {}, {}};
  const ExperimentResult res = run_and_store(one_bit_config(), opts);
  check_slope(r, "direction error slope", res.fits.count("direction_error") ? std::optional(res.fits.at("direction_error")) : std::nullopt,
              -0.6, -0.4);
  for (const auto& pm : res.per_m) {
    const std::string at = " m=" + std::to_string(pm.m);
    const auto& dir = pm.metrics.at("direction_error");
    const auto& proj = pm.metrics.at("projected_error");
    check_dominated(r, "binary direction bound" + at, dir, pm.bounds.at("corollary_binary_direction"));
    add(r, "normalization failures" + at, dir.n_failed == 0, std::to_string(dir.n_failed) + " failed");
    check_dominated(r, "main bound" + at, proj, pm.bounds.at("thm_main"));
    check_dominated(r, "cone bound" + at, proj, pm.bounds.at("cone_simplified"));
    check_dominated(r, "binary bound" + at, proj, pm.bounds.at("corollary_binary"));
    check_dominated(r, "direction bound" + at, dir, pm.bounds.at("direction"));
    const double whp = pm.bounds.at("whp_95");
    add(r, "high-probability bound" + at, proj.q95 <= whp, "q95 " + g(proj.q95) + " <= " + g(whp));
  }
  if (res.fits.count("projected_error"))
    r.notes.push_back("projected error slope " + g(res.fits.at("projected_error").slope));
  return r;
}

CriterionResult criterion4(const AcceptanceOptions& opts) {
  CriterionResult r{4, "projection dominance", {}, {}};
  const ExperimentResult res = run_and_store(one_bit_config(), opts);
  for (const auto& pm : res.per_m) {
    const double lin = pm.metrics.at("linear_error").mean, proj = pm.metrics.at("projected_error").mean;
    add(r, "m=" + std::to_string(pm.m), proj <= lin, "projected " + g(proj) + " <= linear " + g(lin));
  }
  return r;
}

json matcomp_config(const std::string& id, double nu) {
  return {{"id", id}, {"d", 100}, {"r", 2}, {"p_grid", {0.1, 0.2, 0.4}}, {"zeta", 1.0}, {"nu", nu}, {"trials", 50},
          {"master_seed", 1005}};
}

CriterionResult criterion5(const AcceptanceOptions& opts) {
  CriterionResult r{5, "matrix completion", {}, {}};
  for (double nu : {0.0, 1.0}) {
    const std::string id = nu == 0.0 ? "c5_matcomp_noiseless" : "c5_matcomp_noisy";
    const MatCompResult res = run_matcomp_and_store(matcomp_config(id, nu), opts);
    for (const auto& pp : res.per_p) {
      const std::string at = id + " p=" + g(pp.p);
      add(r, "sample size " + at, !pp.below_d_log_d, "m = " + g(pp.m) + " >= d log d");
      add(r, "rate bound " + at, pp.entry_error.mean <= pp.bound,
          "(1/d)||Xhat - X||_F " + g(pp.entry_error.mean) + " <= " + g(pp.bound));
    }
    check_slope(r, id + " slope", res.fit, -0.6, -0.4);
  }
  return r;
}

CriterionResult criterion6(const AcceptanceOptions& opts) {
  CriterionResult r{6, "l1-ball bound satisfaction", {}, {}};
  const json cfg = {{"id", "c6_l1_ball"},
                    {"n", 2000},
                    {"set", {{"type", "l1_ball"}, {"radius", 2.0}}},
                    {"model", {{"link", "identity"}, {"pre_noise", {{"type", "gaussian"}, {"nu", 1.0}}}}},
                    {"norm_x", 1.0},
                    {"m_grid", {50, 100, 200, 400, 800}},
                    {"trials", 200},
                    {"master_seed", 1006},
                    {"metrics", {"linear_error", "projected_error"}},
                    {"width_samples", 1000}};
  const ExperimentResult res = run_and_store(cfg, opts);
  for (const auto& pm : res.per_m) {
    const std::string at = " m=" + std::to_string(pm.m);
    const auto& proj = pm.metrics.at("projected_error");
    check_dominated(r, "main bound" + at, proj, pm.bounds.at("thm_main"));
    check_dominated(r, "global width bound" + at, proj, pm.bounds.at("global_width"));
    check_dominated(r, "noisy linear bound" + at, proj, pm.bounds.at("corollary_noisy_linear"));
  }
  return r;
}

CriterionResult criterion7(const AcceptanceOptions&) {
  CriterionResult r{7, "projection oracles", {}, {}};
  Rng rng(1007);
  double l1_dev = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(6));
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 2.0 * rng.normal();
    const double radius = 0.1 + 2.9 * rng.uniform();
    l1_dev = std::max(l1_dev, (project_l1_ball(v, radius) - oracle::l1_projection_kkt(v, radius)).lpNorm<Eigen::Infinity>());
  }
  add(r, "l1 projection vs KKT enumeration", l1_dev <= 1e-9, "max deviation " + g(l1_dev) + " over 1000 instances");

  int mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    Vector v(8);
    for (Eigen::Index i = 0; i < 8; ++i) v(i) = rng.normal();
    if (hard_threshold(v, 3) != oracle::best_sparse_by_enumeration(v, 3)) ++mismatches;
  }
  add(r, "hard threshold vs support enumeration", mismatches == 0, std::to_string(mismatches) + " of 1000 differ");

  double svd_dev = 0.0;
  for (int k = 0; k < 200; ++k) {
    Matrix a(5, 4);
    for (Eigen::Index j = 0; j < 4; ++j)
      for (Eigen::Index i = 0; i < 5; ++i) a(i, j) = rng.normal();
    const double err = (a - svd_hard_threshold(a, 2)).norm();
    svd_dev = std::max(svd_dev, std::fabs(err - oracle::eckart_young_error(a, 2)));
  }
  add(r, "svd threshold vs Eckart-Young", svd_dev <= 1e-9, "max deviation " + g(svd_dev) + " over 200 instances");
  return r;
}

CriterionResult criterion8(const AcceptanceOptions&) {
  CriterionResult r{8, "geometry invariants", {}, {}};
  const std::uint64_t base = 1008;
  const std::int64_t N = 4000;

  // w_t / t constant on cones, from independent draws per scale
  for (const auto& set : {FeasibleSet::sparse_cone(200, 5), FeasibleSet::low_rank_cone(10, 12, 2)}) {
    const WidthEstimate w1 = local_mean_width(set, 1.0, N, derive_seed(base, 1));
    int i = 2;
    for (double t : {0.5, 2.0}) {
      const WidthEstimate wt = local_mean_width(set, t, N, derive_seed(base, static_cast<std::uint64_t>(i++)));
      const double diff = std::fabs(wt.value / t - w1.value);
      const double tol = 3.0 * std::hypot(wt.std_error / t, w1.std_error);
      add(r, "homogeneity " + set.name() + " t=" + g(t), diff <= tol, "|w_t/t - w_1| = " + g(diff) + " <= " + g(tol));
    }
  }

  const double floor = std::sqrt(2.0 / M_PI);
  for (const auto& set : {FeasibleSet::sparse_cone(200, 1), FeasibleSet::low_rank_cone(10, 12, 1), FeasibleSet::full_space(3)}) {
    const WidthEstimate w = local_mean_width(set, 1.0, N, derive_seed(base, 10));
    add(r, "cone floor " + set.name(), w.value >= floor - 3.0 * w.std_error,
        "w_1 " + g(w.value) + " >= sqrt(2/pi) - 3 SE");
  }

  for (const auto& set : {FeasibleSet::l1_ball(100, 2.0), FeasibleSet::sparse_cone(100, 3), FeasibleSet::euclidean_ball(100, 1.0)}) {
    for (double t : {0.1, 1.0, 10.0}) {
      const WidthEstimate w = local_mean_width(set, t, 1000, derive_seed(base, 11));
      const double cap = t * std::sqrt(100.0);
      add(r, "w_t <= t sqrt(n) " + set.name() + " t=" + g(t), w.value <= cap + 3.0 * w.std_error,
          g(w.value) + " <= " + g(cap));
    }
  }

  {
    const auto set = FeasibleSet::l1_ball(200, 2.0);
    const std::vector<double> ts = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    const auto ws = local_mean_width_grid(set, ts, 2000, derive_seed(base, 12));
    bool ok = true;
    std::string detail = "w_t/t:";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      detail += " " + g(ws[i].value / ts[i]);
      if (i > 0 && ws[i].value / ts[i] > ws[i - 1].value / ts[i - 1] + 3.0 * ws[i].std_error / ts[i]) ok = false;
    }
    add(r, "l1 ball w_t/t non-increasing", ok, detail);
    const WidthEstimate wg = global_mean_width(set, 2000, derive_seed(base, 13));
    bool dom = true;
    for (const auto& w : ws) dom = dom && w.value <= wg.value + 3.0 * std::hypot(w.std_error, wg.std_error);
    add(r, "l1 ball w_t <= w", dom, "global width " + g(wg.value) + ", largest local " + g(ws.back().value));
  }

  {
    const auto set = FeasibleSet::low_rank_cone(50, 50, 2);
    const WidthEstimate w = local_mean_width(set, 1.0, 500, derive_seed(base, 14));
    const double bound = width_bound_formula(set);
    add(r, "low-rank width bound", w.value <= bound + 3.0 * w.std_error, g(w.value) + " <= " + g(bound));
    // The closed form matches sup over K cap B_2 (top r singular values), not over K - K.
    Rng rng(derive_seed(base, 16));
    double one_sided = 0.0;
    const int reps = 500;
    for (int k = 0; k < reps; ++k) {
      Matrix gm(50, 50);
      for (Eigen::Index j = 0; j < 50; ++j)
        for (Eigen::Index i = 0; i < 50; ++i) gm(i, j) = rng.normal();
      const Vector sv = Eigen::BDCSVD<Matrix>(gm).singularValues();
      one_sided += std::sqrt(sv.head(2).squaredNorm()) / reps;
    }
    r.notes.push_back("rank-2 50x50: width over K - K (rank 4 differences) " + g(w.value) +
                      ", one-sided E sup over K cap B_2 " + g(one_sided) + ", closed form " + g(bound));
  }

  {
    const auto set = FeasibleSet::sparse_cone(1000, 10);
    const WidthEstimate w = local_mean_width(set, 1.0, 2000, derive_seed(base, 15));
    const double ref = std::sqrt(10.0 * std::log(2.0 * 1000.0 / 10.0));
    add(r, "sparse width envelope", w.value >= 0.5 * ref && w.value <= 2.0 * ref,
        g(w.value) + " in [" + g(0.5 * ref) + ", " + g(2.0 * ref) + "]");
  }

  for (std::int64_t s : {1, 2}) {
    const auto set = FeasibleSet::sparse_cone(20, s);
    const MinimaxRadii mr = minimax_radii(set, 1.0, 50, default_t_grid(1.0, 50), {}, derive_seed(base, 20 + static_cast<std::uint64_t>(s)));
    const bool have = mr.alpha_at_scale.has_value();
    add(r, "alpha at scale " + set.name(), have && *mr.alpha_at_scale <= 10.0,
        have ? "alpha " + g(*mr.alpha_at_scale) + " <= 10 (packing " + std::to_string(mr.packing_at_scale) + ")"
             : "packing at scale below 2");
    bool sudakov = true;
    for (std::size_t i = 0; i < mr.t_grid.size(); ++i) {
      const double lhs = mr.t_grid[i] * std::sqrt(std::log(static_cast<double>(mr.packings[i])));
      if (lhs > mr.widths[i].value / 0.2) sudakov = false;
    }
    add(r, "Sudakov direction " + set.name(), sudakov, "t sqrt(log P_t) <= w_t / 0.2 on the grid");
    const bool sane = std::isfinite(mr.delta_lower) && std::isfinite(mr.delta_upper) && mr.delta_lower >= 0.0 &&
                      mr.delta_upper >= 0.0;
    add(r, "minimax radii finite " + set.name(), sane,
        "delta_lower " + g(mr.delta_lower) + ", delta_upper " + g(mr.delta_upper));
  }
  return r;
}

CriterionResult criterion9(const AcceptanceOptions&) {
  CriterionResult r{9, "C_f rescaling inequality", {}, {}};
  const std::vector<std::pair<std::string, LinkFunction>> links = {
      {"sign", LinkFunction::sign()}, {"identity", LinkFunction::identity()}, {"cube", LinkFunction::odd_monomial(3)}};
  for (const auto& [name, f] : links) {
    const CfConstant cf = compute_cf(f);
    int printed_fail = 0, literal_fail = 0;
    double worst = 0.0;
    for (double nx : {0.1, 1.0, 10.0}) {
      for (double nu : {0.1, 1.0, 10.0}) {
        ObservationModel m;
        m.link = f;
        m.pre_noise = NoiseDist::gaussian(nu);
        const ModelParams p = auto_params(m, nx, 1009);
        const double lhs = require_lambda(p) * (p.sigma + p.eta);
        const double scale = nx + nu;
        worst = std::max(worst, lhs / scale);
        if (lhs > cf.printed * scale) ++printed_fail;
        if (lhs > cf.literal * scale) ++literal_fail;
        add(r, name + " |x|=" + g(nx) + " nu=" + g(nu), lhs <= cf.value * scale,
            "lambda (sigma + eta) = " + g(lhs) + " <= C_f (|x| + nu) = " + g(cf.value * scale));
      }
    }
    r.notes.push_back(name + ": C_f = " + g(cf.value) + ", largest lambda (sigma + eta) / (|x| + nu) = " + g(worst) +
                      "; the constant 48^(1/4) Pr(|g| <= 1) M = " + g(cf.printed) + " fails " +
                      std::to_string(printed_fail) + "/9, 48^(1/4) Pr(|g| >= 1) M = " + g(cf.literal) + " fails " +
                      std::to_string(literal_fail) + "/9");
  }
  return r;
}

CriterionResult criterion10(const AcceptanceOptions&) {
  CriterionResult r{10, "determinism", {}, {}};
  const json exp_cfg = c1_config("c10_noisy_linear", {{"link", "identity"}, {"pre_noise", {{"type", "gaussian"}, {"nu", 1.0}}}});
  const json mc_cfg = matcomp_config("c10_matcomp", 1.0);
  auto exp_bytes = [&](int threads) {
    const auto res = run_experiment(experiment_from_json(exp_cfg), threads);
    return dump(to_json(res)) + to_csv(res);
  };
  auto mc_bytes = [&](int threads) {
    const auto res = run_matcomp(matcomp_from_json(mc_cfg), threads);
    return dump(to_json(res)) + to_csv(res);
  };
  const std::string e1 = exp_bytes(1), e1b = exp_bytes(1), e8 = exp_bytes(8), e8b = exp_bytes(8);
  add(r, "experiment repeat, 1 thread", e1 == e1b, std::to_string(e1.size()) + " bytes");
  add(r, "experiment repeat, 8 threads", e8 == e8b, std::to_string(e8.size()) + " bytes");
  add(r, "experiment 1 vs 8 threads", e1 == e8, "");
  const std::string m1 = mc_bytes(1), m1b = mc_bytes(1), m8 = mc_bytes(8);
  add(r, "matcomp repeat, 1 thread", m1 == m1b, std::to_string(m1.size()) + " bytes");
  add(r, "matcomp 1 vs 8 threads", m1 == m8, "");
  return r;
}

}  // namespace

bool CriterionResult::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  switch (id) {
    case 1: return criterion1(opts);
    case 2: return criterion2(opts);
    case 3: return criterion3(opts);
    case 4: return criterion4(opts);
    case 5: return criterion5(opts);
    case 6: return criterion6(opts);
    case 7: return criterion7(opts);
    case 8: return criterion8(opts);
    case 9: return criterion9(opts);
    case 10: return criterion10(opts);
    default: throw ContractViolation("no acceptance criterion " + std::to_string(id));
  }
}

std::vector<CriterionResult> run_acceptance_suite(const AcceptanceOptions& opts, const std::vector<int>& ids) {
  std::vector<int> todo = ids;
  if (todo.empty())
    for (int i = 1; i <= kCriterionCount; ++i) todo.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : todo) out.push_back(run_criterion(id, opts));
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed() ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.title << "\n";
  for (const auto& c : r.checks)
    os << "    " << (c.passed ? "ok  " : "FAIL") << "  " << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
  for (const auto& n : r.notes) os << "    note  " << n << "\n";
  return os.str();
}

}  // namespace geoest::bench
