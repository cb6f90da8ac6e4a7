#include "geoest/bench/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geoest/errors.hpp"

#ifndef GEOEST_VERSION
#define GEOEST_VERSION "unknown"
#endif

namespace geoest::bench {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json fit_json(const SlopeFit& f) {
  return {{"slope", num(f.slope)}, {"intercept", num(f.intercept)}, {"half_width_95", opt(f.half_width)}};
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw ResourceError("failed writing " + path);
}

json to_json(const ModelParams& p) {
  json j = {{"mu", num(p.mu)},          {"sigma", num(p.sigma)}, {"eta", num(p.eta)},
            {"lambda", opt(p.lambda)},  {"psi", opt(p.psi)},     {"c_f", opt(p.c_f)},
            {"method", p.method}};
  if (p.std_errors) {
    j["stderr_mu"] = num(p.std_errors->mu);
    j["stderr_sigma"] = num(p.std_errors->sigma);
    j["stderr_eta"] = num(p.std_errors->eta);
  } else {
    j["stderr_mu"] = j["stderr_sigma"] = j["stderr_eta"] = nullptr;
  }
  return j;
}

json to_json(const WidthEstimate& w) {
  return {{"value", num(w.value)}, {"stderr", num(w.std_error)}, {"n_samples", w.n_samples},
          {"t", w.scale_t ? num(*w.scale_t) : json("global")}};
}

json to_json(const MinimaxRadii& r) {
  json widths = json::array();
  for (const auto& w : r.widths) widths.push_back(to_json(w));
  return {{"delta_lower", num(r.delta_lower)},
          {"delta_upper", num(r.delta_upper)},
          {"alpha_sup", opt(r.alpha_sup)},
          {"alpha_at_scale", opt(r.alpha_at_scale)},
          {"scale_half", num(r.scale_half)},
          {"width_at_scale", to_json(r.width_at_scale)},
          {"packing_at_scale", r.packing_at_scale},
          {"t_grid", r.t_grid},
          {"widths", widths},
          {"packings", r.packings},
          {"diam", r.diam ? num(*r.diam) : json("unbounded")},
          {"note", "widths are Monte Carlo estimates and packings are greedy lower bounds"}};
}

json to_json(const MetricSummary& s) {
  return {{"mean", num(s.mean)}, {"stderr", opt(s.std_error)}, {"q50", num(s.q50)},      {"q90", num(s.q90)},
          {"q95", num(s.q95)},   {"n_valid", s.n_valid},       {"n_failed", s.n_failed}};
}

json to_json(const ExperimentResult& r) {
  json per_m = json::array();
  for (const auto& pm : r.per_m) {
    json metrics = json::object();
    for (const auto& [k, s] : pm.metrics) metrics[k] = to_json(s);
    json bounds = json::object();
    for (const auto& [k, v] : pm.bounds) bounds[k] = num(v);
    per_m.push_back({{"m", pm.m}, {"metrics", metrics}, {"bounds", bounds}, {"trial_seeds", pm.trial_seeds}});
  }
  json fits = json::object();
  for (const auto& [k, f] : r.fits) fits[k] = fit_json(f);
  json widths = json::array();
  for (const auto& w : r.widths) widths.push_back(to_json(w));
  return {{"kind", "experiment"},
          {"id", r.config.id},
          {"valid", r.valid},
          {"error", r.valid ? json(nullptr) : json(r.error)},
          {"params", to_json(r.params)},
          {"per_m", per_m},
          {"fits", fits},
          {"bound_grid", {{"t", r.t_grid}, {"widths", widths}}},
          {"width_unit", r.width_unit ? to_json(*r.width_unit) : json(nullptr)},
          {"width_global", r.width_global ? to_json(*r.width_global) : json(nullptr)},
          {"provenance",
           {{"config", r.config.echo},
            {"version", GEOEST_VERSION},
            {"master_seed", r.config.master_seed},
            {"width_seed", r.width_seed}}}};
}

json to_json(const MatCompResult& r) {
  json per_p = json::array();
  for (const auto& pp : r.per_p)
    per_p.push_back({{"p", num(pp.p)},
                     {"m", num(pp.m)},
                     {"below_d_log_d", pp.below_d_log_d},
                     {"entry_error", to_json(pp.entry_error)},
                     {"relative_error", to_json(pp.relative_error)},
                     {"bound", num(pp.bound)},
                     {"trial_seeds", pp.trial_seeds}});
  return {{"kind", "matcomp"},
          {"id", r.config.id},
          {"valid", r.valid},
          {"error", r.valid ? json(nullptr) : json(r.error)},
          {"per_p", per_p},
          {"fit", r.fit ? fit_json(*r.fit) : json(nullptr)},
          {"provenance",
           {{"config", r.config.echo}, {"version", GEOEST_VERSION}, {"master_seed", r.config.master_seed}}}};
}

std::string to_csv(const ExperimentResult& r) {
  std::ostringstream os;
  os << "experiment_id,m,trial,metric,value\n";
  for (const auto& t : r.trials)
    for (const auto& [k, v] : t.values)
      os << r.config.id << ',' << t.m << ',' << t.trial << ',' << k << ',' << format_double(v) << '\n';
  return os.str();
}

std::string to_csv(const MatCompResult& r) {
  std::ostringstream os;
  os << "experiment_id,m,trial,metric,value\n";
  const double d2 = static_cast<double>(r.config.d) * static_cast<double>(r.config.d);
  for (const auto& t : r.trials) {
    const std::string m = format_double(t.p * d2);
    os << r.config.id << ',' << m << ',' << t.trial << ",entry_error," << format_double(t.entry_error) << '\n';
    os << r.config.id << ',' << m << ',' << t.trial << ",relative_error," << format_double(t.relative_error) << '\n';
  }
  return os.str();
}

}  // namespace geoest::bench
