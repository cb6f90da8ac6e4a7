#include "geoest/bench/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "geoest/geometry.hpp"

namespace geoest::bench {

using nlohmann::json;

namespace {

int line_at(const std::string& text, std::size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

bool is_index(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Wraps construction errors of the core types as config errors.
template <class F>
auto guarded(const ConfigSource& src, const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    src.fail(path, e.what());
  }
}

void reject_unknown(const ConfigSource& src, const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; });
    if (!ok) src.fail(join(path, it.key()), "unknown key \"" + it.key() + "\"");
  }
}

}  // namespace

ConfigSource::ConfigSource(std::string text, std::string origin) : text_(std::move(text)), origin_(std::move(origin)) {
  try {
    root_ = json::parse(text_);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << origin_ << ":" << line_at(text_, e.byte == 0 ? 0 : e.byte - 1) << ": invalid JSON: " << e.what();
    throw ConfigError(os.str());
  }
  if (!root_.is_object()) throw ConfigError(origin_ + ":1: top-level value must be an object");
}

ConfigSource ConfigSource::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ":0: cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ConfigSource(ss.str(), path);
}

int ConfigSource::line_of(const std::string& path) const {
  std::size_t pos = 0;
  std::size_t found = std::string::npos;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (is_index(part)) continue;
    const auto p = text_.find("\"" + part + "\"", pos);
    if (p == std::string::npos) break;
    found = p;
    pos = p + part.size() + 2;
  }
  return found == std::string::npos ? 1 : line_at(text_, found);
}

void ConfigSource::fail(const std::string& path, const std::string& message) const {
  std::ostringstream os;
  os << origin_ << ":" << line_of(path) << ": " << (path.empty() ? "" : path + ": ") << message;
  throw ConfigError(os.str());
}

const json& ConfigSource::require(const json& j, const std::string& path, const std::string& key) const {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, "missing required key \"" + key + "\"");
  return *it;
}

double ConfigSource::number(const json& j, const std::string& path) const {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

std::int64_t ConfigSource::integer(const json& j, const std::string& path) const {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9e15) return static_cast<std::int64_t>(v);
  }
  fail(path, "expected an integer");
}

std::uint64_t ConfigSource::unsigned_integer(const json& j, const std::string& path) const {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  fail(path, "expected a non-negative integer");
}

std::string ConfigSource::string(const json& j, const std::string& path) const {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> ConfigSource::numbers(const json& j, const std::string& path) const {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], join(path, std::to_string(i))));
  return out;
}

std::vector<std::int64_t> ConfigSource::integers(const json& j, const std::string& path) const {
  if (!j.is_array()) fail(path, "expected an array of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], join(path, std::to_string(i))));
  return out;
}

// ---------------------------------------------------------------------------

FeasibleSet parse_set(const ConfigSource& src, const json& j, const std::string& path,
                      std::optional<std::int64_t> n) {
  const std::string type = j.is_string() ? j.get<std::string>() : src.string(src.require(j, path, "type"), join(path, "type"));
  auto need_n = [&]() -> std::int64_t {
    if (j.is_object() && j.contains("n")) return src.integer(j["n"], join(path, "n"));
    if (!n) src.fail(path, "set \"" + type + "\" needs the ambient dimension \"n\"");
    return *n;
  };
  return guarded(src, path, [&]() -> FeasibleSet {
    if (type == "full_space") return FeasibleSet::full_space(need_n());
    if (!j.is_object()) src.fail(path, "set \"" + type + "\" needs parameters");
    if (type == "sparse_cone") {
      reject_unknown(src, j, path, {"type", "n", "s"});
      return FeasibleSet::sparse_cone(need_n(), src.integer(src.require(j, path, "s"), join(path, "s")));
    }
    if (type == "low_rank_cone") {
      reject_unknown(src, j, path, {"type", "n", "d1", "d2", "r"});
      const auto d1 = src.integer(src.require(j, path, "d1"), join(path, "d1"));
      const auto d2 = src.integer(src.require(j, path, "d2"), join(path, "d2"));
      if (n && *n != d1 * d2) src.fail(path, "n must equal d1 * d2");
      return FeasibleSet::low_rank_cone(d1, d2, src.integer(src.require(j, path, "r"), join(path, "r")));
    }
    if (type == "l1_ball") {
      reject_unknown(src, j, path, {"type", "n", "radius"});
      return FeasibleSet::l1_ball(need_n(), src.number(src.require(j, path, "radius"), join(path, "radius")));
    }
    if (type == "euclidean_ball") {
      reject_unknown(src, j, path, {"type", "n", "radius"});
      return FeasibleSet::euclidean_ball(need_n(), src.number(src.require(j, path, "radius"), join(path, "radius")));
    }
    src.fail(join(path, "type"), "unknown set type \"" + type + "\"");
  });
}

LinkFunction parse_link(const ConfigSource& src, const json& j, const std::string& path) {
  const std::string type = j.is_string() ? j.get<std::string>() : src.string(src.require(j, path, "type"), join(path, "type"));
  return guarded(src, path, [&]() -> LinkFunction {
    if (type == "identity") return LinkFunction::identity();
    if (type == "sign") return LinkFunction::sign();
    if (!j.is_object()) src.fail(path, "link \"" + type + "\" needs parameters");
    if (type == "odd_monomial")
      return LinkFunction::odd_monomial(static_cast<int>(src.integer(src.require(j, path, "k"), join(path, "k"))));
    if (type == "linear_combination") {
      const auto w = src.numbers(src.require(j, path, "weights"), join(path, "weights"));
      const auto& parts = src.require(j, path, "parts");
      if (!parts.is_array()) src.fail(join(path, "parts"), "expected an array of links");
      std::vector<LinkFunction> fs;
      for (std::size_t i = 0; i < parts.size(); ++i)
        fs.push_back(parse_link(src, parts[i], join(join(path, "parts"), std::to_string(i))));
      return LinkFunction::linear_combination(w, std::move(fs));
    }
    src.fail(path, "unknown link \"" + type + "\"");
  });
}

NoiseDist parse_noise(const ConfigSource& src, const json& j, const std::string& path) {
  if (j.is_null()) return NoiseDist::none();
  const std::string type = j.is_string() ? j.get<std::string>() : src.string(src.require(j, path, "type"), join(path, "type"));
  return guarded(src, path, [&]() -> NoiseDist {
    if (type == "none") return NoiseDist::none();
    if (!j.is_object()) src.fail(path, "noise \"" + type + "\" needs parameters");
    if (type == "gaussian") return NoiseDist::gaussian(src.number(src.require(j, path, "nu"), join(path, "nu")));
    if (type == "logistic")
      return NoiseDist::logistic(src.number(src.require(j, path, "scale"), join(path, "scale")));
    src.fail(path, "unknown noise \"" + type + "\"");
  });
}

ObservationModel parse_model(const ConfigSource& src, const json& j, const std::string& path) {
  if (!j.is_object()) src.fail(path, "expected an object with \"link\"");
  reject_unknown(src, j, path, {"link", "pre_noise", "post_noise"});
  ObservationModel m;
  m.link = parse_link(src, src.require(j, path, "link"), join(path, "link"));
  if (j.contains("pre_noise")) m.pre_noise = parse_noise(src, j["pre_noise"], join(path, "pre_noise"));
  if (j.contains("post_noise")) m.post_noise = parse_noise(src, j["post_noise"], join(path, "post_noise"));
  return m;
}

std::vector<double> parse_t_grid(const ConfigSource& src, const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    out = src.numbers(j, path);
  } else if (j.is_object()) {
    reject_unknown(src, j, path, {"min", "max", "count"});
    const double lo = src.number(src.require(j, path, "min"), join(path, "min"));
    const double hi = src.number(src.require(j, path, "max"), join(path, "max"));
    const auto count = src.integer(src.require(j, path, "count"), join(path, "count"));
    if (!(lo > 0.0) || !(hi >= lo) || count < 1 || count > 100000) src.fail(path, "need 0 < min <= max and count >= 1");
    out = log_grid(lo, hi, static_cast<int>(count));
  } else {
    src.fail(path, "expected a list of scales or {min, max, count}");
  }
  if (out.empty()) src.fail(path, "t grid must not be empty");
  for (double t : out)
    if (!(t > 0.0)) src.fail(path, "scales must be > 0");
  std::sort(out.begin(), out.end());
  return out;
}

json set_to_json(const FeasibleSet& set) {
  return std::visit(
      [&](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparseCone>) return {{"type", "sparse_cone"}, {"n", set.dim()}, {"s", k.s}};
        else if constexpr (std::is_same_v<T, LowRankCone>)
          return {{"type", "low_rank_cone"}, {"d1", k.d1}, {"d2", k.d2}, {"r", k.r}};
        else if constexpr (std::is_same_v<T, L1Ball>) return {{"type", "l1_ball"}, {"n", set.dim()}, {"radius", k.radius}};
        else if constexpr (std::is_same_v<T, EuclideanBall>)
          return {{"type", "euclidean_ball"}, {"n", set.dim()}, {"radius", k.radius}};
        else return {{"type", "full_space"}, {"n", set.dim()}};
      },
      set.variant());
}

json link_to_json(const LinkFunction& f) {
  switch (f.kind()) {
    case LinkFunction::Kind::Identity:
      return "identity";
    case LinkFunction::Kind::Sign:
      return "sign";
    case LinkFunction::Kind::OddMonomial:
      return {{"type", "odd_monomial"}, {"k", f.exponent()}};
    case LinkFunction::Kind::LinearCombination: {
      json parts = json::array();
      for (const auto& p : f.parts()) parts.push_back(link_to_json(p));
      return {{"type", "linear_combination"}, {"weights", f.weights()}, {"parts", parts}};
    }
  }
  return nullptr;
}

json noise_to_json(const NoiseDist& d) {
  switch (d.kind) {
    case NoiseDist::Kind::None:
      return "none";
    case NoiseDist::Kind::Gaussian:
      return {{"type", "gaussian"}, {"nu", d.scale}};
    case NoiseDist::Kind::Logistic:
      return {{"type", "logistic"}, {"scale", d.scale}};
  }
  return nullptr;
}

json model_to_json(const ObservationModel& m) {
  return {{"link", link_to_json(m.link)}, {"pre_noise", noise_to_json(m.pre_noise)},
          {"post_noise", noise_to_json(m.post_noise)}};
}

// ---------------------------------------------------------------------------

ExperimentConfig parse_experiment(const ConfigSource& src) {
  const json& j = src.root();
  reject_unknown(src, j, "",
                 {"id", "n", "set", "model", "norm_x", "signal", "m_grid", "trials", "master_seed", "metrics", "t_grid",
                  "width_samples", "mc_samples"});
  ExperimentConfig c;
  if (j.contains("id")) c.id = src.string(j["id"], "id");
  if (c.id.empty() || c.id.find_first_of("/\\ ") != std::string::npos) src.fail("id", "id must be a non-empty file-safe name");
  std::optional<std::int64_t> n;
  if (j.contains("n")) n = src.integer(j["n"], "n");
  c.set = parse_set(src, src.require(j, "", "set"), "set", n);
  c.model = parse_model(src, src.require(j, "", "model"), "model");
  if (j.contains("norm_x")) c.norm_x = src.number(j["norm_x"], "norm_x");
  if (!(c.norm_x > 0.0)) src.fail("norm_x", "norm_x must be > 0");

  if (j.contains("signal")) {
    const json& s = j["signal"];
    if (s.is_string() && s.get<std::string>() == "random") {
    } else if (s.is_object()) {
      const std::string type = src.string(src.require(s, "signal", "type"), "signal.type");
      if (type == "fixed") {
        const auto vals = src.numbers(src.require(s, "signal", "values"), "signal.values");
        if (static_cast<Eigen::Index>(vals.size()) != c.set.dim())
          src.fail("signal.values", "fixed signal has " + std::to_string(vals.size()) + " entries, set dimension is " +
                                        std::to_string(c.set.dim()));
        c.fixed_signal = Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        const double nrm = c.fixed_signal->norm();
        if (!(nrm > 0.0)) src.fail("signal.values", "fixed signal must be nonzero");
        c.norm_x = nrm;
      } else if (type != "random") {
        src.fail("signal.type", "expected \"random\" or \"fixed\"");
      }
    } else {
      src.fail("signal", "expected \"random\" or {\"type\": \"fixed\", \"values\": [...]}");
    }
  }

  c.m_grid = src.integers(src.require(j, "", "m_grid"), "m_grid");
  if (c.m_grid.empty()) src.fail("m_grid", "m_grid must not be empty");
  for (auto m : c.m_grid)
    if (m < 1) src.fail("m_grid", "every m must be >= 1");
  if (j.contains("trials")) c.trials = src.integer(j["trials"], "trials");
  if (c.trials < 1) src.fail("trials", "trials must be >= 1");
  if (j.contains("master_seed")) c.master_seed = src.unsigned_integer(j["master_seed"], "master_seed");
  if (j.contains("metrics")) {
    const json& ms = j["metrics"];
    if (!ms.is_array() || ms.empty()) src.fail("metrics", "expected a non-empty array of metric names");
    c.metrics.clear();
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string name = src.string(ms[i], "metrics");
      if (std::find(kAllMetrics.begin(), kAllMetrics.end(), name) == kAllMetrics.end())
        src.fail("metrics", "unknown metric \"" + name + "\"");
      if (std::find(c.metrics.begin(), c.metrics.end(), name) == c.metrics.end()) c.metrics.push_back(name);
    }
  }
  if (j.contains("t_grid")) c.t_grid = parse_t_grid(src, j["t_grid"], "t_grid");
  if (j.contains("width_samples")) c.width_samples = src.integer(j["width_samples"], "width_samples");
  if (c.width_samples < 100) src.fail("width_samples", "width_samples must be >= 100");
  if (j.contains("mc_samples")) c.mc_samples = src.integer(j["mc_samples"], "mc_samples");
  if (c.mc_samples < 1000) src.fail("mc_samples", "mc_samples must be >= 1000");

  // Ball membership of mu * xbar needs mu and is checked when the experiment is prepared.
  if (c.fixed_signal && c.set.is_cone() && !contains(c.set, Signal(*c.fixed_signal)))
    src.fail("signal.values", "fixed signal is not in " + c.set.name());

  c.echo = j;
  c.echo["master_seed"] = c.master_seed;
  return c;
}

ExperimentConfig experiment_from_json(const json& j, const std::string& origin) {
  return parse_experiment(ConfigSource(j.dump(2), origin));
}

MatCompConfig parse_matcomp(const ConfigSource& src) {
  const json& j = src.root();
  reject_unknown(src, j, "", {"id", "d", "r", "p_grid", "zeta", "nu", "trials", "master_seed"});
  MatCompConfig c;
  if (j.contains("id")) c.id = src.string(j["id"], "id");
  if (c.id.empty() || c.id.find_first_of("/\\ ") != std::string::npos) src.fail("id", "id must be a non-empty file-safe name");
  c.d = src.integer(src.require(j, "", "d"), "d");
  if (c.d < 1) src.fail("d", "d must be >= 1");
  c.r = src.integer(src.require(j, "", "r"), "r");
  if (c.r < 1 || c.r > c.d) src.fail("r", "need 1 <= r <= d");
  c.p_grid = src.numbers(src.require(j, "", "p_grid"), "p_grid");
  if (c.p_grid.empty()) src.fail("p_grid", "p_grid must not be empty");
  for (double p : c.p_grid)
    if (!(p > 0.0 && p <= 1.0)) src.fail("p_grid", "every p must lie in (0, 1]");
  if (j.contains("zeta")) c.zeta = src.number(j["zeta"], "zeta");
  if (!(c.zeta > 0.0)) src.fail("zeta", "zeta must be > 0");
  if (j.contains("nu")) c.nu = src.number(j["nu"], "nu");
  if (!(c.nu >= 0.0)) src.fail("nu", "nu must be >= 0");
  if (j.contains("trials")) c.trials = src.integer(j["trials"], "trials");
  if (c.trials < 1) src.fail("trials", "trials must be >= 1");
  if (j.contains("master_seed")) c.master_seed = src.unsigned_integer(j["master_seed"], "master_seed");
  c.echo = j;
  c.echo["master_seed"] = c.master_seed;
  return c;
}

MatCompConfig matcomp_from_json(const json& j, const std::string& origin) {
  return parse_matcomp(ConfigSource(j.dump(2), origin));
}

}  // namespace geoest::bench
