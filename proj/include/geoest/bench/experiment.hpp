#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoest/bench/config.hpp"
#include "geoest/geometry.hpp"
#include "geoest/types.hpp"

namespace geoest::bench {

struct TrialOutcome {
  std::int64_t m = 0;
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  /// Metric name -> error; NaN marks a failed normalization.
  std::map<std::string, double> values;
};

struct MetricSummary {
  double mean = 0.0;
  /// Empty when fewer than two finite values.
  std::optional<double> std_error;
  double q50 = 0.0, q90 = 0.0, q95 = 0.0;
  std::int64_t n_valid = 0;
  std::int64_t n_failed = 0;
};

/// Least-squares slope of log(mean) against log(m) with a 1.96-SE half width
/// propagated from the per-m standard errors.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::optional<double> half_width;
};

struct PerM {
  std::int64_t m = 0;
  std::map<std::string, MetricSummary> metrics;
  std::map<std::string, double> bounds;
  std::vector<std::uint64_t> trial_seeds;
};

struct ExperimentResult {
  ExperimentConfig config;
  ModelParams params;
  std::vector<double> t_grid;
  std::vector<WidthEstimate> widths;
  std::optional<WidthEstimate> width_unit;    ///< w_1 for cones
  std::optional<WidthEstimate> width_global;  ///< w for bounded sets
  std::uint64_t width_seed = 0;
  std::vector<PerM> per_m;
  std::map<std::string, SlopeFit> fits;
  std::vector<TrialOutcome> trials;  ///< ordered by (m index, trial)
  bool valid = true;
  std::string error;
};

/// Everything that does not depend on the trial draws: model parameters,
/// widths on the bound grid.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return cfg_; }
  const ModelParams& params() const { return params_; }
  double mu() const { return params_.mu; }

  TrialOutcome run_trial(std::int64_t m, std::int64_t trial_index) const;
  /// Unit-norm direction xbar drawn for the given trial seed.
  Vector draw_direction(std::uint64_t trial_seed) const;

  /// Runs every (m, trial) on `threads` workers and aggregates in fixed order.
  ExperimentResult run(int threads = 1) const;

  std::map<std::string, double> bounds_for(std::int64_t m) const;

 private:
  ExperimentConfig cfg_;
  ModelParams params_;
  std::vector<double> t_grid_;
  std::vector<WidthEstimate> widths_;
  std::optional<WidthEstimate> w1_;
  std::optional<WidthEstimate> wglobal_;
  std::uint64_t width_seed_ = 0;
};

/// Convenience: Experiment(config).run(threads).
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 1);

std::uint64_t trial_seed(std::uint64_t master_seed, std::int64_t m, std::int64_t trial_index);

MetricSummary summarize(const std::vector<double>& values);
/// Fit over points with positive finite means; empty with fewer than two.
std::optional<SlopeFit> fit_loglog(const std::vector<double>& x, const std::vector<double>& means,
                                   const std::vector<std::optional<double>>& std_errors);

/// Runs tasks 0..count-1 on `threads` workers. The first exception (by task
/// index) is rethrown after all workers stop; `done[i]` reports completion.
void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& task,
                  std::vector<char>* done = nullptr);

/// Constants of the corollaries.
inline const double kNoisyLinearC = 2.0 * std::sqrt(2.0);
inline const double kNoisyLinearConeC = 2.0 * (std::sqrt(M_PI) + 1.0);
inline const double kBinaryC = std::sqrt(2.0 * M_PI - 4.0) + 2.0;

}  // namespace geoest::bench
