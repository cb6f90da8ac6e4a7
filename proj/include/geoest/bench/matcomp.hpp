#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoest/bench/config.hpp"
#include "geoest/bench/experiment.hpp"

namespace geoest::bench {

struct MatCompTrial {
  double p = 0.0;
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  std::int64_t observed = 0;
  double entry_error = 0.0;     ///< ||Xhat - X||_F / d
  double relative_error = 0.0;  ///< ||Xhat - X||_F / ||X||_F
};

struct MatCompPerP {
  double p = 0.0;
  double m = 0.0;  ///< expected sample count p d^2
  bool below_d_log_d = false;
  MetricSummary entry_error;
  MetricSummary relative_error;
  double bound = 0.0;  ///< 3 sqrt(r d / m) (zeta + nu)
  std::vector<std::uint64_t> trial_seeds;
};

struct MatCompResult {
  MatCompConfig config;
  std::vector<MatCompPerP> per_p;
  std::optional<SlopeFit> fit;  ///< slope of mean entry error against m
  std::vector<MatCompTrial> trials;
  bool valid = true;
  std::string error;
};

inline constexpr double kCompletionEnvelope = 3.0;

/// d x r Gaussian factors, X = U V^T rescaled so that max |X_ij| = zeta.
Matrix completion_truth(std::int64_t d, std::int64_t r, double zeta, std::uint64_t seed);

MatCompTrial run_matcomp_trial(const MatCompConfig& config, std::size_t p_index, std::int64_t trial_index);
MatCompResult run_matcomp(const MatCompConfig& config, int threads = 1);

}  // namespace geoest::bench
