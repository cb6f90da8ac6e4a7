#pragma once

#include <string>

#include <json.hpp>

#include "geoest/bench/experiment.hpp"
#include "geoest/bench/matcomp.hpp"
#include "geoest/geometry.hpp"

namespace geoest::bench {

/// Objects have sorted keys; non-finite numbers become null.
nlohmann::json to_json(const ExperimentResult& r);
nlohmann::json to_json(const MatCompResult& r);
nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const WidthEstimate& w);
nlohmann::json to_json(const MinimaxRadii& r);
nlohmann::json to_json(const MetricSummary& s);

/// Long-form rows "experiment_id,m,trial,metric,value", values with 17 significant digits.
std::string to_csv(const ExperimentResult& r);
std::string to_csv(const MatCompResult& r);

/// %.17g, with "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Pretty JSON text followed by a newline.
std::string dump(const nlohmann::json& j);

void write_text(const std::string& path, const std::string& text);

}  // namespace geoest::bench
