#pragma once

// JSON and CSV serialization for configs, samples, traces and reports.

#include <json.hpp>
#include <string>

#include "npiv/adaptive.hpp"
#include "npiv/datagen.hpp"
#include "npiv/estimator.hpp"
#include "npiv/experiment.hpp"
#include "npiv/rates.hpp"

namespace npiv {

using json = nlohmann::json;

// "point:0.3", "average:0.5", "wad", "custom:1,0.5[;s=1]". ConfigError on bad input.
RepresenterKind parse_representer(const std::string& text);
json representer_to_json(const RepresenterKind& kind);
RepresenterKind representer_from_json(const json& j);

OperatorSpec spec_from_json(const json& j);
json spec_to_json(const OperatorSpec& spec);

PhiDescriptor phi_from_json(const json& j);
json phi_to_json(const PhiDescriptor& d);

// Missing keys keep their defaults. ConfigError on malformed input.
ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

json report_to_json(const MonteCarloReport& rep);
// Columns n,mse,mean_m,threshold_freq.
void write_report_csv(const MonteCarloReport& rep, const std::string& path);

// CSV "y,z,w" plus a JSON sidecar at path + ".json".
void write_sample(const Sample& sample, const OperatorSpec& spec, const std::string& path);
// Reads the CSV; n, seed and sigma_v come from the sidecar when present.
Sample read_sample(const std::string& path);

json trace_to_json(const EstimateTrace& tr);
json trace_to_json(const SelectionTrace& tr);
json rate_report_to_json(const RateReport& rep);
json rate_order_to_json(const RateOrder& r);

void write_json(const json& j, const std::string& path);

}  // namespace npiv
