#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cgann/dataset.hpp"
#include "cgann/search.hpp"

namespace cgann {

// Full benchmark configuration: the nested-search settings plus the dataset
// description, the update modes to benchmark, and output options.
struct HarnessConfig {
    SearchConfig search;
    DatasetSpec dataset;
    std::vector<UpdateMode> modes = {UpdateMode::Sync};
    bool scale_features = true;
    std::string out_dir = "report";
};

// Flat key = value file; '#' starts a comment, unknown or duplicate keys are
// errors. Every key has a documented default except the dataset fields.
HarnessConfig parse_config_file(const std::string& path);
HarnessConfig parse_config_text(const std::string& text, const std::string& origin);

void validate_harness_config(const HarnessConfig& cfg);

// Effective key/value pairs (defaults applied), for the report snapshot.
std::vector<std::pair<std::string, std::string>> config_snapshot(const HarnessConfig& cfg);

}  // namespace cgann
