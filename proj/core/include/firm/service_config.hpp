#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "firm/scoring.hpp"

namespace firm {

/// A FIRM service definition as loaded from a JSON config: the FirmSpec,
/// optional category labels, optional per-location threshold overrides, and
/// the hazard orientation. With reversed orientation the config lists
/// thresholds in decreasing value order (hazard grows downward, e.g. extreme
/// cold); they are negated at load time so the rest of the library sees one
/// convention, and datasets must be ingested with value negation switched on.
struct ServiceConfig {
    int schema_version = 1;
    std::string name;
    std::vector<std::string> category_labels; // size N+1
    FirmSpec spec;                            // normalized (negated if reversed)
    bool reversed = false;
    std::map<std::string, std::vector<double>> region_thresholds; // normalized

    /// The spec to use for a given location (regional threshold override if
    /// one exists, the base spec otherwise).
    const FirmSpec& base_spec() const { return spec; }
    FirmSpec spec_for(const std::string& location) const;

    void validate() const;
};

ServiceConfig parse_service_config(const std::string& json_text);
ServiceConfig load_service_config(const std::filesystem::path& path);

/// Serialize back to the JSON schema (thresholds shown in the orientation
/// they were authored in).
std::string service_config_to_json(const ServiceConfig& config);

} // namespace firm
