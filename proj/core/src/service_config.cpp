#include "firm/service_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "firm/errors.hpp"

namespace firm {

namespace {

using nlohmann::json;

double parse_a(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
        throw SchemaError("config: 'a' must be a number or \"inf\"");
    }
    return j.get<double>();
}

std::vector<double> normalize_thresholds(std::vector<double> raw, bool reversed,
                                         const char* what) {
    // Reversed orientation lists thresholds in decreasing value order
    // (increasing hazard); negation restores increasing order while keeping
    // each threshold aligned with its weight.
    if (reversed) {
        for (double& t : raw) t = -t;
    }
    for (std::size_t i = 1; i < raw.size(); ++i) {
        if (raw[i] <= raw[i - 1]) {
            throw SchemaError(std::string("config: ") + what +
                              (reversed ? " must be strictly decreasing (reversed orientation)"
                                        : " must be strictly increasing"));
        }
    }
    return raw;
}

} // namespace

FirmSpec ServiceConfig::spec_for(const std::string& location) const {
    const auto it = region_thresholds.find(location);
    if (it == region_thresholds.end()) return spec;
    FirmSpec regional = spec;
    regional.thresholds = it->second;
    return regional;
}

void ServiceConfig::validate() const {
    spec.validate();
    if (!category_labels.empty() && category_labels.size() != spec.category_count()) {
        throw SchemaError("config: need one category label per category (" +
                          std::to_string(spec.category_count()) + ")");
    }
    for (const auto& [region, thresholds] : region_thresholds) {
        FirmSpec regional = spec;
        regional.thresholds = thresholds;
        try {
            regional.validate();
        } catch (const std::invalid_argument& e) {
            throw SchemaError("config: region '" + region + "': " + e.what());
        }
    }
}

ServiceConfig parse_service_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config: invalid JSON: ") + e.what());
    }

    try {
        ServiceConfig out;
        out.schema_version = j.at("schema_version").get<int>();
        if (out.schema_version != 1) {
            throw SchemaError("config: unsupported schema_version " +
                              std::to_string(out.schema_version));
        }
        if (j.contains("name")) out.name = j.at("name").get<std::string>();
        if (j.contains("orientation")) {
            const auto o = j.at("orientation").get<std::string>();
            if (o == "reversed") out.reversed = true;
            else if (o != "standard") {
                throw SchemaError("config: orientation must be 'standard' or 'reversed'");
            }
        }

        out.spec.thresholds = normalize_thresholds(
            j.at("thresholds").get<std::vector<double>>(), out.reversed, "thresholds");
        out.spec.weights = j.at("weights").get<std::vector<double>>();
        out.spec.alpha = j.at("alpha").get<double>();
        out.spec.a = j.contains("a") ? parse_a(j.at("a")) : 0.0;

        if (j.contains("categories")) {
            out.category_labels = j.at("categories").get<std::vector<std::string>>();
        }
        if (j.contains("regions")) {
            for (const auto& [region, body] : j.at("regions").items()) {
                out.region_thresholds[region] = normalize_thresholds(
                    body.at("thresholds").get<std::vector<double>>(), out.reversed,
                    "region thresholds");
            }
        }

        try {
            out.validate();
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("config: ") + e.what());
        }
        return out;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_service_config(buffer.str());
}

std::string service_config_to_json(const ServiceConfig& config) {
    json j;
    j["schema_version"] = config.schema_version;
    if (!config.name.empty()) j["name"] = config.name;
    if (config.reversed) j["orientation"] = "reversed";

    const auto denormalize = [&](std::vector<double> thresholds) {
        if (config.reversed) {
            for (double& t : thresholds) t = -t;
        }
        return thresholds;
    };
    j["thresholds"] = denormalize(config.spec.thresholds);
    j["weights"] = config.spec.weights;
    j["alpha"] = config.spec.alpha;
    if (std::isinf(config.spec.a)) j["a"] = "inf";
    else j["a"] = config.spec.a;
    if (!config.category_labels.empty()) j["categories"] = config.category_labels;
    if (!config.region_thresholds.empty()) {
        json regions = json::object();
        for (const auto& [region, thresholds] : config.region_thresholds) {
            regions[region] = {{"thresholds", denormalize(thresholds)}};
        }
        j["regions"] = regions;
    }
    return j.dump(2);
}

} // namespace firm
