#include "firm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "firm/errors.hpp"

namespace firm {

namespace {

const char* kHeader = "location,date,lead_days,forecast,observation";

std::string format_double(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

double parse_double(const std::string& text, int line, const char* what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last || std::isnan(v)) {
        throw SchemaError(std::string(what) + ": '" + text + "' is not a number", line);
    }
    return v;
}

int parse_int(const std::string& text, int line, const char* what) {
    int v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) {
        throw SchemaError(std::string(what) + ": '" + text + "' is not an integer", line);
    }
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

// key=value pairs after the leading "dist=<kind>" field
std::vector<std::pair<std::string, std::string>> parse_fields(
    const std::vector<std::string>& parts, int line) {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos) {
            throw SchemaError("distribution token: expected key=value, got '" + parts[i] + "'",
                              line);
        }
        out.emplace_back(parts[i].substr(0, eq), parts[i].substr(eq + 1));
    }
    return out;
}

PredictiveDistribution build_from_quantile_pairs(std::vector<std::pair<double, double>> pairs,
                                                 int line) {
    std::sort(pairs.begin(), pairs.end());
    PiecewiseLinearCdf cdf;
    for (const auto& [prob, value] : pairs) {
        if (!(prob > 0.0 && prob < 1.0)) {
            throw SchemaError("dist=quantiles: probabilities must lie strictly in (0,1)", line);
        }
        if (!cdf.knots.empty()) {
            if (value <= cdf.knots.back().value || prob <= cdf.knots.back().cum_prob) {
                throw SchemaError(
                    "dist=quantiles: quantile values and probabilities must be strictly "
                    "increasing",
                    line);
            }
        }
        cdf.knots.push_back({value, prob});
    }
    if (cdf.knots.empty()) throw SchemaError("dist=quantiles: no quantile pairs given", line);
    // flat-tail closure: all mass beyond the outermost quantiles collapses
    // onto them; the right atom is a ramp of negligible width
    const double last = cdf.knots.back().value;
    cdf.knots.push_back({last + 1e-9 * std::max(1.0, std::abs(last)), 1.0});
    try {
        return PredictiveDistribution(std::move(cdf));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("dist=quantiles: ") + e.what(), line);
    }
}

PredictiveDistribution parse_distribution(const std::string& token, int line, bool negate) {
    const auto parts = split(token, ';');
    const std::string kind = parts[0].substr(std::string("dist=").size());

    if (kind == "sample") {
        EmpiricalSample sample;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            const double v = parse_double(parts[i], line, "dist=sample value");
            sample.values.push_back(negate ? -v : v);
        }
        try {
            return PredictiveDistribution(std::move(sample));
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("dist=sample: ") + e.what(), line);
        }
    }

    const auto fields = parse_fields(parts, line);

    if (kind == "normal") {
        double mean = 0.0, sd = 0.0;
        bool saw_mean = false, saw_sd = false;
        for (const auto& [k, v] : fields) {
            if (k == "mean") { mean = parse_double(v, line, "dist=normal mean"); saw_mean = true; }
            else if (k == "sd") { sd = parse_double(v, line, "dist=normal sd"); saw_sd = true; }
            else throw SchemaError("dist=normal: unknown field '" + k + "'", line);
        }
        if (!saw_mean || !saw_sd) throw SchemaError("dist=normal: need mean and sd", line);
        try {
            return PredictiveDistribution(Gaussian{negate ? -mean : mean, sd});
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("dist=normal: ") + e.what(), line);
        }
    }

    if (kind == "quantiles") {
        std::vector<std::pair<double, double>> pairs; // (prob, value)
        for (const auto& [k, v] : fields) {
            double prob = parse_double(k, line, "dist=quantiles probability");
            double value = parse_double(v, line, "dist=quantiles value");
            if (negate) {
                prob = 1.0 - prob;
                value = -value;
            }
            pairs.emplace_back(prob, value);
        }
        return build_from_quantile_pairs(std::move(pairs), line);
    }

    if (kind == "cdf") {
        if (negate) {
            throw SchemaError("dist=cdf cannot be mirrored for reversed orientation; "
                              "use dist=quantiles instead",
                              line);
        }
        PiecewiseLinearCdf cdf;
        for (const auto& [k, v] : fields) {
            cdf.knots.push_back({parse_double(k, line, "dist=cdf value"),
                                 parse_double(v, line, "dist=cdf cum_prob")});
        }
        try {
            return PredictiveDistribution(std::move(cdf));
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("dist=cdf: ") + e.what(), line);
        }
    }

    if (kind == "pm-exp") {
        if (negate) {
            throw SchemaError("dist=pm-exp cannot be mirrored for reversed orientation", line);
        }
        double p0 = 0.0, scale = 0.0, lb = 0.0;
        for (const auto& [k, v] : fields) {
            if (k == "p0") p0 = parse_double(v, line, "dist=pm-exp p0");
            else if (k == "scale") scale = parse_double(v, line, "dist=pm-exp scale");
            else if (k == "lb") lb = parse_double(v, line, "dist=pm-exp lb");
            else throw SchemaError("dist=pm-exp: unknown field '" + k + "'", line);
        }
        try {
            return PredictiveDistribution(PointMassPlusExponentialTail{p0, scale, lb});
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("dist=pm-exp: ") + e.what(), line);
        }
    }

    throw SchemaError("unknown distribution kind '" + kind + "'", line);
}

ForecastValue parse_forecast(const std::string& token, int line, bool negate) {
    if (token.rfind("cat:", 0) == 0) return parse_int(token.substr(4), line, "forecast category");
    if (token.rfind("dist=", 0) == 0) return parse_distribution(token, line, negate);
    const double v = parse_double(token, line, "forecast value");
    return negate ? -v : v;
}

ObservationValue parse_observation(const std::string& token, int line, bool negate) {
    if (token.rfind("cat:", 0) == 0) {
        return parse_int(token.substr(4), line, "observation category");
    }
    const double v = parse_double(token, line, "observation value");
    return negate ? -v : v;
}

} // namespace

std::string forecast_token(const ForecastValue& value) {
    if (const int* cat = std::get_if<int>(&value)) return "cat:" + std::to_string(*cat);
    if (const double* v = std::get_if<double>(&value)) return format_double(*v);

    const auto& dist = std::get<PredictiveDistribution>(value);
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return "dist=normal;mean=" + format_double(d.mean) + ";sd=" + format_double(d.sd);
            } else if constexpr (std::is_same_v<T, PointMassPlusExponentialTail>) {
                return "dist=pm-exp;p0=" + format_double(d.p0) +
                       ";scale=" + format_double(d.scale) + ";lb=" + format_double(d.lower_bound);
            } else if constexpr (std::is_same_v<T, PiecewiseLinearCdf>) {
                std::string out = "dist=cdf";
                for (const auto& k : d.knots) {
                    out += ';' + format_double(k.value) + '=' + format_double(k.cum_prob);
                }
                return out;
            } else {
                std::string out = "dist=sample";
                for (double v : d.values) out += ';' + format_double(v);
                return out;
            }
        },
        dist.representation());
}

std::string observation_token(const ObservationValue& value) {
    if (const int* cat = std::get_if<int>(&value)) return "cat:" + std::to_string(*cat);
    return format_double(std::get<double>(value));
}

Dataset read_dataset_csv(std::istream& in, bool negate_values) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("dataset CSV: empty input", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) {
        throw SchemaError("dataset CSV: header must be exactly '" + std::string(kHeader) + "'",
                          1);
    }

    Dataset out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 5) {
            throw SchemaError("dataset CSV: expected 5 cells, got " +
                                  std::to_string(cells.size()),
                              lineno);
        }
        DatasetRecord rec;
        rec.location = cells[0];
        rec.date = cells[1];
        rec.lead_days = parse_int(cells[2], lineno, "lead_days");
        rec.forecast = parse_forecast(cells[3], lineno, negate_values);
        rec.observation = parse_observation(cells[4], lineno, negate_values);
        rec.line = lineno;
        out.records.push_back(std::move(rec));
    }
    return out;
}

Dataset read_dataset_csv(const std::filesystem::path& path, bool negate_values) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open dataset file '" + path.string() + "'");
    return read_dataset_csv(in, negate_values);
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
    out << kHeader << '\n';
    for (const auto& rec : dataset.records) {
        out << rec.location << ',' << rec.date << ',' << rec.lead_days << ','
            << forecast_token(rec.forecast) << ',' << observation_token(rec.observation) << '\n';
    }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot open output file '" + path.string() + "'");
    write_dataset_csv(out, dataset);
}

bool operator==(const DatasetRecord& a, const DatasetRecord& b) {
    return a.location == b.location && a.date == b.date && a.lead_days == b.lead_days &&
           a.forecast == b.forecast && a.observation == b.observation;
}

} // namespace firm
