#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "firm/dataset.hpp"
#include "firm/detail/rng.hpp"
#include "firm/errors.hpp"
#include "firm/inference.hpp"
#include "firm/scoring.hpp"
#include "firm/service_config.hpp"
#include "firm/synthetic.hpp"
#include "firm/verification.hpp"

namespace firm::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// output plumbing

struct OutputTable {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
    json meta = json::object();
};

std::string human(const json& v) {
    if (v.is_null()) return "";
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v.get<double>());
        return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void print_human(const OutputTable& table, std::ostream& console) {
    for (const auto& [key, value] : table.meta.items()) {
        console << key << " = " << human(value) << '\n';
    }
    if (table.columns.empty()) return;

    std::vector<std::size_t> width(table.columns.size());
    std::vector<std::vector<std::string>> cells(table.rows.size());
    for (std::size_t j = 0; j < table.columns.size(); ++j) width[j] = table.columns[j].size();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        cells[i].resize(table.columns.size());
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            cells[i][j] = human(table.rows[i][j]);
            width[j] = std::max(width[j], cells[i][j].size());
        }
    }
    const auto pad = [&](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        console << (j ? "  " : "") << pad(table.columns[j], width[j]);
    }
    console << '\n';
    for (const auto& row : cells) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            console << (j ? "  " : "") << pad(row[j], width[j]);
        }
        console << '\n';
    }
}

void write_output_file(const OutputTable& table, const OutputOptions& options) {
    if (options.out_path.empty()) return;
    std::ofstream out(options.out_path);
    if (!out) throw SchemaError("cannot open output file '" + options.out_path + "'");

    if (options.format == "csv") {
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            out << (j ? "," : "") << table.columns[j];
        }
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << human(row[j]);
            out << '\n';
        }
        return;
    }
    if (options.format == "json") {
        json doc;
        doc["meta"] = table.meta;
        doc["rows"] = json::array();
        for (const auto& row : table.rows) {
            json obj = json::object();
            for (std::size_t j = 0; j < row.size(); ++j) obj[table.columns[j]] = row[j];
            doc["rows"].push_back(std::move(obj));
        }
        out << doc.dump(2) << '\n';
        return;
    }
    throw SchemaError("unknown output format '" + options.format + "' (use csv or json)");
}

void emit(const OutputTable& table, const OutputOptions& options, std::ostream& console) {
    print_human(table, console);
    write_output_file(table, options);
}

// ---------------------------------------------------------------------------
// scoring plumbing shared by score / sweeps / compare / estimate-alpha

struct CaseScore {
    int forecast_category = 0;
    int observed_category = 0;
    ScoreBreakdown parts;
};

int forecast_category_for(const FirmSpec& scoring_spec, const FirmSpec& decision_spec,
                          const DatasetRecord& rec, bool require_distribution) {
    if (const int* cat = std::get_if<int>(&rec.forecast)) {
        if (require_distribution) {
            throw SchemaError("this command needs distribution forecasts", rec.line);
        }
        if (*cat < 0 || static_cast<std::size_t>(*cat) >= scoring_spec.category_count()) {
            throw SchemaError("forecast category " + std::to_string(*cat) + " out of range",
                              rec.line);
        }
        return *cat;
    }
    if (const double* value = std::get_if<double>(&rec.forecast)) {
        if (require_distribution) {
            throw SchemaError("this command needs distribution forecasts", rec.line);
        }
        return scoring_spec.category_of(*value);
    }
    return directive_category(std::get<PredictiveDistribution>(rec.forecast), decision_spec);
}

CaseScore score_record(const FirmSpec& spec, const FirmSpec& decision_spec,
                       const DatasetRecord& rec, bool require_distribution) {
    CaseScore out;
    out.forecast_category =
        forecast_category_for(spec, decision_spec, rec, require_distribution);

    if (const int* cat = std::get_if<int>(&rec.observation)) {
        if (spec.a != 0.0) {
            throw SchemaError(
                "discounted scoring (a > 0) needs real-valued observations, got a category",
                rec.line);
        }
        if (*cat < 0 || static_cast<std::size_t>(*cat) >= spec.category_count()) {
            throw SchemaError("observed category " + std::to_string(*cat) + " out of range",
                              rec.line);
        }
        out.observed_category = *cat;
        out.parts = score_case_categorical(spec, out.forecast_category, *cat);
        return out;
    }
    const double y = std::get<double>(rec.observation);
    out.observed_category = spec.category_of(y);
    out.parts = score_case(spec, out.forecast_category, y);
    return out;
}

struct AggregateScore {
    std::size_t cases = 0;
    double total = 0.0;
    double miss = 0.0;
    double false_alarm = 0.0;
    std::optional<ContingencyTable> table;
    std::map<std::string, std::pair<double, std::size_t>> daily;
};

AggregateScore score_dataset(const ServiceConfig& config, const Dataset& data,
                             std::optional<double> decision_alpha = std::nullopt,
                             bool require_distribution = false) {
    if (data.records.empty()) throw SchemaError("dataset is empty");
    AggregateScore agg;
    if (config.spec.a == 0.0) agg.table.emplace(config.spec.category_count());
    for (const auto& rec : data.records) {
        const FirmSpec spec = config.spec_for(rec.location);
        FirmSpec decision = spec;
        if (decision_alpha) decision.alpha = *decision_alpha;
        const CaseScore cs = score_record(spec, decision, rec, require_distribution);
        ++agg.cases;
        agg.total += cs.parts.total;
        agg.miss += cs.parts.miss;
        agg.false_alarm += cs.parts.false_alarm;
        if (agg.table) {
            agg.table->add(static_cast<std::size_t>(cs.forecast_category),
                           static_cast<std::size_t>(cs.observed_category));
        }
        auto& day = agg.daily[rec.date];
        day.first += cs.parts.total;
        day.second += 1;
    }
    return agg;
}

ScoreSeries daily_means(const AggregateScore& agg) {
    ScoreSeries out;
    out.periods.reserve(agg.daily.size());
    out.values.reserve(agg.daily.size());
    for (const auto& [date, sum_count] : agg.daily) {
        out.periods.push_back(date);
        out.values.push_back(sum_count.first / static_cast<double>(sum_count.second));
    }
    return out;
}

std::vector<std::string> labels_for(const ServiceConfig& config) {
    if (!config.category_labels.empty()) return config.category_labels;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < config.spec.category_count(); ++i) {
        out.push_back("C" + std::to_string(i));
    }
    return out;
}

void print_contingency(const ContingencyTable& table, const std::vector<std::string>& labels,
                       std::ostream& console) {
    console << "contingency table (rows: forecast, columns: observed)\n";
    write_contingency_csv(console, table, labels);
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    const auto parse_one = [](const std::string& s) {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw SchemaError("grid: '" + s + "' is not a number");
        return v;
    };
    try {
        if (text.find(':') != std::string::npos) {
            std::stringstream ss(text);
            std::string lo_s, hi_s, step_s;
            if (!std::getline(ss, lo_s, ':') || !std::getline(ss, hi_s, ':') ||
                !std::getline(ss, step_s)) {
                throw SchemaError("grid: expected lo:hi:step, got '" + text + "'");
            }
            const double lo = parse_one(lo_s);
            const double hi = parse_one(hi_s);
            const double step = parse_one(step_s);
            if (step <= 0.0 || hi < lo) throw SchemaError("grid: need lo <= hi and step > 0");
            for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
        } else {
            std::stringstream ss(text);
            std::string cell;
            while (std::getline(ss, cell, ',')) out.push_back(parse_one(cell));
        }
    } catch (const std::invalid_argument&) {
        throw SchemaError("grid: cannot parse '" + text + "'");
    }
    if (out.empty()) throw SchemaError("grid: empty grid '" + text + "'");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i] <= out[i - 1]) throw SchemaError("grid: values must be strictly increasing");
    }
    return out;
}

void run_score(const ScoreOptions& options, std::ostream& console) {
    const auto config = load_service_config(options.config_path);
    const auto data = read_dataset_csv(std::filesystem::path(options.data_path), config.reversed);
    const auto agg = score_dataset(config, data);

    const auto n = static_cast<double>(agg.cases);
    OutputTable table;
    table.columns = {"cases", "mean_score", "miss_mean", "false_alarm_mean", "miss_fraction"};
    table.rows.push_back({agg.cases, agg.total / n, agg.miss / n, agg.false_alarm / n,
                          agg.total > 0.0 ? agg.miss / agg.total : 0.0});
    if (!config.name.empty()) table.meta["service"] = config.name;
    emit(table, options.output, console);

    if (agg.table) {
        print_contingency(*agg.table, labels_for(config), console);
        if (!options.table_out.empty()) {
            std::ofstream out(options.table_out);
            if (!out) {
                throw SchemaError("cannot open table output file '" + options.table_out + "'");
            }
            write_contingency_csv(out, *agg.table, labels_for(config));
        }
    } else if (!options.table_out.empty()) {
        throw SchemaError("no contingency table in discounted (a > 0) mode");
    }
}

namespace {

void run_sweep(const SweepOptions& options, std::ostream& console, bool sweep_alpha) {
    const auto config = load_service_config(options.config_path);
    const auto data = read_dataset_csv(std::filesystem::path(options.data_path), config.reversed);
    const auto grid = parse_grid(options.grid);

    OutputTable table;
    table.columns = {sweep_alpha ? "alpha" : "beta", "mean_score", "miss_mean",
                     "false_alarm_mean"};
    double best_level = grid.front();
    double best_score = std::numeric_limits<double>::infinity();
    for (const double level : grid) {
        ServiceConfig scoring = config;
        std::optional<double> decision_alpha;
        if (sweep_alpha) {
            scoring.spec.alpha = level; // matrix and directive move together
        } else {
            decision_alpha = level; // directive only; the matrix keeps alpha
        }
        const auto agg = score_dataset(scoring, data, decision_alpha, !sweep_alpha);
        const auto n = static_cast<double>(agg.cases);
        table.rows.push_back({level, agg.total / n, agg.miss / n, agg.false_alarm / n});
        if (agg.total / n < best_score) {
            best_score = agg.total / n;
            best_level = level;
        }
    }
    if (!sweep_alpha) {
        table.meta["best_beta"] = best_level;
        table.meta["scoring_alpha"] = config.spec.alpha;
    }
    emit(table, options.output, console);
}

} // namespace

void run_sweep_beta(const SweepOptions& options, std::ostream& console) {
    run_sweep(options, console, false);
}

void run_sweep_alpha(const SweepOptions& options, std::ostream& console) {
    run_sweep(options, console, true);
}

void run_compare(const CompareOptions& options, std::ostream& console) {
    const auto config = load_service_config(options.config_path);
    const auto data_a =
        read_dataset_csv(std::filesystem::path(options.data_path_a), config.reversed);
    const auto data_b =
        read_dataset_csv(std::filesystem::path(options.data_path_b), config.reversed);

    const auto daily_a = daily_means(score_dataset(config, data_a));
    const auto daily_b = daily_means(score_dataset(config, data_b));
    const auto diff = difference_series(daily_a, daily_b);

    double mean = 0.0;
    for (double v : diff.values) mean += v;
    mean /= static_cast<double>(diff.size());

    std::vector<CiMethod> methods;
    if (options.method == "t") methods = {CiMethod::student_t};
    else if (options.method == "dm") methods = {CiMethod::diebold_mariano};
    else if (options.method == "bootstrap") methods = {CiMethod::block_bootstrap};
    else if (options.method == "all") {
        methods = {CiMethod::student_t, CiMethod::diebold_mariano, CiMethod::block_bootstrap};
    } else {
        throw SchemaError("unknown method '" + options.method +
                          "' (use t, dm, bootstrap or all)");
    }

    InferenceOptions inference;
    inference.horizon = options.horizon;
    inference.block_length = options.block_length;
    inference.replicates = options.replicates;
    inference.seed = options.seed;

    OutputTable table;
    table.columns = {"method", "kind",      "estimate", "lower",
                     "upper",  "statistic", "p_value",  "reject"};
    table.meta["periods"] = diff.size();
    table.meta["mean_difference"] = mean;
    if (diff.size() >= 3 && zero_fraction(diff) < 1.0) {
        try {
            table.meta["lag1_correlation"] = lag1_correlation(diff);
        } catch (const UndefinedMeasureError&) {
            // constant differences: nothing to report
        }
    }

    std::optional<std::string> warning;
    for (const CiMethod method : methods) {
        const auto ci = compute_ci(diff, method, options.level, inference);
        if (ci.warning) warning = ci.warning;
        table.rows.push_back({ci.method, "two-sided", mean, ci.lower, ci.upper,
                              opt_json(ci.statistic), nullptr, nullptr});
        if (!options.one_sided.empty()) {
            const Alternative alt = options.one_sided == "less" ? Alternative::less
                                                                : Alternative::greater;
            if (options.one_sided != "less" && options.one_sided != "greater") {
                throw SchemaError("one-sided direction must be 'greater' or 'less'");
            }
            const auto test = one_sided_test(diff, method, options.level, alt, inference);
            table.rows.push_back({ci.method, "one-sided-" + options.one_sided, mean,
                                  alt == Alternative::greater ? json(test.bound) : json(nullptr),
                                  alt == Alternative::less ? json(test.bound) : json(nullptr),
                                  nullptr, test.p_value, test.reject});
        }
    }
    emit(table, options.output, console);
    if (warning) console << "note: " << *warning << '\n';
}

void run_estimate_alpha(const EstimateAlphaOptions& options, std::ostream& console) {
    const bool from_table = !options.table_path.empty();
    const bool from_data = !options.config_path.empty() || !options.data_path.empty();
    if (from_table == from_data) {
        throw SchemaError("estimate-alpha needs either --table or --config with --data");
    }

    std::optional<ContingencyTable> table;
    if (from_table) {
        std::ifstream in(options.table_path);
        if (!in) throw SchemaError("cannot open table file '" + options.table_path + "'");
        table = read_contingency_csv(in);
    } else {
        if (options.config_path.empty() || options.data_path.empty()) {
            throw SchemaError("estimate-alpha from data needs both --config and --data");
        }
        const auto config = load_service_config(options.config_path);
        if (config.spec.a != 0.0) {
            throw SchemaError("estimate-alpha works on categorical tables; set a = 0");
        }
        const auto data =
            read_dataset_csv(std::filesystem::path(options.data_path), config.reversed);
        table = score_dataset(config, data).table;
    }

    const BinaryCounts counts = collapse_to_binary(*table, options.split_after);

    std::optional<double> hit_rate, false_rate, alpha_hat, alpha_tilde;
    try {
        hit_rate = pod(counts);
    } catch (const UndefinedMeasureError&) {}
    try {
        false_rate = pofd(counts);
    } catch (const UndefinedMeasureError&) {}
    try {
        alpha_hat = estimate_alpha_naive(counts);
    } catch (const UndefinedMeasureError&) {}
    try {
        alpha_tilde = estimate_alpha_signal_detection(counts);
    } catch (const UndefinedMeasureError&) {}

    OutputTable out;
    out.columns = {"hits", "misses",       "false_alarms", "correct_negatives", "pod",
                   "pofd", "alpha_naive",  "alpha_signal_detection"};
    out.rows.push_back({counts.hits, counts.misses, counts.false_alarms,
                        counts.correct_negatives, opt_json(hit_rate), opt_json(false_rate),
                        opt_json(alpha_hat), opt_json(alpha_tilde)});
    out.meta["split_after"] = options.split_after;
    emit(out, options.output, console);
}

void run_pod_far(const PodFarOptions& options, std::ostream& console) {
    const auto alphas = parse_grid(options.alphas);
    const auto base_rates = parse_grid(options.base_rates);
    const auto rels = parse_grid(options.rel_uncertainties);

    OutputTable table;
    table.columns = {"base_rate", "rel_uncertainty",     "alpha",
                     "success_probability", "trials",    "standard_error"};
    std::uint64_t point = 0;
    for (const double base : base_rates) {
        for (const double rel : rels) {
            for (const double alpha : alphas) {
                const SyntheticSystem system{0.0, 1.0, rel, base};
                const auto outcome = pod_far_target_experiment(
                    system, alpha, options.cases_per_trial, options.trials,
                    detail::splitmix64(options.seed ^ ++point), options.se_target,
                    options.pod_target, options.far_limit);
                table.rows.push_back({base, rel, alpha, outcome.success_probability,
                                      outcome.trials, outcome.standard_error});
            }
        }
    }
    table.meta["cases_per_trial"] = options.cases_per_trial;
    table.meta["pod_target"] = options.pod_target;
    table.meta["far_limit"] = options.far_limit;
    emit(table, options.output, console);
}

void run_alpha_bias(const AlphaBiasOptions& options, std::ostream& console) {
    const auto alphas = parse_grid(options.alphas);
    const auto base_rates = parse_grid(options.base_rates);
    const auto rels = parse_grid(options.rel_uncertainties);

    OutputTable table;
    table.columns = {"base_rate", "rel_uncertainty", "alpha", "alpha_naive",
                     "alpha_signal_detection"};
    std::uint64_t point = 0;
    for (const double base : base_rates) {
        for (const double rel : rels) {
            const SyntheticSystem system{0.0, 1.0, rel, base};
            const auto rows = alpha_bias_experiment(system, alphas, options.cases,
                                                    detail::splitmix64(options.seed ^ ++point));
            for (const auto& row : rows) {
                table.rows.push_back({base, rel, row.alpha, opt_json(row.alpha_hat),
                                      opt_json(row.alpha_tilde)});
            }
        }
    }
    table.meta["cases"] = options.cases;
    emit(table, options.output, console);
}

void run_leadtime(const LeadTimeOptions& options, std::ostream& console) {
    const auto betas = parse_grid(options.betas);
    const SyntheticSystem system{options.mu, options.sigma, options.rel_uncertainty,
                                 options.base_rate};
    system.validate();
    if (options.cases == 0) throw SchemaError("leadtime: need at least one case");

    LeadTimePenalty penalty;
    penalty.entries = {{{0.0, options.penalty_late}, {options.penalty_retract, 0.0}}};

    auto rng = detail::substream(options.seed, 0);
    std::vector<PairedForecastCase> cases;
    cases.reserve(options.cases);
    for (std::size_t i = 0; i < options.cases; ++i) {
        cases.push_back(draw_paired_case(system, options.early_rel_uncertainty, rng));
    }

    const auto result =
        optimize_early_beta(cases, options.alpha, system.theta1(), penalty, betas);

    OutputTable table;
    table.columns = {"beta", "score"};
    for (const auto& point : result.points) table.rows.push_back({point.beta, point.score});
    table.meta["best_beta"] = result.best_beta;
    table.meta["standard_alpha"] = options.alpha;
    table.meta["early_warning_threshold_probability"] = 1.0 - result.best_beta;
    table.meta["standard_threshold_probability"] = 1.0 - options.alpha;
    emit(table, options.output, console);
}

} // namespace firm::cli
