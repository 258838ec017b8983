#include "firm/verification.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "firm/errors.hpp"
#include "firm/normal.hpp"

namespace firm {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

double ratio_or_throw(std::uint64_t num, std::uint64_t den, const char* name) {
    if (den == 0) {
        throw UndefinedMeasureError(std::string(name) + " is undefined: zero denominator");
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

ContingencyTable::ContingencyTable(std::size_t category_count)
    : n_(category_count), counts_(category_count * category_count, 0) {
    require(n_ >= 2, "ContingencyTable: at least two categories required");
}

ContingencyTable::ContingencyTable(std::size_t category_count, std::vector<std::uint64_t> counts)
    : n_(category_count), counts_(std::move(counts)) {
    require(n_ >= 2, "ContingencyTable: at least two categories required");
    require(counts_.size() == n_ * n_, "ContingencyTable: count vector must be category_count^2");
}

std::uint64_t ContingencyTable::at(std::size_t forecast, std::size_t observed) const {
    require(forecast < n_ && observed < n_, "ContingencyTable: index out of range");
    return counts_[forecast * n_ + observed];
}

void ContingencyTable::add(std::size_t forecast, std::size_t observed, std::uint64_t count) {
    require(forecast < n_ && observed < n_, "ContingencyTable: index out of range");
    counts_[forecast * n_ + observed] += count;
}

std::uint64_t ContingencyTable::total() const {
    std::uint64_t acc = 0;
    for (auto c : counts_) acc += c;
    return acc;
}

std::uint64_t ContingencyTable::row_total(std::size_t forecast) const {
    require(forecast < n_, "ContingencyTable: index out of range");
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < n_; ++j) acc += counts_[forecast * n_ + j];
    return acc;
}

std::uint64_t ContingencyTable::column_total(std::size_t observed) const {
    require(observed < n_, "ContingencyTable: index out of range");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n_; ++i) acc += counts_[i * n_ + observed];
    return acc;
}

ContingencyTable& ContingencyTable::merge(const ContingencyTable& other) {
    require(other.n_ == n_, "ContingencyTable::merge: category counts differ");
    for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
    return *this;
}

ContingencyTable tabulate(std::span<const CategoricalForecastCase> cases,
                          std::size_t category_count) {
    ContingencyTable table(category_count);
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& c = cases[k];
        const int n = static_cast<int>(category_count);
        if (c.forecast_category < 0 || c.forecast_category >= n || c.observed_category < 0 ||
            c.observed_category >= n) {
            throw std::invalid_argument(
                "tabulate: record " + std::to_string(k) + " has categories (" +
                std::to_string(c.forecast_category) + ", " + std::to_string(c.observed_category) +
                ") outside 0.." + std::to_string(n - 1));
        }
        table.add(static_cast<std::size_t>(c.forecast_category),
                  static_cast<std::size_t>(c.observed_category));
    }
    return table;
}

BinaryCounts collapse_to_binary(const ContingencyTable& table, std::size_t split_after) {
    require(split_after + 1 < table.category_count(),
            "collapse_to_binary: split_after must be below the top category");
    BinaryCounts out;
    for (std::size_t i = 0; i < table.category_count(); ++i) {
        for (std::size_t j = 0; j < table.category_count(); ++j) {
            const bool warned = i > split_after;
            const bool event = j > split_after;
            const std::uint64_t c = table.at(i, j);
            if (warned && event) out.hits += c;
            else if (!warned && event) out.misses += c;
            else if (warned && !event) out.false_alarms += c;
            else out.correct_negatives += c;
        }
    }
    return out;
}

double pod(const BinaryCounts& c) { return ratio_or_throw(c.hits, c.hits + c.misses, "POD"); }

double far(const BinaryCounts& c) {
    return ratio_or_throw(c.false_alarms, c.hits + c.false_alarms, "FAR");
}

double csi(const BinaryCounts& c) {
    return ratio_or_throw(c.hits, c.hits + c.misses + c.false_alarms, "CSI");
}

double pofd(const BinaryCounts& c) {
    return ratio_or_throw(c.false_alarms, c.false_alarms + c.correct_negatives, "POFD");
}

double csi_optimal_threshold(const BinaryCounts& c) {
    return ratio_or_throw(c.hits, 2 * c.hits + c.misses + c.false_alarms,
                          "CSI-optimal threshold");
}

double peirce_skill_score(const BinaryCounts& c) { return pod(c) - pofd(c); }

std::vector<std::vector<double>> gerrity_matrix(std::span<const double> base_rates) {
    const std::size_t k = base_rates.size();
    require(k >= 2, "gerrity_matrix: at least two categories required");
    double sum = 0.0;
    for (double r : base_rates) {
        if (!(r > 0.0)) {
            throw UndefinedMeasureError(
                "gerrity_matrix: every base rate must be strictly positive "
                "(the matrix uses reciprocals of base rates)");
        }
        sum += r;
    }
    require(std::abs(sum - 1.0) < 1e-9, "gerrity_matrix: base rates must sum to 1");

    // odds of not yet exceeding category n: d[n] = (1 - P_n) / P_n
    std::vector<double> odds(k - 1);
    double cum = 0.0;
    for (std::size_t n = 0; n + 1 < k; ++n) {
        cum += base_rates[n];
        odds[n] = (1.0 - cum) / cum;
    }

    std::vector<std::vector<double>> g(k, std::vector<double>(k, 0.0));
    const double norm = 1.0 / static_cast<double>(k - 1);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double acc = -static_cast<double>(j - i);
            for (std::size_t n = 0; n < i; ++n) acc += 1.0 / odds[n];
            for (std::size_t n = j; n + 1 < k; ++n) acc += odds[n];
            g[i][j] = norm * acc;
            g[j][i] = g[i][j];
        }
    }
    return g;
}

double gerrity_score(const ContingencyTable& table) {
    const std::uint64_t n = table.total();
    if (n == 0) throw UndefinedMeasureError("gerrity_score: empty table");
    std::vector<double> rates(table.category_count());
    for (std::size_t j = 0; j < rates.size(); ++j) {
        rates[j] = static_cast<double>(table.column_total(j)) / static_cast<double>(n);
        if (rates[j] == 0.0) {
            throw UndefinedMeasureError("gerrity_score: category " + std::to_string(j) +
                                        " was never observed; base-rate reciprocal undefined");
        }
    }
    const auto g = gerrity_matrix(rates);
    double acc = 0.0;
    for (std::size_t i = 0; i < table.category_count(); ++i) {
        for (std::size_t j = 0; j < table.category_count(); ++j) {
            acc += static_cast<double>(table.at(i, j)) * g[i][j];
        }
    }
    return acc / static_cast<double>(n);
}

bool gerrity_prefers_top_category(double p0, double p1, double p2, double r0, double r1,
                                  double r2) {
    require(p0 >= 0.0 && p1 >= 0.0 && p2 >= 0.0 && std::abs(p0 + p1 + p2 - 1.0) < 1e-9,
            "gerrity_prefers_top_category: forecast probabilities must sum to 1");
    require(r0 > 0.0 && r1 > 0.0 && r2 > 0.0 && std::abs(r0 + r1 + r2 - 1.0) < 1e-9,
            "gerrity_prefers_top_category: base rates must be positive and sum to 1");
    require(r0 < 1.0 && r2 < 1.0, "gerrity_prefers_top_category: degenerate base rates");
    const double v0 = r0 / (1.0 - r0);
    const double v2 = r2 / (1.0 - r2);
    const double lhs = ((1.0 / v0 + v2 + 2.0) * p0 + (v2 - v0) * p1) / (v0 + 1.0 / v2 + 2.0);
    return p2 > std::max(lhs, v2 * (p0 + p1));
}

double estimate_alpha_naive(const BinaryCounts& c) {
    return ratio_or_throw(c.false_alarms, c.false_alarms + c.misses, "alpha-hat");
}

double estimate_alpha_signal_detection(const BinaryCounts& c) {
    const double hit_rate = pod(c);
    const double false_rate = pofd(c);
    if (hit_rate <= 0.0 || hit_rate >= 1.0 || false_rate <= 0.0 || false_rate >= 1.0) {
        throw UndefinedMeasureError(
            "alpha-tilde is undefined: POD and POFD must lie strictly in (0,1)");
    }
    const double tau = norm_pdf(norm_quantile(1.0 - hit_rate)) /
                       norm_pdf(norm_quantile(1.0 - false_rate)) *
                       (static_cast<double>(c.hits + c.misses) /
                        static_cast<double>(c.false_alarms + c.correct_negatives));
    return 1.0 / (tau + 1.0);
}

MeanScore mean_score(const ContingencyTable& table, const ScoringMatrix& matrix) {
    require(table.category_count() == matrix.category_count(),
            "mean_score: table and matrix category counts differ");
    MeanScore out;
    out.cases = table.total();
    if (out.cases == 0) throw UndefinedMeasureError("mean_score: empty table");
    for (std::size_t i = 0; i < table.category_count(); ++i) {
        for (std::size_t j = 0; j < table.category_count(); ++j) {
            const double contribution =
                static_cast<double>(table.at(i, j)) * matrix.at(i, j);
            if (i < j) out.miss += contribution;
            else if (i > j) out.false_alarm += contribution;
        }
    }
    const auto n = static_cast<double>(out.cases);
    out.miss /= n;
    out.false_alarm /= n;
    out.total = out.miss + out.false_alarm;
    return out;
}

void write_contingency_csv(std::ostream& out, const ContingencyTable& table,
                           std::span<const std::string> labels) {
    const std::size_t n = table.category_count();
    require(labels.empty() || labels.size() == n,
            "write_contingency_csv: need one label per category");
    const auto label = [&](std::size_t i) {
        return labels.empty() ? "C" + std::to_string(i) : labels[i];
    };
    for (std::size_t j = 0; j < n; ++j) out << ',' << label(j);
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << label(i);
        for (std::size_t j = 0; j < n; ++j) out << ',' << table.at(i, j);
        out << '\n';
    }
}

ContingencyTable read_contingency_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("contingency CSV: empty input", 1);
    std::size_t n = 0;
    for (char ch : line) {
        if (ch == ',') ++n;
    }
    if (n < 2) throw SchemaError("contingency CSV: need at least two category columns", 1);

    ContingencyTable table(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) {
            throw SchemaError("contingency CSV: expected " + std::to_string(n) + " data rows",
                              static_cast<int>(i + 2));
        }
        std::stringstream row(line);
        std::string cell;
        std::getline(row, cell, ','); // row label
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::getline(row, cell, ',')) {
                throw SchemaError("contingency CSV: row has too few cells",
                                  static_cast<int>(i + 2));
            }
            try {
                std::size_t used = 0;
                const long long v = std::stoll(cell, &used);
                if (used != cell.size() || v < 0) throw std::invalid_argument(cell);
                table.add(i, j, static_cast<std::uint64_t>(v));
            } catch (const std::exception&) {
                throw SchemaError("contingency CSV: '" + cell + "' is not a nonnegative count",
                                  static_cast<int>(i + 2));
            }
        }
    }
    return table;
}

} // namespace firm
