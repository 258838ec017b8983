#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "firm/scoring.hpp"

namespace firm {

/// One categorical forecast case: forecast and observed category indices.
struct CategoricalForecastCase {
    int forecast_category = 0;
    int observed_category = 0;
};

/// Binary contingency counts: hits, misses, false alarms, correct negatives.
struct BinaryCounts {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t false_alarms = 0;
    std::uint64_t correct_negatives = 0;

    std::uint64_t total() const { return hits + misses + false_alarms + correct_negatives; }
};

/// Counts c_ij of cases with forecast category i (row) and observed category
/// j (column).
class ContingencyTable {
public:
    explicit ContingencyTable(std::size_t category_count);
    ContingencyTable(std::size_t category_count, std::vector<std::uint64_t> counts);

    std::size_t category_count() const { return n_; }
    std::uint64_t at(std::size_t forecast, std::size_t observed) const;
    void add(std::size_t forecast, std::size_t observed, std::uint64_t count = 1);

    std::uint64_t total() const;
    std::uint64_t row_total(std::size_t forecast) const;
    std::uint64_t column_total(std::size_t observed) const;

    /// Pointwise sum; the tables must have the same category count.
    ContingencyTable& merge(const ContingencyTable& other);

private:
    std::size_t n_;
    std::vector<std::uint64_t> counts_;
};

/// Count cases into an (N+1)x(N+1) table. Throws std::invalid_argument
/// naming the first out-of-range record.
ContingencyTable tabulate(std::span<const CategoricalForecastCase> cases,
                          std::size_t category_count);

/// Collapse to a dichotomous table: the event is "observed category above
/// split_after", a warning is "forecast category above split_after".
BinaryCounts collapse_to_binary(const ContingencyTable& table, std::size_t split_after);

/// Probability of detection h/(h+m). Throws UndefinedMeasureError when the
/// denominator is zero (never a silent sentinel).
double pod(const BinaryCounts& counts);
/// False alarm ratio f/(h+f).
double far(const BinaryCounts& counts);
/// Critical success index h/(h+m+f).
double csi(const BinaryCounts& counts);
/// Probability of false detection f/(f+c).
double pofd(const BinaryCounts& counts);

/// The threshold probability above which forecasting the event maximises
/// expected CSI: h/(2h+m+f).
double csi_optimal_threshold(const BinaryCounts& counts);

/// Peirce skill score POD - POFD.
double peirce_skill_score(const BinaryCounts& counts);

/// Gerrity reward matrix for the given observed base rates (all strictly
/// positive, summing to 1). Row = forecast category, column = observed.
std::vector<std::vector<double>> gerrity_matrix(std::span<const double> base_rates);

/// Gerrity skill score of a table, with base rates taken from the table's
/// observed column totals. Every category must have been observed at least
/// once (the matrix uses reciprocals of base rates).
double gerrity_score(const ContingencyTable& table);

/// The 3-category Gerrity-optimal rule for the top category: true when
/// forecasting C_2 maximises the expected Gerrity reward given forecast
/// probabilities (p0,p1,p2) and base rates (r0,r1,r2).
bool gerrity_prefers_top_category(double p0, double p1, double p2, double r0, double r1,
                                  double r2);

/// Naive implicit-risk estimate: alpha-hat = f/(f+m).
double estimate_alpha_naive(const BinaryCounts& counts);

/// Signal-detection estimate of the implicit risk parameter:
///   alpha-tilde = 1/(tau+1),
///   tau = [phi(Phi^-1(1-POD)) / phi(Phi^-1(1-POFD))] * (h+m)/(f+c).
/// Requires POD and POFD strictly inside (0,1).
double estimate_alpha_signal_detection(const BinaryCounts& counts);

/// Mean penalty of a table under a scoring matrix, split into miss and
/// false-alarm parts (upper / lower triangle), per case.
struct MeanScore {
    double total = 0.0;
    double miss = 0.0;
    double false_alarm = 0.0;
    std::uint64_t cases = 0;
};

MeanScore mean_score(const ContingencyTable& table, const ScoringMatrix& matrix);

/// Plain CSV grid with a header row and column of category labels. Labels
/// default to C0..CN when empty.
void write_contingency_csv(std::ostream& out, const ContingencyTable& table,
                           std::span<const std::string> labels = {});
ContingencyTable read_contingency_csv(std::istream& in);

} // namespace firm
