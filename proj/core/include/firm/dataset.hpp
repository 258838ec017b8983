#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "firm/distribution.hpp"

namespace firm {

/// Forecast cell of a dataset record: a category index, a real-valued point
/// forecast, or a predictive distribution.
using ForecastValue = std::variant<int, double, PredictiveDistribution>;

/// Observation cell: a category index or a real value.
using ObservationValue = std::variant<int, double>;

/// One row of a forecast dataset. `line` is the 1-based source line, kept
/// for error reporting.
struct DatasetRecord {
    std::string location;
    std::string date; // ISO-8601
    int lead_days = 0;
    ForecastValue forecast;
    ObservationValue observation;
    int line = 0;
};

struct Dataset {
    std::vector<DatasetRecord> records;
};

/// Parse the dataset CSV format described in FORMATS.md. With
/// `negate_values` set (reverse-convention hazards such as extreme cold),
/// real values are negated and distributions mirrored at ingestion; category
/// indices are taken as already hazard-ordered.
Dataset read_dataset_csv(std::istream& in, bool negate_values = false);
Dataset read_dataset_csv(const std::filesystem::path& path, bool negate_values = false);

/// Canonical writer: emits the same format the reader accepts, so a written
/// dataset re-ingests to an identical in-memory dataset.
void write_dataset_csv(std::ostream& out, const Dataset& dataset);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);

/// Token encoders for the forecast/observation cells (documented in
/// FORMATS.md; used by the writer and by anything generating datasets).
std::string forecast_token(const ForecastValue& value);
std::string observation_token(const ObservationValue& value);

bool operator==(const DatasetRecord& a, const DatasetRecord& b);

} // namespace firm
