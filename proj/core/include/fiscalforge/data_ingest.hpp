#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fiscalforge {

/// Calendar quarter, written `YYYY-Qn`.
struct QuarterPeriod {
    int year = 0;
    int quarter = 1;  // 1..4

    static QuarterPeriod parse(std::string_view label);
    std::string label() const;

    auto operator<=>(const QuarterPeriod&) const = default;
};

/// One quarter of indicators, in million USD (or unitless once scaled).
struct QuarterRecord {
    QuarterPeriod period;
    double rnd = 0.0;
    double sga = 0.0;
    double net_income = 0.0;
};

/// Quarter records in strictly increasing period order.
struct FinancialSeries {
    std::vector<QuarterRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    const QuarterRecord& operator[](std::size_t i) const { return records[i]; }
};

struct LoadResult {
    FinancialSeries series;
    std::size_t dropped_rows = 0;  // rows skipped because a field was empty
};

inline constexpr std::size_t kMinSeriesLength = 4;

/// Reads a `period,rnd,sga,net_income` CSV. Rows with an empty field are
/// dropped and counted; anything else malformed is a DataError.
LoadResult load_series(const std::filesystem::path& path);
LoadResult parse_series(std::istream& in, std::string_view source_name = "<stream>");

struct FeatureRange {
    double min = 0.0;
    double max = 1.0;

    double scale(double x) const { return (x - min) / (max - min); }
    double unscale(double y) const { return min + y * (max - min); }
};

struct ScalerParams {
    FeatureRange rnd;
    FeatureRange sga;
    FeatureRange net_income;
};

/// Per-feature extrema of `series`. Pass the training segment only.
ScalerParams fit_scaler(const FinancialSeries& series);

/// Min-max maps every feature. Values outside the fitted range are not clipped.
FinancialSeries apply_scaler(const ScalerParams& params, const FinancialSeries& series);
FinancialSeries invert_scaler(const ScalerParams& params, const FinancialSeries& scaled);

struct SeriesSplit {
    FinancialSeries train;
    FinancialSeries test;
};

/// First floor(train_fraction * n) records train, the rest test. Both
/// segments need at least two records.
SeriesSplit chrono_split(const FinancialSeries& series, double train_fraction);

}  // namespace fiscalforge
