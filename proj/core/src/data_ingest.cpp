#include "fiscalforge/data_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fiscalforge/errors.hpp"

namespace fiscalforge {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

double parse_number(std::string_view field, std::string_view source, std::size_t line_no,
                    std::string_view column) {
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": column '" +
                        std::string(column) + "' is not a number: '" + std::string(field) + "'");
    }
    return value;
}

void check_range(const FeatureRange& r, const char* name) {
    if (!(r.max > r.min)) {
        throw DegenerateScaleError(std::string("feature '") + name +
                                   "' is constant over the fit segment; cannot scale");
    }
}

}  // namespace

QuarterPeriod QuarterPeriod::parse(std::string_view label) {
    // YYYY-Qn
    const auto bad = [&] {
        return DataError("period label '" + std::string(label) + "' is not of the form YYYY-Q[1-4]");
    };
    if (label.size() != 7 || label[4] != '-' || label[5] != 'Q') throw bad();
    int year = 0;
    const auto [ptr, ec] = std::from_chars(label.data(), label.data() + 4, year);
    if (ec != std::errc() || ptr != label.data() + 4) throw bad();
    const char q = label[6];
    if (q < '1' || q > '4') throw bad();
    return QuarterPeriod{year, q - '0'};
}

std::string QuarterPeriod::label() const {
    std::ostringstream os;
    os << year << "-Q" << quarter;
    return os.str();
}

LoadResult load_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open data file '" + path.string() + "'");
    }
    return parse_series(in, path.string());
}

LoadResult parse_series(std::istream& in, std::string_view source_name) {
    std::string line;
    std::size_t line_no = 0;

    // Header, skipping a UTF-8 byte-order mark if present.
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (trim(view).empty()) continue;
        const auto fields = split_fields(view);
        if (fields.size() != 4 || fields[0] != "period" || fields[1] != "rnd" ||
            fields[2] != "sga" || fields[3] != "net_income") {
            throw DataError(std::string(source_name) +
                            ": expected header 'period,rnd,sga,net_income'");
        }
        have_header = true;
        break;
    }
    if (!have_header) {
        throw DataError(std::string(source_name) + ": file is empty");
    }

    LoadResult result;
    auto& records = result.series.records;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 4) {
            throw DataError(std::string(source_name) + ":" + std::to_string(line_no) +
                            ": expected 4 fields, got " + std::to_string(fields.size()));
        }
        if (std::any_of(fields.begin(), fields.end(), [](auto f) { return f.empty(); })) {
            ++result.dropped_rows;
            continue;
        }
        QuarterRecord rec;
        rec.period = QuarterPeriod::parse(fields[0]);
        rec.rnd = parse_number(fields[1], source_name, line_no, "rnd");
        rec.sga = parse_number(fields[2], source_name, line_no, "sga");
        rec.net_income = parse_number(fields[3], source_name, line_no, "net_income");
        if (rec.rnd < 0.0 || rec.sga < 0.0) {
            throw DataError(std::string(source_name) + ":" + std::to_string(line_no) +
                            ": rnd and sga must be non-negative");
        }
        if (!(rec.rnd + rec.sga > 0.0)) {
            throw DegenerateQuarterError(std::string(source_name) + ":" + std::to_string(line_no) +
                                         ": rnd + sga must be positive");
        }
        records.push_back(rec);
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const auto& a, const auto& b) { return a.period < b.period; });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].period == records[i - 1].period) {
            throw DuplicatePeriodError(std::string(source_name) + ": duplicate period " +
                                       records[i].period.label());
        }
    }
    if (records.size() < kMinSeriesLength) {
        throw DataError(std::string(source_name) + ": need at least " +
                        std::to_string(kMinSeriesLength) + " valid rows, got " +
                        std::to_string(records.size()));
    }
    return result;
}

ScalerParams fit_scaler(const FinancialSeries& series) {
    if (series.empty()) {
        throw DataError("fit_scaler: empty series");
    }
    const auto& first = series[0];
    ScalerParams p{{first.rnd, first.rnd},
                   {first.sga, first.sga},
                   {first.net_income, first.net_income}};
    for (const auto& r : series.records) {
        p.rnd.min = std::min(p.rnd.min, r.rnd);
        p.rnd.max = std::max(p.rnd.max, r.rnd);
        p.sga.min = std::min(p.sga.min, r.sga);
        p.sga.max = std::max(p.sga.max, r.sga);
        p.net_income.min = std::min(p.net_income.min, r.net_income);
        p.net_income.max = std::max(p.net_income.max, r.net_income);
    }
    check_range(p.rnd, "rnd");
    check_range(p.sga, "sga");
    check_range(p.net_income, "net_income");
    return p;
}

FinancialSeries apply_scaler(const ScalerParams& params, const FinancialSeries& series) {
    check_range(params.rnd, "rnd");
    check_range(params.sga, "sga");
    check_range(params.net_income, "net_income");
    FinancialSeries out = series;
    for (auto& r : out.records) {
        r.rnd = params.rnd.scale(r.rnd);
        r.sga = params.sga.scale(r.sga);
        r.net_income = params.net_income.scale(r.net_income);
    }
    return out;
}

FinancialSeries invert_scaler(const ScalerParams& params, const FinancialSeries& scaled) {
    FinancialSeries out = scaled;
    for (auto& r : out.records) {
        r.rnd = params.rnd.unscale(r.rnd);
        r.sga = params.sga.unscale(r.sga);
        r.net_income = params.net_income.unscale(r.net_income);
    }
    return out;
}

SeriesSplit chrono_split(const FinancialSeries& series, double train_fraction) {
    if (series.size() < kMinSeriesLength) {
        throw DataError("chrono_split: series has " + std::to_string(series.size()) +
                        " records, need at least " + std::to_string(kMinSeriesLength));
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ContractError("chrono_split: train_fraction must lie in (0, 1)");
    }
    const auto n = series.size();
    // The 1e-9 nudge keeps products like 0.8 * 65 from flooring to 51.
    const auto n_train =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
    // Each segment must hold at least one transition (two quarters).
    if (n_train < 2 || n - n_train < 2) {
        throw DataError("chrono_split: fraction " + std::to_string(train_fraction) + " over " +
                        std::to_string(n) + " records leaves a segment shorter than 2 quarters");
    }
    SeriesSplit split;
    split.train.records.assign(series.records.begin(), series.records.begin() + n_train);
    split.test.records.assign(series.records.begin() + n_train, series.records.end());
    return split;
}

}  // namespace fiscalforge
