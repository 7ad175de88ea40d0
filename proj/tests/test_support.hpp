#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiscalforge/data_ingest.hpp"

namespace fiscalforge::testing {

inline std::filesystem::path source_dir() { return FISCALFORGE_SOURCE_DIR; }

inline std::filesystem::path fixture_csv() {
    return source_dir() / "fixtures" / "synthetic_quarters.csv";
}

inline FinancialSeries fixture_series() { return load_series(fixture_csv()).series; }

inline nlohmann::json reference_values() {
    std::ifstream in(source_dir() / "tests" / "fixtures" / "reference_values.json");
    return nlohmann::json::parse(in);
}

inline std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("fiscalforge-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Builds a series directly from (rnd, sga, net_income) triples, one per quarter from 2000-Q1.
inline FinancialSeries make_series(const std::vector<std::array<double, 3>>& rows) {
    FinancialSeries s;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        QuarterRecord r;
        r.period = QuarterPeriod{2000 + static_cast<int>(i / 4), static_cast<int>(i % 4) + 1};
        r.rnd = rows[i][0];
        r.sga = rows[i][1];
        r.net_income = rows[i][2];
        s.records.push_back(r);
    }
    return s;
}

}  // namespace fiscalforge::testing
