#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "prodres/errors.hpp"
#include "prodres/linalg.hpp"

namespace prodres {

// %.17g round-trips an IEEE double exactly through strtod.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Write a numeric table: header row of column names, one sample per line,
// full double precision.
inline void write_series_csv(const std::filesystem::path& path, const Mat& data,
                             const std::vector<std::string>& columns) {
    if (static_cast<Index>(columns.size()) != data.cols())
        throw std::invalid_argument("write_series_csv: column name count does not match data");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open file for writing", path.string());
    for (std::size_t j = 0; j < columns.size(); ++j)
        out << (j ? "," : "") << columns[j];
    out << "\n";
    for (Index i = 0; i < data.rows(); ++i) {
        for (Index j = 0; j < data.cols(); ++j)
            out << (j ? "," : "") << format_double(data(i, j));
        out << "\n";
    }
    if (!out) throw io_error("write failed", path.string());
}

// Raw CSV contents: header plus string cells, for parse-back checks and
// mixed-type tables.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file for reading", path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

inline std::pair<Mat, std::vector<std::string>> read_series_csv(const std::filesystem::path& path) {
    CsvTable table = read_csv(path);
    if (table.header.empty()) throw io_error("empty series file", path.string());
    Mat data(static_cast<Index>(table.rows.size()), static_cast<Index>(table.header.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != table.header.size())
            throw io_error("ragged row " + std::to_string(i + 2), path.string());
        for (std::size_t j = 0; j < table.rows[i].size(); ++j) {
            char* end = nullptr;
            data(static_cast<Index>(i), static_cast<Index>(j)) =
                std::strtod(table.rows[i][j].c_str(), &end);
            if (end == table.rows[i][j].c_str())
                throw io_error("non-numeric cell at row " + std::to_string(i + 2), path.string());
        }
    }
    return {std::move(data), table.header};
}

} // namespace prodres
