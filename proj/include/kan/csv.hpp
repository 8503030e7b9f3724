#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kan {

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

// Strict double parse; throws std::invalid_argument on malformed input.
double parse_double(std::string_view text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const;  // -1 when absent
};

// Rectangular CSV with a mandatory header row. Reports ragged rows with
// 1-based line numbers.
CsvTable read_csv(const std::string& path);

void write_csv(const CsvTable& table, const std::string& path);
std::string csv_to_string(const CsvTable& table);

}  // namespace kan
