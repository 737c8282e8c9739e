#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace csma {

// Tabular result of one CLI command: metadata plus rows. Cells are numeric or
// text (text doubles as the error marker for failed sweep points).
using Cell = std::variant<double, std::string>;

struct ExperimentReport {
    std::string command;
    std::string config_hash; // FNV-1a over the canonical flag JSON
    std::uint64_t seed = 0;
    std::string timestamp; // ISO 8601 UTC
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

// Floats print with 9 significant digits in CSV and in the rendered table;
// JSON keeps full round-trip precision.
std::string format_g9(double v);

std::string report_to_csv(const ExperimentReport& r);
std::string report_to_json(const ExperimentReport& r);
ExperimentReport report_from_csv(std::string_view text);
ExperimentReport report_from_json(std::string_view text);

// Fixed-width table for stdout.
std::string report_to_table(const ExperimentReport& r);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::string_view bytes);
std::string utc_timestamp_now();

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

} // namespace csma
