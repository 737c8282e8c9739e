#include "csma/report.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace csma {

void ExperimentReport::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("report: row width does not match columns");
    rows.push_back(std::move(row));
}

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

std::string cell_to_csv(const Cell& c) {
    if (std::holds_alternative<double>(c)) return format_g9(std::get<double>(c));
    return csv_escape(std::get<std::string>(c));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

Cell cell_from_text(const std::string& text) {
    if (!text.empty()) {
        char* end = nullptr;
        double v = std::strtod(text.c_str(), &end);
        if (end == text.c_str() + text.size()) return Cell{v};
    }
    return Cell{text};
}

} // namespace

std::string report_to_csv(const ExperimentReport& r) {
    std::ostringstream out;
    out << "# command: " << r.command << '\n';
    out << "# config_hash: " << r.config_hash << '\n';
    out << "# seed: " << r.seed << '\n';
    out << "# timestamp: " << r.timestamp << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i)
        out << (i ? "," : "") << csv_escape(r.columns[i]);
    out << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << cell_to_csv(row[i]);
        out << '\n';
    }
    return out.str();
}

ExperimentReport report_from_csv(std::string_view text) {
    ExperimentReport r;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            std::string key = line.substr(1, colon - 1);
            std::string value = line.substr(colon + 1);
            auto trim = [](std::string& s) {
                s.erase(0, s.find_first_not_of(' '));
                auto last = s.find_last_not_of(' ');
                if (last != std::string::npos) s.erase(last + 1);
            };
            trim(key);
            trim(value);
            if (key == "command")
                r.command = value;
            else if (key == "config_hash")
                r.config_hash = value;
            else if (key == "seed")
                r.seed = std::strtoull(value.c_str(), nullptr, 10);
            else if (key == "timestamp")
                r.timestamp = value;
            continue;
        }
        if (!header_done) {
            r.columns = split_csv_line(line);
            header_done = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != r.columns.size())
            throw std::invalid_argument("report: CSV row width does not match header");
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (auto& f : fields) row.push_back(cell_from_text(f));
        r.rows.push_back(std::move(row));
    }
    if (!header_done) throw std::invalid_argument("report: CSV has no header row");
    return r;
}

std::string report_to_json(const ExperimentReport& r) {
    nlohmann::json doc;
    doc["command"] = r.command;
    doc["config_hash"] = r.config_hash;
    doc["seed"] = r.seed;
    doc["timestamp"] = r.timestamp;
    doc["columns"] = r.columns;
    auto rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        auto jr = nlohmann::json::array();
        for (const auto& c : row) {
            if (std::holds_alternative<double>(c))
                jr.push_back(std::get<double>(c));
            else
                jr.push_back(std::get<std::string>(c));
        }
        rows.push_back(std::move(jr));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2);
}

ExperimentReport report_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("report: bad JSON: ") + e.what());
    }
    ExperimentReport r;
    r.command = doc.value("command", "");
    r.config_hash = doc.value("config_hash", "");
    r.seed = doc.value("seed", std::uint64_t{0});
    r.timestamp = doc.value("timestamp", "");
    r.columns = doc.value("columns", std::vector<std::string>{});
    for (const auto& jr : doc.value("rows", nlohmann::json::array())) {
        std::vector<Cell> row;
        for (const auto& c : jr) {
            if (c.is_number())
                row.push_back(Cell{c.get<double>()});
            else
                row.push_back(Cell{c.get<std::string>()});
        }
        if (row.size() != r.columns.size())
            throw std::invalid_argument("report: JSON row width does not match columns");
        r.rows.push_back(std::move(row));
    }
    return r;
}

std::string report_to_table(const ExperimentReport& r) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back(r.columns);
    for (const auto& row : r.rows) {
        std::vector<std::string> line;
        for (const auto& c : row) {
            if (std::holds_alternative<double>(c))
                line.push_back(format_g9(std::get<double>(c)));
            else
                line.push_back(std::get<std::string>(c));
        }
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(r.columns.size(), 0);
    for (const auto& line : cells)
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    std::ostringstream out;
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            out << line[i];
            if (i + 1 < line.size()) out << std::string(width[i] - line[i].size() + 2, ' ');
        }
        out << '\n';
    }
    return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string utc_timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace csma
