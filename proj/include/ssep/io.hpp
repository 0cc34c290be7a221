// io.hpp -- CSV/JSON emission for experiment runs.
//
// Every CSV starts with a config-hash comment (the hash covers the canonical
// config text, never the timestamp line that follows it), then the header
// row. Files are assembled in memory and written atomically at the end, so a
// failed run leaves nothing behind.
#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssep/math_util.hpp"

namespace ssep {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string canonical_config_string(const std::map<std::string, std::string>& kv) {
    std::string s;
    for (const auto& [k, v] : kv) {
        s += k;
        s += '=';
        s += v;
        s += '\n';
    }
    return s;
}

class CsvTable {
  public:
    CsvTable(std::vector<std::string> columns, std::uint64_t config_hash)
        : columns_(std::move(columns)), hash_(config_hash) {}

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size())
            throw std::invalid_argument("csv: row width mismatch");
        rows_.push_back(cells);
    }

    std::string render(bool with_timestamp = true) const {
        char hx[32];
        std::snprintf(hx, sizeof(hx), "%016llx", static_cast<unsigned long long>(hash_));
        std::string s = "# config_hash=";
        s += hx;
        s += '\n';
        if (with_timestamp) {
            const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            char buf[64];
            std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            s += "# generated=";
            s += buf;
            s += '\n';
        }
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            s += columns_[i];
            s += (i + 1 < columns_.size()) ? ',' : '\n';
        }
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                s += row[i];
                s += (i + 1 < row.size()) ? ',' : '\n';
            }
        }
        return s;
    }

  private:
    std::vector<std::string> columns_;
    std::uint64_t hash_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    write_file(path, j.dump(2) + "\n");
}

}  // namespace ssep
