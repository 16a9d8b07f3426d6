#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ctwave/errors.hpp"
#include "ctwave/grid.hpp"

namespace ctwave {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(std::string_view s) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return buf;
}

/// Stable numeric formatting for all emitted tables and profiles.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Two-column (x, value) text profile with a comment header carrying the
/// run-manifest hash.
inline void write_profile(const std::filesystem::path& path, const Profile& p,
                          const std::string& manifest_hash, const std::string& name) {
    std::ofstream out(path);
    if (!out) throw solver_error("write_profile: cannot open " + path.string());
    out << "# ctwave profile: " << name << "\n";
    out << "# manifest " << manifest_hash << "\n";
    for (int i = 0; i < p.size(); ++i)
        out << format_number(p.grid.x(i)) << " " << format_number(p.v[i]) << "\n";
}

/// Minimal CSV table with a fixed column order.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) {
        if (row.size() != header_.size())
            throw solver_error("CsvTable: row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::size_t size() const { return rows_.size(); }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw solver_error("CsvTable: cannot open " + path.string());
        for (std::size_t i = 0; i < header_.size(); ++i)
            out << header_[i] << (i + 1 < header_.size() ? "," : "\n");
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << row[i] << (i + 1 < row.size() ? "," : "\n");
        }
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace ctwave
