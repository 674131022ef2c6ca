#include "sbm/report.hpp"

#include <fstream>
#include <sstream>

#include "sbm/errors.hpp"
#include "sbm/instance.hpp"

namespace sbm {

CsvReport::CsvReport(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvReport::add_header(const std::string& key, const std::string& value) {
    headers_.emplace_back(key, value);
}

void CsvReport::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
        throw InvalidParameterError("report row width does not match columns");
    rows_.push_back(std::move(cells));
}

std::string CsvReport::str() const {
    std::ostringstream out;
    for (const auto& [k, v] : headers_) out << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i)
        out << columns_[i] << (i + 1 < columns_.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
    return out.str();
}

void CsvReport::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << str();
}

std::string fmt(double v) { return format_double(v); }

std::string fmt(std::int64_t v) { return std::to_string(v); }

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(std::string_view canonical_config) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a(canonical_config);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace sbm
