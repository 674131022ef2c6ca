#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sbm {

inline constexpr std::string_view kVersion = "0.1.0";

// CSV report with '#'-prefixed header lines. Cell formatting is fixed so a
// given (config, seed, version) always produces byte-identical output.
class CsvReport {
public:
    explicit CsvReport(std::vector<std::string> columns);

    void add_header(const std::string& key, const std::string& value);
    void add_row(std::vector<std::string> cells);

    std::string str() const;
    void write_file(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> headers_;
    std::vector<std::vector<std::string>> rows_;
};

// Shortest decimal form that round-trips; stable across runs.
std::string fmt(double v);
std::string fmt(std::int64_t v);

std::uint64_t fnv1a(std::string_view text);

// 16-hex-digit hash of the canonical config string for report headers.
std::string config_hash(std::string_view canonical_config);

}  // namespace sbm
