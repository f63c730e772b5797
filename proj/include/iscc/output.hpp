#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "iscc/config.hpp"

namespace iscc {

/// CSV emission with a fixed contract: '.' decimals, ',' separators, one
/// header row, LF line endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    const std::filesystem::path& path() const { return path_; }

    static std::string format(double v);

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
};

/// Reproducibility sidecar written next to every output set.
struct RunManifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::string subcommand;
    std::vector<std::string> outputs;

    void write(const std::filesystem::path& dir) const;
};

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace iscc
