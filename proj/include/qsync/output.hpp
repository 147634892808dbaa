// output.hpp: CSV tables with a commented header and JSON metadata sidecars
#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace qsync {

struct Column {
    std::string name;
    std::string description;  // including units where meaningful
};

/// Deterministic shortest-roundtrip-safe text for a double ("%.17g"; nan/inf spelled out).
std::string format_number(double v);

/// Comment block + column-name row. Identical inputs give identical bytes.
std::string csv_header(const std::vector<std::string>& comments, const std::vector<Column>& columns);

class CsvWriter {
public:
    /// Truncates `path` and writes the header.
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& comments,
              const std::vector<Column>& columns);
    /// Opens `path` for appending after `valid_bytes` bytes (resume); the caller
    /// has already checked the header.
    CsvWriter(const std::filesystem::path& path, std::size_t valid_bytes, std::size_t columns);

    void write_row(const std::vector<std::string>& cells);
    void write_numbers(const std::vector<double>& values);

private:
    std::ofstream out_;
    std::size_t n_columns_ = 0;
};

/// `out.csv` -> `out.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Writes the metadata sidecar. `config` must be the canonical RunConfig JSON
/// so the run can be repeated from the sidecar alone.
void write_sidecar(const std::filesystem::path& path, const nlohmann::json& config, const nlohmann::json& details,
                   double wall_time_s);

}  // namespace qsync
