// sweep.hpp: parallel parameter grids with ordered, resumable CSV output
//
// Points are enumerated row-major (last axis fastest), solved by a pool of
// workers, and written strictly in index order as soon as the prefix is
// complete. An existing file with the same header is resumed after its last
// complete row.
#pragma once

#include "qsync/config.hpp"
#include "qsync/output.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qsync {

/// Computes the output values of one grid point; throwing marks the point failed.
using PointFunction = std::function<std::vector<double>(std::span<const double> coords)>;

struct SweepDefinition {
    std::vector<SweepAxis> axes;
    std::vector<Column> outputs;  // one per value returned by `fn`
    PointFunction fn;
};

struct SweepRow {
    std::vector<double> coords;
    bool ok = false;
    std::string error;           // empty when ok
    std::vector<double> values;  // NaN when failed
};

struct SweepGrid {
    std::vector<SweepAxis> axes;
    std::vector<Column> outputs;
    std::vector<SweepRow> rows;  // row-major; size = product of axis lengths when complete
    std::size_t resumed_rows = 0;
    bool complete = false;

    std::size_t point_count() const;
    std::size_t failed_count() const;
    /// Column index of an output name; throws std::out_of_range.
    std::size_t output_index(const std::string& name) const;
};

struct SweepRunOptions {
    unsigned workers = 1;
    std::optional<std::filesystem::path> csv_path;  // none: in-memory only
    std::vector<std::string> comments;              // extra header comment lines
    std::optional<std::size_t> max_points;          // stop once this many rows exist
};

/// Coordinates of point `index` (row-major).
std::vector<double> grid_point(const std::vector<SweepAxis>& axes, std::size_t index);

SweepGrid run_sweep(const SweepDefinition& def, const SweepRunOptions& opts);

/// Generic steady-state + synchronization sweep over spec parameters, with
/// per-point steady-state method/tolerance from `cfg`.
SweepDefinition spec_sweep_definition(const RunConfig& cfg);

/// Output columns and values of a steady-state + synchronization evaluation of `spec`.
std::vector<Column> steady_sync_columns(std::size_t n_qubits);
std::vector<double> steady_sync_values(const SystemSpec& spec, std::optional<SteadyMethod> method,
                                       std::optional<double> tol);

/// Worker count from the QSYNC_WORKERS environment variable, if set and valid.
std::optional<unsigned> workers_from_env();

}  // namespace qsync
