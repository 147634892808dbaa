#include "qsync/sweep.hpp"

#include "qsync/observables.hpp"
#include "qsync/synchronization.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace qsync {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

std::vector<Column> table_columns(const SweepDefinition& def) {
    std::vector<Column> cols{{"index", "row-major grid index"}};
    for (const auto& a : def.axes) cols.push_back({a.param, "sweep coordinate"});
    cols.push_back({"status", "ok or failed"});
    cols.insert(cols.end(), def.outputs.begin(), def.outputs.end());
    cols.push_back({"error", "solver message for failed points (empty when ok)"});
    return cols;
}

std::vector<std::string> row_cells(std::size_t index, const SweepRow& row) {
    std::vector<std::string> cells{std::to_string(index)};
    for (double c : row.coords) cells.push_back(format_number(c));
    cells.push_back(row.ok ? "ok" : "failed");
    for (double v : row.values) cells.push_back(format_number(v));
    cells.push_back(sanitize(row.error));
    return cells;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct ResumeState {
    std::size_t valid_bytes = 0;
    std::vector<SweepRow> rows;
};

/// Reads finished rows of an earlier run; nullopt when there is nothing to resume.
std::optional<ResumeState> read_existing(const std::filesystem::path& path, const std::string& header,
                                         const SweepDefinition& def) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (text.empty()) return std::nullopt;
    if (text.compare(0, header.size(), header) != 0)
        throw ConfigError("output", "'" + path.string() +
                                        "' exists with a different header; remove it or choose another output path");

    ResumeState st;
    std::size_t pos = header.size();
    st.valid_bytes = pos;
    const std::size_t n_axes = def.axes.size(), n_out = def.outputs.size();
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) break;  // partial row from an interruption
        const auto cells = split(text.substr(pos, nl - pos));
        const std::size_t idx = st.rows.size();
        if (cells.size() != n_axes + n_out + 3 || cells[0] != std::to_string(idx))
            throw std::runtime_error("cannot resume '" + path.string() + "': malformed row " + std::to_string(idx));
        SweepRow row;
        row.coords = grid_point(def.axes, idx);
        for (std::size_t a = 0; a < n_axes; ++a)
            if (cells[1 + a] != format_number(row.coords[a]))
                throw std::runtime_error("cannot resume '" + path.string() + "': grid differs at row " +
                                         std::to_string(idx));
        row.ok = cells[1 + n_axes] == "ok";
        for (std::size_t v = 0; v < n_out; ++v) row.values.push_back(std::stod(cells[2 + n_axes + v]));
        row.error = cells.back();
        st.rows.push_back(std::move(row));
        pos = nl + 1;
        st.valid_bytes = pos;
    }
    return st;
}

SweepRow evaluate(const SweepDefinition& def, std::size_t index) {
    SweepRow row;
    row.coords = grid_point(def.axes, index);
    try {
        row.values = def.fn(row.coords);
        if (row.values.size() != def.outputs.size())
            throw std::logic_error("sweep point returned " + std::to_string(row.values.size()) + " values, expected " +
                                   std::to_string(def.outputs.size()));
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
        row.values.assign(def.outputs.size(), kNaN);
    }
    return row;
}

}  // namespace

std::size_t SweepGrid::point_count() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.values.size();
    return n;
}

std::size_t SweepGrid::failed_count() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.ok ? 0 : 1;
    return n;
}

std::size_t SweepGrid::output_index(const std::string& name) const {
    for (std::size_t i = 0; i < outputs.size(); ++i)
        if (outputs[i].name == name) return i;
    throw std::out_of_range("sweep output '" + name + "' not found");
}

std::vector<double> grid_point(const std::vector<SweepAxis>& axes, std::size_t index) {
    std::vector<double> coords(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
        const std::size_t n = axes[a].values.size();
        coords[a] = axes[a].values[index % n];
        index /= n;
    }
    return coords;
}

SweepGrid run_sweep(const SweepDefinition& def, const SweepRunOptions& opts) {
    if (def.axes.empty()) throw ConfigError("sweep.axes", "at least one axis required");
    for (const auto& a : def.axes)
        if (a.values.empty()) throw ConfigError("sweep.axes", "axis '" + a.param + "' has no values");

    SweepGrid grid{def.axes, def.outputs, {}, 0, false};
    const std::size_t total = grid.point_count();
    const std::size_t target = opts.max_points ? std::min(total, *opts.max_points) : total;

    std::vector<std::string> comments{"qsync " + std::string(QSYNC_VERSION) + " parameter sweep",
                                      "rows in row-major order over the sweep axes (last axis fastest)"};
    comments.insert(comments.end(), opts.comments.begin(), opts.comments.end());
    const std::vector<Column> cols = table_columns(def);

    std::optional<CsvWriter> writer;
    if (opts.csv_path) {
        const std::string header = csv_header(comments, cols);
        if (auto st = read_existing(*opts.csv_path, header, def)) {
            grid.rows = std::move(st->rows);
            grid.resumed_rows = grid.rows.size();
            if (grid.rows.size() > total)
                throw std::runtime_error("cannot resume '" + opts.csv_path->string() + "': more rows than grid points");
            writer.emplace(*opts.csv_path, st->valid_bytes, cols.size());
        } else {
            writer.emplace(*opts.csv_path, comments, cols);
        }
    }

    const std::size_t start = grid.rows.size();
    if (start < target) {
        std::vector<std::optional<SweepRow>> pending(target - start);
        std::mutex mu;
        std::condition_variable cv;
        std::atomic<std::size_t> next{start};

        auto worker = [&] {
            for (std::size_t i = next++; i < target; i = next++) {
                SweepRow row = evaluate(def, i);
                {
                    std::lock_guard lock(mu);
                    pending[i - start] = std::move(row);
                }
                cv.notify_all();
            }
        };
        const unsigned n_workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(target - start)));
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);

        // Single writer, strictly in index order.
        for (std::size_t i = start; i < target; ++i) {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return pending[i - start].has_value(); });
            SweepRow row = std::move(*pending[i - start]);
            pending[i - start].reset();
            lock.unlock();
            if (writer) writer->write_row(row_cells(i, row));
            grid.rows.push_back(std::move(row));
        }
    }
    grid.complete = grid.rows.size() == total;
    return grid;
}

std::vector<Column> steady_sync_columns(std::size_t n) {
    std::vector<Column> cols{
        {"residual_norm", "Frobenius norm of L[rho_ss]"},
        {"degenerate", "1 if the steady-state solver flagged a degenerate kernel"},
        {"max_connected", "max |<A_j B_k> - <A_j><B_k>| over pairs and Pauli/ladder axes"},
        {"s_total", "sum over pairs of S_max"},
    };
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const std::string p = std::to_string(j) + "_" + std::to_string(k);
            cols.push_back({"s_max_" + p, "(pi/16)|<s+_j s-_k>|"});
            cols.push_back({"phi0_" + p, "locked phase arg<s+_j s-_k> in (-pi, pi] (0 if vanishing)"});
            cols.push_back({"ff_" + p + "_re", "Re <s+_j s-_k>"});
            cols.push_back({"ff_" + p + "_im", "Im <s+_j s-_k>"});
        }
    return cols;
}

std::vector<double> steady_sync_values(const SystemSpec& spec, std::optional<SteadyMethod> method,
                                       std::optional<double> tol) {
    Liouvillian l = Liouvillian::from_spec(spec);
    const SteadyMethod m = method.value_or(default_steady_method(l.dim()));
    const SteadyStateResult ss = steady_state(l, m, tol.value_or(default_steady_tolerance(m)));
    const SyncReport rep = sync_report(ss.rho_ss, spec);
    std::vector<double> out{ss.residual_norm, ss.degeneracy_flag ? 1.0 : 0.0, max_connected_correlation(ss.rho_ss),
                            rep.total};
    for (const auto& p : rep.per_pair) {
        out.push_back(p.s_max);
        out.push_back(p.phi0);
        out.push_back(p.flip_flop.real());
        out.push_back(p.flip_flop.imag());
    }
    return out;
}

SweepDefinition spec_sweep_definition(const RunConfig& cfg) {
    if (!cfg.spec) throw ConfigError("spec", "sweep needs a spec");
    for (std::size_t i = 0; i < cfg.axes.size(); ++i)
        validate_sweep_param(*cfg.spec, cfg.axes[i].param, "sweep.axes[" + std::to_string(i) + "].param");
    SweepDefinition def;
    def.axes = cfg.axes;
    def.outputs = steady_sync_columns(cfg.spec->size());
    const SystemSpec base = *cfg.spec;
    const auto method = cfg.steady_method;
    const auto tol = cfg.steady_tol;
    const auto axes = cfg.axes;
    def.fn = [base, method, tol, axes](std::span<const double> coords) {
        SystemSpec spec = base;
        for (std::size_t a = 0; a < axes.size(); ++a) apply_sweep_param(spec, axes[a].param, coords[a]);
        return steady_sync_values(spec, method, tol);
    };
    return def;
}

std::optional<unsigned> workers_from_env() {
    const char* v = std::getenv("QSYNC_WORKERS");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) throw ConfigError("QSYNC_WORKERS", "must be a positive integer");
    return static_cast<unsigned>(n);
}

}  // namespace qsync
