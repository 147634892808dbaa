#include "qsync/output.hpp"

#include "qsync/model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qsync {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header(const std::vector<std::string>& comments, const std::vector<Column>& columns) {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    for (const auto& c : columns) out += "# " + c.name + ": " + c.description + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i].name;
    return out + "\n";
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& comments,
                     const std::vector<Column>& columns)
    : n_columns_(columns.size()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out_ << csv_header(comments, columns);
    out_.flush();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::size_t valid_bytes, std::size_t columns)
    : n_columns_(columns) {
    std::filesystem::resize_file(path, valid_bytes);
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for appending");
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
    if (cells.size() != n_columns_)
        throw std::logic_error("CsvWriter: row has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(n_columns_));
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
    out_ << line << '\n';
    out_.flush();  // incremental: an interrupted run keeps every finished row
}

void CsvWriter::write_numbers(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    write_row(cells);
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    return p.replace_extension(".json");
}

void write_sidecar(const std::filesystem::path& path, const nlohmann::json& config, const nlohmann::json& details,
                   double wall_time_s) {
    nlohmann::json j;
    j["qsync_sidecar"] = true;
    j["tool"] = "qsync";
    j["version"] = QSYNC_VERSION;
    j["config"] = config;
    j["random_generator"] = std::string(kRandomStateGenerator);
    j["details"] = details;
    j["wall_time_s"] = wall_time_s;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

}  // namespace qsync
