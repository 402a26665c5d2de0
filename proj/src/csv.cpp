#include "qscomm/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qscomm/errors.hpp"

namespace qscomm {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns) {
    if (header.size() != columns.size())
        throw IoError("write_csv: header/column count mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV file: " + path);
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c ? "," : "") << header[c];
    out << "\n";
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (const auto* col : columns)
        if (col->size() != rows) throw IoError("write_csv: ragged columns");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << fmt_double((*columns[c])[r]);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    table.columns.resize(table.header.size());
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        if (line.back() == '\r') line.pop_back();
        std::stringstream ls(line);
        std::size_t c = 0;
        while (std::getline(ls, cell, ',')) {
            if (c >= table.columns.size())
                throw IoError(path + ":" + std::to_string(row) + ": too many fields");
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw IoError(path + ":" + std::to_string(row) + ": bad number '" + cell + "'");
            table.columns[c].push_back(v);
            ++c;
        }
        if (c != table.columns.size())
            throw IoError(path + ":" + std::to_string(row) + ": missing fields");
    }
    return table;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    write_csv(path, {"time", "rho_B", "rho_F", "a", "m_mean_B", "m_mean_F"},
              {&traj.times, &traj.rho[1], &traj.rho[0], &traj.a, &traj.m_mean[1],
               &traj.m_mean[0]});
}

Trajectory read_trajectory_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    const std::vector<std::string> expected{"time", "rho_B", "rho_F",
                                            "a",    "m_mean_B", "m_mean_F"};
    if (t.header != expected) throw IoError(path + ": unexpected trajectory CSV header");
    Trajectory traj;
    traj.times = std::move(t.columns[0]);
    traj.rho[1] = std::move(t.columns[1]);
    traj.rho[0] = std::move(t.columns[2]);
    traj.a = std::move(t.columns[3]);
    traj.m_mean[1] = std::move(t.columns[4]);
    traj.m_mean[0] = std::move(t.columns[5]);
    return traj;
}

void write_cell_matrix_csv(const std::string& path, const Trajectory& traj, int species) {
    std::vector<std::string> header{"time"};
    std::vector<const std::vector<double>*> cols{&traj.times};
    for (std::size_t c = 0; c < traj.m[species].size(); ++c) {
        header.push_back("cell_" + std::to_string(c));
        cols.push_back(&traj.m[species][c]);
    }
    write_csv(path, header, cols);
}

std::vector<std::vector<double>> read_cell_matrix_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header.size() < 2 || t.header[0] != "time")
        throw IoError(path + ": unexpected per-cell matrix header");
    std::vector<std::vector<double>> cells;
    for (std::size_t c = 1; c < t.columns.size(); ++c) cells.push_back(std::move(t.columns[c]));
    return cells;
}

}  // namespace qscomm
