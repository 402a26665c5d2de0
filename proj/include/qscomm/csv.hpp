#pragma once

#include <string>
#include <vector>

#include "qscomm/model.hpp"

namespace qscomm {

// RFC-4180-style numeric CSV: header row, comma separator, LF endings, no
// trailing delimiter, reals printed with full round-trip precision (%.17g).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

CsvTable read_csv(const std::string& path);

// Column order follows the two-species gut convention: the Bacteroidetes
// block (species[1]) first, then Firmicutes (species[0]).
//   time,rho_B,rho_F,a,m_mean_B,m_mean_F
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);  // per-cell matrices stay empty

// Per-cell matrix (time x cell): header time,cell_0,...,cell_{N-1}.
void write_cell_matrix_csv(const std::string& path, const Trajectory& traj, int species);
std::vector<std::vector<double>> read_cell_matrix_csv(const std::string& path);  // [cell][time]

}  // namespace qscomm
