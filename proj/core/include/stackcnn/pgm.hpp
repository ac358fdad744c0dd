#pragma once

#include <filesystem>
#include <iosfwd>

#include "stackcnn/grid.hpp"

namespace stackcnn {

/// Portable graymap dump, values rescaled so the grid maximum maps to 65535.
/// binary selects P5 (raw) over P2 (ascii).
void write_pgm(std::ostream& out, const CountGrid& grid, bool binary = true);
void write_pgm_file(const std::filesystem::path& path, const CountGrid& grid,
                    bool binary = true);

/// Exact integer cell values, one row per line, comma separated.
void write_grid_csv(std::ostream& out, const CountGrid& grid);
void write_grid_csv_file(const std::filesystem::path& path, const CountGrid& grid);

}  // namespace stackcnn
