#include "stackcnn/pgm.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <string>

#include "stackcnn/errors.hpp"

namespace stackcnn {

void write_pgm(std::ostream& out, const CountGrid& grid, bool binary) {
    if (grid.empty()) throw ConfigError("write_pgm: empty grid");
    const std::uint32_t peak = *std::max_element(grid.cells().begin(), grid.cells().end());

    out << (binary ? "P5" : "P2") << "\n"
        << grid.width() << " " << grid.height() << "\n65535\n";

    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
            const std::uint64_t scaled =
                peak == 0 ? 0 : static_cast<std::uint64_t>(grid(x, y)) * 65535ULL / peak;
            const auto v = static_cast<std::uint16_t>(scaled);
            if (binary) {
                out.put(static_cast<char>(v >> 8));  // PGM raw is big-endian
                out.put(static_cast<char>(v & 0xff));
            } else {
                out << v << (x + 1 == grid.width() ? "" : " ");
            }
        }
        if (!binary) out << "\n";
    }
    if (!out) throw FormatError("write_pgm: output stream failure");
}

void write_pgm_file(const std::filesystem::path& path, const CountGrid& grid, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    write_pgm(out, grid, binary);
}

void write_grid_csv(std::ostream& out, const CountGrid& grid) {
    if (grid.empty()) throw ConfigError("write_grid_csv: empty grid");
    std::string line;
    for (int y = 0; y < grid.height(); ++y) {
        line.clear();
        for (int x = 0; x < grid.width(); ++x) {
            if (x) line += ',';
            line += std::to_string(grid(x, y));
        }
        line += '\n';
        out << line;
    }
    if (!out) throw FormatError("write_grid_csv: output stream failure");
}

void write_grid_csv_file(const std::filesystem::path& path, const CountGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    write_grid_csv(out, grid);
}

}  // namespace stackcnn
