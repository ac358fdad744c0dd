#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stackcnn {

/// Dense row-major 2D grid. (0,0) is the top-left cell; x indexes columns.
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(int width, int height, T fill = T{})
        : width_(width),
          height_(height),
          cells_(checked_size(width, height), fill) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t cell_count() const noexcept { return cells_.size(); }
    bool empty() const noexcept { return cells_.empty(); }

    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    T& operator()(int x, int y) noexcept { return cells_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return cells_[index(x, y)]; }

    std::vector<T>& cells() noexcept { return cells_; }
    const std::vector<T>& cells() const noexcept { return cells_; }

    T* row(int y) noexcept { return cells_.data() + static_cast<std::size_t>(y) * width_; }
    const T* row(int y) const noexcept {
        return cells_.data() + static_cast<std::size_t>(y) * width_;
    }

    void fill(T value) { cells_.assign(cells_.size(), value); }

    /// Sum of all cells accumulated in a wider type.
    template <typename Acc = double>
    Acc sum() const {
        Acc acc{};
        for (const T& c : cells_) acc += static_cast<Acc>(c);
        return acc;
    }

    /// Position of the maximum cell; first in row-major order on ties.
    std::pair<int, int> argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < cells_.size(); ++i)
            if (cells_[i] > cells_[best]) best = i;
        return {static_cast<int>(best % width_), static_cast<int>(best / width_)};
    }

    template <typename U>
    Grid<U> cast() const {
        Grid<U> out(width_, height_);
        for (std::size_t i = 0; i < cells_.size(); ++i)
            out.cells()[i] = static_cast<U>(cells_[i]);
        return out;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    static std::size_t checked_size(int width, int height) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("Grid dimensions must be >= 1");
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> cells_;
};

using CountGrid = Grid<std::uint32_t>;
using RealGrid = Grid<double>;

}  // namespace stackcnn
