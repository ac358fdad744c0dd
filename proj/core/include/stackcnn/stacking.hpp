#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "stackcnn/events.hpp"
#include "stackcnn/grid.hpp"

namespace stackcnn {

/// Candidate per-frame displacement, in pixels/frame.
struct TrialVector {
    double vx = 0;
    double vy = 0;

    double magnitude() const { return std::hypot(vx, vy); }

    friend bool operator==(const TrialVector&, const TrialVector&) = default;
};

struct VectorPool {
    std::vector<TrialVector> vectors;
    double lattice_spacing = 0;
};

/// Trial-vector pool on hexagonal lattice rings 1-3 around the origin
/// (6 + 12 + 18 = 36 vectors, origin excluded), scaled so the outermost ring
/// radius equals max_displacement. lattice_spacing = max_displacement / 3.
VectorPool make_hex_pool(double max_displacement = 1.0);

/// Shift-and-add sum of n consecutive simil-frames under one trial vector,
/// aligned to the newest frame's coordinates.
struct StackedImage {
    CountGrid values;
    int frames_stacked = 0;
    TrialVector velocity;
    std::uint64_t t_end_us = 0;  // end of the newest frame's window
};

/// Per-frame integer shift for a frame k steps older than the newest:
/// round(v * k), half away from zero, rounded once per frame.
inline std::pair<long long, long long> cumulative_shift(TrialVector v, int steps_back) {
    return {std::llround(v.vx * steps_back), std::llround(v.vy * steps_back)};
}

/// Translates each frame by its cumulative shift and sums. Pixels shifted
/// outside the grid are discarded. frames must be chronological (oldest
/// first), same dimensions, size >= 2.
StackedImage stack(std::span<const SimilFrame> frames, TrialVector v);

/// stack() for every pool vector, in pool order. Evaluations are independent;
/// threads > 1 fans them out with output order and content identical to the
/// serial run.
std::vector<StackedImage> stack_all(std::span<const SimilFrame> frames, const VectorPool& pool,
                                    int threads = 1);

}  // namespace stackcnn
