#include "stackcnn/stacking.hpp"

#include <algorithm>
#include <thread>

#include "stackcnn/errors.hpp"

namespace stackcnn {

VectorPool make_hex_pool(double max_displacement) {
    if (!(max_displacement > 0))
        throw ConfigError("make_hex_pool: max_displacement must be > 0");

    const double spacing = max_displacement / 3.0;
    const double root3_half = 0.8660254037844386;  // sqrt(3)/2

    VectorPool pool;
    pool.lattice_spacing = spacing;
    pool.vectors.reserve(36);

    // Axial coordinates (i, j); hex ring index is (|i| + |j| + |i+j|) / 2.
    for (int j = -3; j <= 3; ++j) {
        for (int i = -3; i <= 3; ++i) {
            const int ring = (std::abs(i) + std::abs(j) + std::abs(i + j)) / 2;
            if (ring < 1 || ring > 3) continue;
            pool.vectors.push_back(
                TrialVector{spacing * (i + 0.5 * j), spacing * (root3_half * j)});
        }
    }

    // Canonical order: by magnitude, then angle-free lexicographic tie-break.
    std::sort(pool.vectors.begin(), pool.vectors.end(), [](TrialVector a, TrialVector b) {
        const double ma = a.vx * a.vx + a.vy * a.vy;
        const double mb = b.vx * b.vx + b.vy * b.vy;
        if (ma != mb) return ma < mb;
        if (a.vx != b.vx) return a.vx < b.vx;
        return a.vy < b.vy;
    });
    return pool;
}

StackedImage stack(std::span<const SimilFrame> frames, TrialVector v) {
    const int n = static_cast<int>(frames.size());
    if (n < 2) throw ConfigError("stack: need at least 2 frames");
    const int w = frames[0].counts.width();
    const int h = frames[0].counts.height();
    for (const SimilFrame& f : frames)
        if (f.counts.width() != w || f.counts.height() != h)
            throw ConfigError("stack: frame dimension mismatch");

    StackedImage out{CountGrid(w, h), n, v, frames[n - 1].t_start_us + frames[n - 1].dt_us};

    for (int i = 0; i < n; ++i) {
        const auto [dx_ll, dy_ll] = cumulative_shift(v, n - 1 - i);
        const int dx = static_cast<int>(dx_ll);
        const int dy = static_cast<int>(dy_ll);

        // Output rows [y0, y1) receive input rows [y0-dy, y1-dy).
        const int y0 = std::clamp(dy, 0, h);
        const int y1 = std::clamp(h + dy, 0, h);
        const int x0 = std::clamp(dx, 0, w);
        const int x1 = std::clamp(w + dx, 0, w);
        for (int y = y0; y < y1; ++y) {
            const std::uint32_t* src = frames[i].counts.row(y - dy);
            std::uint32_t* dst = out.values.row(y);
            for (int x = x0; x < x1; ++x) dst[x] += src[x - dx];
        }
    }
    return out;
}

std::vector<StackedImage> stack_all(std::span<const SimilFrame> frames, const VectorPool& pool,
                                    int threads) {
    if (threads < 1) throw ConfigError("stack_all: threads must be >= 1");
    std::vector<StackedImage> out(pool.vectors.size());

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = stack(frames, pool.vectors[i]);
    };

    const std::size_t count = pool.vectors.size();
    if (threads == 1 || count < 2) {
        run_range(0, count);
        return out;
    }

    const std::size_t workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> crew;
    crew.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        const std::size_t begin = count * t / workers;
        const std::size_t end = count * (t + 1) / workers;
        crew.emplace_back(run_range, begin, end);
    }
    for (std::thread& th : crew) th.join();
    return out;
}

}  // namespace stackcnn
