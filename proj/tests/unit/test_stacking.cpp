#include <doctest.h>

#include <cmath>
#include <vector>

#include "stackcnn/errors.hpp"
#include "stackcnn/rng.hpp"
#include "stackcnn/stacking.hpp"

using namespace stackcnn;

namespace {

// Independent naive oracle: translate each frame cell by cell, then add,
// dropping anything shifted off the grid. Deliberately written the slow way.
CountGrid oracle_stack(const std::vector<SimilFrame>& frames, TrialVector v) {
    const int w = frames[0].counts.width();
    const int h = frames[0].counts.height();
    const int n = static_cast<int>(frames.size());
    CountGrid out(w, h);
    for (int i = 0; i < n; ++i) {
        const int steps = n - 1 - i;
        const int dx = static_cast<int>(std::llround(v.vx * steps));
        const int dy = static_cast<int>(std::llround(v.vy * steps));
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const int tx = x + dx;
                const int ty = y + dy;
                if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
                out(tx, ty) += frames[i].counts(x, y);
            }
        }
    }
    return out;
}

std::vector<SimilFrame> random_frames(int n, int w, int h, Rng& rng, std::uint32_t max_count) {
    std::vector<SimilFrame> frames;
    for (int i = 0; i < n; ++i) {
        SimilFrame f{CountGrid(w, h), static_cast<std::uint64_t>(i) * 1000, 1000, false};
        for (auto& c : f.counts.cells()) c = static_cast<std::uint32_t>(rng.below(max_count));
        frames.push_back(std::move(f));
    }
    return frames;
}

bool pool_contains(const VectorPool& pool, double vx, double vy, double tol) {
    for (const TrialVector& v : pool.vectors)
        if (std::hypot(v.vx - vx, v.vy - vy) <= tol) return true;
    return false;
}

}  // namespace

TEST_SUITE("stacking") {

TEST_CASE("hex pool: 36 vectors, radii, no origin") {
    const VectorPool pool = make_hex_pool(1.0);
    REQUIRE(pool.vectors.size() == 36);
    CHECK(pool.lattice_spacing == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    double min_mag = 1e9, max_mag = 0;
    for (const TrialVector& v : pool.vectors) {
        min_mag = std::min(min_mag, v.magnitude());
        max_mag = std::max(max_mag, v.magnitude());
        CHECK(v.magnitude() > 1e-9);  // origin excluded
        CHECK(v.magnitude() <= 1.0 + 1e-12);
    }
    CHECK(std::abs(max_mag - 1.0) <= 1e-12);
    CHECK(std::abs(min_mag - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("hex pool is closed under 60 degree rotation") {
    const VectorPool pool = make_hex_pool(1.0);
    const double c = 0.5, s = 0.8660254037844386;
    for (const TrialVector& v : pool.vectors) {
        const double rx = c * v.vx - s * v.vy;
        const double ry = s * v.vx + c * v.vy;
        CHECK(pool_contains(pool, rx, ry, 1e-12));
    }
}

TEST_CASE("hex pool vectors sum to zero") {
    const VectorPool pool = make_hex_pool(1.0);
    double sx = 0, sy = 0;
    for (const TrialVector& v : pool.vectors) {
        sx += v.vx;
        sy += v.vy;
    }
    CHECK(std::abs(sx) <= 1e-12);
    CHECK(std::abs(sy) <= 1e-12);
}

TEST_CASE("hex pool scales with max_displacement") {
    const VectorPool pool = make_hex_pool(2.5);
    double max_mag = 0;
    for (const TrialVector& v : pool.vectors) max_mag = std::max(max_mag, v.magnitude());
    CHECK(max_mag == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(pool.lattice_spacing == doctest::Approx(2.5 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(make_hex_pool(0.0), ConfigError);
}

TEST_CASE("a matched vector sums the moving object coherently") {
    std::vector<SimilFrame> frames;
    for (int i = 0; i < 3; ++i) {
        SimilFrame f{CountGrid(20, 20), static_cast<std::uint64_t>(i) * 10, 10, false};
        f.counts(10 + i, 10) = 1;
        frames.push_back(std::move(f));
    }

    const StackedImage hit = stack(frames, TrialVector{1, 0});
    CHECK(hit.values(12, 10) == 3);
    CHECK(hit.frames_stacked == 3);
    CHECK(hit.t_end_us == 30);

    const StackedImage miss = stack(frames, TrialVector{-1, 0});
    std::uint32_t peak = 0;
    for (auto c : miss.values.cells()) peak = std::max(peak, c);
    CHECK(peak == 1);
}

TEST_CASE("stack matches the naive oracle cell for cell") {
    Rng rng(0xabcdef);
    for (int trial = 0; trial < 300; ++trial) {
        const int w = 4 + static_cast<int>(rng.below(29));
        const int h = 4 + static_cast<int>(rng.below(29));
        const int n = 2 + static_cast<int>(rng.below(7));
        const auto frames = random_frames(n, w, h, rng, 6);
        const TrialVector v{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};

        const StackedImage got = stack(frames, v);
        CHECK(got.values == oracle_stack(frames, v));
    }
}

TEST_CASE("zero vector reduces to plain frame summation") {
    Rng rng(5);
    const auto frames = random_frames(5, 12, 9, rng, 10);
    const StackedImage flat = stack(frames, TrialVector{0, 0});
    for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 12; ++x) {
            std::uint32_t expect = 0;
            for (const SimilFrame& f : frames) expect += f.counts(x, y);
            CHECK(flat.values(x, y) == expect);
        }
    }
}

TEST_CASE("stacked mass never exceeds the input mass") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const auto frames = random_frames(4, 16, 16, rng, 4);
        const TrialVector v{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        std::uint64_t in_mass = 0;
        for (const SimilFrame& f : frames) in_mass += f.counts.sum<std::uint64_t>();
        CHECK(stack(frames, v).values.sum<std::uint64_t>() <= in_mass);
    }

    // No clipping when the content sits far from the borders.
    std::vector<SimilFrame> frames;
    for (int i = 0; i < 3; ++i) {
        SimilFrame f{CountGrid(30, 30), 0, 1, false};
        f.counts(14 + i, 15) = 2;
        frames.push_back(std::move(f));
    }
    CHECK(stack(frames, TrialVector{1, 0}).values.sum<std::uint64_t>() == 6);
}

TEST_CASE("translation equivariance up to border clipping") {
    Rng rng(23);
    const int w = 24, h = 24, shift = 3;
    auto frames = random_frames(4, w, h, rng, 5);

    // Keep a 6-cell border empty so neither run clips anything.
    for (SimilFrame& f : frames)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (x < 6 || y < 6 || x >= w - 6 || y >= h - 6) f.counts(x, y) = 0;

    std::vector<SimilFrame> moved = frames;
    for (SimilFrame& f : moved) {
        CountGrid g(w, h);
        for (int y = 0; y < h - shift; ++y)
            for (int x = 0; x < w - shift; ++x) g(x + shift, y + shift) = f.counts(x, y);
        f.counts = g;
    }

    const TrialVector v{0.7, -0.4};
    const StackedImage base = stack(frames, v);
    const StackedImage shifted = stack(moved, v);
    for (int y = 0; y < h - shift; ++y)
        for (int x = 0; x < w - shift; ++x)
            CHECK(shifted.values(x + shift, y + shift) == base.values(x, y));
}

TEST_CASE("stack_all output matches independent stacks, any thread count") {
    Rng rng(31);
    const auto frames = random_frames(6, 20, 15, rng, 5);
    const VectorPool pool = make_hex_pool(1.0);

    const auto serial = stack_all(frames, pool, 1);
    REQUIRE(serial.size() == 36);
    for (std::size_t i = 0; i < pool.vectors.size(); ++i) {
        CHECK(serial[i].velocity == pool.vectors[i]);
        CHECK(serial[i].values == stack(frames, pool.vectors[i]).values);
    }

    for (int threads : {2, 3, 8}) {
        const auto parallel = stack_all(frames, pool, threads);
        REQUIRE(parallel.size() == serial.size());
        for (std::size_t i = 0; i < serial.size(); ++i)
            CHECK(parallel[i].values == serial[i].values);
    }
}

TEST_CASE("all-zero frames stack to 36 all-zero images") {
    std::vector<SimilFrame> frames(4, SimilFrame{CountGrid(10, 10), 0, 1, false});
    const auto stacks = stack_all(frames, make_hex_pool(1.0));
    REQUIRE(stacks.size() == 36);
    for (const StackedImage& img : stacks) CHECK(img.values.sum<std::uint64_t>() == 0);
}

TEST_CASE("degenerate inputs are rejected") {
    std::vector<SimilFrame> one(1, SimilFrame{CountGrid(4, 4), 0, 1, false});
    CHECK_THROWS_AS(stack(one, TrialVector{1, 0}), ConfigError);

    std::vector<SimilFrame> mixed;
    mixed.push_back(SimilFrame{CountGrid(4, 4), 0, 1, false});
    mixed.push_back(SimilFrame{CountGrid(5, 4), 1, 1, false});
    CHECK_THROWS_AS(stack(mixed, TrialVector{1, 0}), ConfigError);
}

}  // TEST_SUITE
