#include <doctest.h>

#include <cmath>

#include "stackcnn/errors.hpp"
#include "stackcnn/geometry.hpp"
#include "stackcnn/rng.hpp"

using namespace stackcnn;

namespace {

const GeometryParams kRef{40.0, 48, 7500.0, 0.08};

GeometryParams random_params(Rng& rng) {
    GeometryParams p;
    p.fov_deg = rng.uniform(5.0, 120.0);
    p.matrix_size = 16 + static_cast<int>(rng.below(500));
    p.speed_mps = rng.uniform(500.0, 15000.0);
    p.dt_s = rng.uniform(0.001, 0.5);
    return p;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("pixel footprint at the reference range") {
    // 2 * 25000 * tan(20 deg) / 48
    CHECK(pixel_footprint_m(kRef, 25000.0) == doctest::Approx(379.1357).epsilon(1e-5));
}

TEST_CASE("footprint is linear in distance") {
    const double f1 = pixel_footprint_m(kRef, 10000.0);
    const double f2 = pixel_footprint_m(kRef, 20000.0);
    CHECK(f2 == doctest::Approx(2.0 * f1).epsilon(1e-12));
}

TEST_CASE("footprint vanishes with the FOV angle") {
    GeometryParams narrow = kRef;
    narrow.matrix_size = 1;
    narrow.fov_deg = 1e-9;
    CHECK(pixel_footprint_m(narrow, 1000.0) < 1e-6);
}

TEST_CASE("per-frame displacement at the reference range") {
    // 7500 m/s * 0.08 s = 600 m per frame over 379.14 m/px
    CHECK(displacement_px_per_frame(kRef, 25000.0) == doctest::Approx(1.5825).epsilon(1e-4));
}

TEST_CASE("displacement is linear in dt and vanishes at range") {
    GeometryParams half_dt = kRef;
    half_dt.dt_s = kRef.dt_s / 2;
    CHECK(displacement_px_per_frame(half_dt, 25000.0) ==
          doctest::Approx(displacement_px_per_frame(kRef, 25000.0) / 2).epsilon(1e-12));
    CHECK(displacement_px_per_frame(kRef, 1e15) < 1e-8);
}

TEST_CASE("minimum detectable distance anchors") {
    CHECK(min_detectable_distance_m(kRef, 1.5) == doctest::Approx(26375.8).epsilon(1e-5));
    CHECK(min_detectable_distance_m(kRef, 1.0) == doctest::Approx(39563.7).epsilon(1e-5));
}

TEST_CASE("displacement(min_distance(x)) == x over random parameters") {
    Rng rng(20240318);
    for (int i = 0; i < 200; ++i) {
        const GeometryParams p = random_params(rng);
        const double max_disp = rng.uniform(0.1, 3.0);
        const double d = min_detectable_distance_m(p, max_disp);
        const double back = displacement_px_per_frame(p, d);
        CHECK(std::abs(back - max_disp) <= 1e-12 * max_disp);
    }
}

TEST_CASE("monotonicity in distance, dt, speed and max_disp") {
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const GeometryParams p = random_params(rng);
        const double d = rng.uniform(1000.0, 1e6);

        CHECK(displacement_px_per_frame(p, d * 1.5) < displacement_px_per_frame(p, d));

        GeometryParams faster = p;
        faster.speed_mps *= 1.5;
        CHECK(displacement_px_per_frame(faster, d) > displacement_px_per_frame(p, d));
        CHECK(min_detectable_distance_m(faster, 1.0) > min_detectable_distance_m(p, 1.0));

        GeometryParams slower_frames = p;
        slower_frames.dt_s *= 1.5;
        CHECK(displacement_px_per_frame(slower_frames, d) > displacement_px_per_frame(p, d));
        CHECK(min_detectable_distance_m(slower_frames, 1.0) > min_detectable_distance_m(p, 1.0));

        CHECK(min_detectable_distance_m(p, 1.5) < min_detectable_distance_m(p, 1.0));
    }
}

TEST_CASE("invalid parameters are rejected") {
    GeometryParams p = kRef;
    p.fov_deg = 180.0;
    CHECK_THROWS_AS(pixel_footprint_m(p, 1000.0), ConfigError);
    p = kRef;
    p.dt_s = 0;
    CHECK_THROWS_AS(displacement_px_per_frame(p, 1000.0), ConfigError);
    CHECK_THROWS_AS(pixel_footprint_m(kRef, 0.0), ConfigError);
    CHECK_THROWS_AS(min_detectable_distance_m(kRef, 0.0), ConfigError);
}

}  // TEST_SUITE
