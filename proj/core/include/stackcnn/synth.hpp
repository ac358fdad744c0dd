#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stackcnn/events.hpp"
#include "stackcnn/grid.hpp"

namespace stackcnn {

/// A moving point source emitting events as a Poisson process.
struct SourceSpec {
    double x0 = 0;  // sub-pixel position at t_enter
    double y0 = 0;
    double vx_px_s = 0;  // velocity in pixels/second
    double vy_px_s = 0;
    double rate_hz = 0;  // mean events/second while active
    std::uint64_t t_enter_us = 0;
    std::uint64_t t_exit_us = 0;
    double psf_sigma_px = 0;  // isotropic Gaussian scatter, 0 = point source
};

struct SceneConfig {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint64_t duration_us = 0;
    double background_rate_hz = 0;  // mean events/pixel/second
    std::uint64_t seed = 0;
    std::uint64_t dt_us = 80000;  // simil-frame window used for ground truth
    std::vector<SourceSpec> sources;
};

/// True sub-pixel source position at the midpoint of one simil-frame window.
struct WindowSample {
    std::uint64_t window = 0;  // frame index k
    std::uint64_t t_mid_us = 0;
    double x = 0;
    double y = 0;
    bool in_fov = false;
};

struct SourceTrack {
    SourceSpec spec;
    std::vector<WindowSample> windows;
};

struct GroundTruth {
    std::uint64_t dt_us = 0;
    std::vector<SourceTrack> tracks;
};

struct Scene {
    SensorGeometryHeader header;
    std::vector<Event> events;
    GroundTruth truth;
};

/// Continuous source position at an absolute stream time.
std::pair<double, double> source_position(const SourceSpec& spec, std::uint64_t t_us);

/// Draws background noise as independent per-pixel Poisson processes and each
/// source as a Poisson process along its track, PSF-scattered and discretized
/// to the nearest pixel. Output is sorted by (t, y, x) and fully determined by
/// config.seed; per-pixel substreams make the draw order irrelevant.
Scene generate_scene(const SceneConfig& config);

/// Peak significance in sigma units: (value at peak - background mean) /
/// background std, where the background excludes the disc of the given radius
/// around the peak. Throws when the background variance is zero.
double measure_snr(const RealGrid& grid, int peak_x, int peak_y, double exclusion_radius);
double measure_snr(const CountGrid& grid, int peak_x, int peak_y, double exclusion_radius);

}  // namespace stackcnn
