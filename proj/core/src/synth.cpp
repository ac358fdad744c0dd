#include "stackcnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "stackcnn/errors.hpp"
#include "stackcnn/rng.hpp"

namespace stackcnn {

namespace {

// Substream index spaces: pixels use their linear index, sources get the top
// bit so the two can never collide.
constexpr std::uint64_t kSourceStreamBase = 0x8000000000000000ULL;

void validate(const SceneConfig& config) {
    if (config.width < 1 || config.height < 1)
        throw ConfigError("scene: width and height must be >= 1");
    if (config.duration_us == 0) throw ConfigError("scene: duration_us must be > 0");
    if (!(config.background_rate_hz >= 0))
        throw ConfigError("scene: background_rate must be >= 0");
    if (config.dt_us == 0) throw ConfigError("scene: dt_us must be > 0");
    for (std::size_t i = 0; i < config.sources.size(); ++i) {
        const SourceSpec& s = config.sources[i];
        const std::string tag = "scene: sources[" + std::to_string(i) + "].";
        if (!(s.rate_hz > 0)) throw ConfigError(tag + "rate must be > 0");
        if (s.t_enter_us >= s.t_exit_us) throw ConfigError(tag + "t_enter must be < t_exit");
        if (!(s.psf_sigma_px >= 0)) throw ConfigError(tag + "psf_sigma must be >= 0");
    }
}

void emit_background(const SceneConfig& config, std::vector<Event>& events) {
    if (config.background_rate_hz == 0) return;
    const double duration_s = static_cast<double>(config.duration_us) * 1e-6;
    const double rate = config.background_rate_hz;

    for (std::uint32_t y = 0; y < config.height; ++y) {
        for (std::uint32_t x = 0; x < config.width; ++x) {
            const std::uint64_t pixel = static_cast<std::uint64_t>(y) * config.width + x;
            Rng rng(substream_seed(config.seed, pixel));
            double t = rng.exponential(rate);
            while (t < duration_s) {
                const auto t_us = std::min(static_cast<std::uint64_t>(t * 1e6),
                                           config.duration_us - 1);
                events.push_back(Event{t_us, static_cast<std::uint16_t>(x),
                                       static_cast<std::uint16_t>(y), 1});
                t += rng.exponential(rate);
            }
        }
    }
}

void emit_source(const SceneConfig& config, const SourceSpec& spec, std::uint64_t stream_index,
                 std::vector<Event>& events) {
    Rng rng(substream_seed(config.seed, kSourceStreamBase | stream_index));
    const double t_start_s = static_cast<double>(spec.t_enter_us) * 1e-6;
    const double t_stop_s =
        static_cast<double>(std::min(spec.t_exit_us, config.duration_us)) * 1e-6;

    double t = t_start_s + rng.exponential(spec.rate_hz);
    while (t < t_stop_s) {
        const double dt_s = t - t_start_s;
        double px = spec.x0 + spec.vx_px_s * dt_s;
        double py = spec.y0 + spec.vy_px_s * dt_s;
        if (spec.psf_sigma_px > 0) {
            px += spec.psf_sigma_px * rng.normal();
            py += spec.psf_sigma_px * rng.normal();
        }
        const long long ix = std::llround(px);
        const long long iy = std::llround(py);
        if (ix >= 0 && iy >= 0 && ix < static_cast<long long>(config.width) &&
            iy < static_cast<long long>(config.height)) {
            const auto t_us =
                std::min(static_cast<std::uint64_t>(t * 1e6), config.duration_us - 1);
            events.push_back(Event{t_us, static_cast<std::uint16_t>(ix),
                                   static_cast<std::uint16_t>(iy), 1});
        }
        t += rng.exponential(spec.rate_hz);
    }
}

GroundTruth build_truth(const SceneConfig& config) {
    GroundTruth truth;
    truth.dt_us = config.dt_us;
    for (const SourceSpec& spec : config.sources) {
        SourceTrack track{spec, {}};
        const std::uint64_t stop = std::min(spec.t_exit_us, config.duration_us);
        const std::uint64_t first = spec.t_enter_us / config.dt_us;
        const std::uint64_t last = (stop - 1) / config.dt_us;
        for (std::uint64_t k = first; k <= last; ++k) {
            const std::uint64_t t_mid = k * config.dt_us + config.dt_us / 2;
            const auto [x, y] = source_position(spec, t_mid);
            const bool in_fov = x >= -0.5 && y >= -0.5 && x < config.width - 0.5 &&
                                y < config.height - 0.5;
            track.windows.push_back(WindowSample{k, t_mid, x, y, in_fov});
        }
        truth.tracks.push_back(std::move(track));
    }
    return truth;
}

}  // namespace

std::pair<double, double> source_position(const SourceSpec& spec, std::uint64_t t_us) {
    const double dt_s = (static_cast<double>(t_us) - static_cast<double>(spec.t_enter_us)) * 1e-6;
    return {spec.x0 + spec.vx_px_s * dt_s, spec.y0 + spec.vy_px_s * dt_s};
}

Scene generate_scene(const SceneConfig& config) {
    validate(config);

    Scene scene;
    scene.header = SensorGeometryHeader{config.width, config.height, config.duration_us};

    emit_background(config, scene.events);
    for (std::size_t i = 0; i < config.sources.size(); ++i)
        emit_source(config, config.sources[i], i, scene.events);

    std::sort(scene.events.begin(), scene.events.end(), [](const Event& a, const Event& b) {
        return std::tie(a.t_us, a.y, a.x, a.polarity) < std::tie(b.t_us, b.y, b.x, b.polarity);
    });

    scene.truth = build_truth(config);
    return scene;
}

double measure_snr(const RealGrid& grid, int peak_x, int peak_y, double exclusion_radius) {
    if (!grid.in_bounds(peak_x, peak_y)) throw ConfigError("measure_snr: peak outside grid");
    const double r2 = exclusion_radius * exclusion_radius;

    double sum = 0, sum_sq = 0;
    std::size_t count = 0;
    for (int y = 0; y < grid.height(); ++y) {
        const double dy = y - peak_y;
        for (int x = 0; x < grid.width(); ++x) {
            const double dx = x - peak_x;
            if (dx * dx + dy * dy <= r2) continue;
            const double v = grid(x, y);
            sum += v;
            sum_sq += v * v;
            ++count;
        }
    }
    if (count < 2) throw ConfigError("measure_snr: exclusion disc leaves no background");

    const double mean = sum / static_cast<double>(count);
    const double variance = std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean);
    if (variance <= 0) throw ConfigError("measure_snr: zero background variance");
    return (grid(peak_x, peak_y) - mean) / std::sqrt(variance);
}

double measure_snr(const CountGrid& grid, int peak_x, int peak_y, double exclusion_radius) {
    return measure_snr(grid.cast<double>(), peak_x, peak_y, exclusion_radius);
}

}  // namespace stackcnn
