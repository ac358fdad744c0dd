#include "stackcnn/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stackcnn/errors.hpp"

namespace stackcnn {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad_field(const std::string& ctx, const std::string& key,
                            const std::string& why) {
    throw ConfigError(ctx + ": field '" + key + "' " + why);
}

template <typename T>
T require(const json& j, const std::string& ctx, const std::string& key) {
    if (!j.contains(key)) bad_field(ctx, key, "is required");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_field(ctx, key, "has the wrong type");
    }
}

template <typename T>
T get_or(const json& j, const std::string& ctx, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_field(ctx, key, "has the wrong type");
    }
}

json parse_json(const std::string& text, const std::string& ctx) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
}

}  // namespace

std::string to_string(ClassifierKind kind) {
    return kind == ClassifierKind::Cnn ? "cnn" : "matched_filter";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
    if (name == "cnn") return ClassifierKind::Cnn;
    if (name == "matched_filter" || name == "matched-filter")
        return ClassifierKind::MatchedFilter;
    throw ConfigError("classifier must be 'cnn' or 'matched_filter', got '" + name + "'");
}

std::string to_string(PolarityPolicy policy) {
    return policy == PolarityPolicy::Both ? "both" : "positive_only";
}

PolarityPolicy polarity_policy_from_string(const std::string& name) {
    if (name == "both") return PolarityPolicy::Both;
    if (name == "positive_only") return PolarityPolicy::PositiveOnly;
    throw ConfigError("polarity must be 'both' or 'positive_only', got '" + name + "'");
}

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, result.ptr);
}

SceneConfig parse_scene_config(const std::string& json_text) {
    const std::string ctx = "scene config";
    const json j = parse_json(json_text, ctx);

    SceneConfig config;
    config.width = require<std::uint32_t>(j, ctx, "width");
    config.height = require<std::uint32_t>(j, ctx, "height");
    config.duration_us = require<std::uint64_t>(j, ctx, "duration_us");
    config.background_rate_hz = get_or<double>(j, ctx, "background_rate", 0.0);
    config.seed = get_or<std::uint64_t>(j, ctx, "seed", 0);
    config.dt_us = get_or<std::uint64_t>(j, ctx, "dt_us", 80000);

    if (j.contains("sources")) {
        if (!j.at("sources").is_array()) bad_field(ctx, "sources", "must be an array");
        for (std::size_t i = 0; i < j.at("sources").size(); ++i) {
            const json& s = j.at("sources")[i];
            const std::string sctx = ctx + ": sources[" + std::to_string(i) + "]";
            SourceSpec spec;
            spec.x0 = require<double>(s, sctx, "x0");
            spec.y0 = require<double>(s, sctx, "y0");
            spec.vx_px_s = require<double>(s, sctx, "vx_px_s");
            spec.vy_px_s = require<double>(s, sctx, "vy_px_s");
            spec.rate_hz = require<double>(s, sctx, "rate_hz");
            spec.t_enter_us = get_or<std::uint64_t>(s, sctx, "t_enter_us", 0);
            spec.t_exit_us =
                get_or<std::uint64_t>(s, sctx, "t_exit_us", config.duration_us);
            spec.psf_sigma_px = get_or<double>(s, sctx, "psf_sigma", 0.0);
            config.sources.push_back(spec);
        }
    }
    return config;
}

std::string scene_config_json(const SceneConfig& config) {
    json j;
    j["width"] = config.width;
    j["height"] = config.height;
    j["duration_us"] = config.duration_us;
    j["background_rate"] = config.background_rate_hz;
    j["seed"] = config.seed;
    j["dt_us"] = config.dt_us;
    j["sources"] = json::array();
    for (const SourceSpec& s : config.sources) {
        json sj;
        sj["x0"] = s.x0;
        sj["y0"] = s.y0;
        sj["vx_px_s"] = s.vx_px_s;
        sj["vy_px_s"] = s.vy_px_s;
        sj["rate_hz"] = s.rate_hz;
        sj["t_enter_us"] = s.t_enter_us;
        sj["t_exit_us"] = s.t_exit_us;
        sj["psf_sigma"] = s.psf_sigma_px;
        j["sources"].push_back(sj);
    }
    return j.dump(2) + "\n";
}

PipelineConfig parse_pipeline_config(const std::string& json_text) {
    const std::string ctx = "pipeline config";
    const json j = parse_json(json_text, ctx);

    PipelineConfig config;
    config.dt_us = get_or<std::uint64_t>(j, ctx, "dt_us", config.dt_us);
    config.frames_per_stack = get_or<int>(j, ctx, "frames_per_stack", config.frames_per_stack);
    config.stride = get_or<int>(j, ctx, "stride", config.stride);
    config.max_displacement =
        get_or<double>(j, ctx, "max_displacement", config.max_displacement);
    config.downsample_factor =
        get_or<int>(j, ctx, "downsample_factor", config.downsample_factor);
    config.classifier = classifier_kind_from_string(
        get_or<std::string>(j, ctx, "classifier", to_string(config.classifier)));
    config.cnn_threshold = get_or<double>(j, ctx, "cnn_threshold", config.cnn_threshold);
    config.mf_threshold_sigma =
        get_or<double>(j, ctx, "mf_threshold_sigma", config.mf_threshold_sigma);
    config.exclusion_radius =
        get_or<double>(j, ctx, "exclusion_radius", config.exclusion_radius);
    config.merge_radius = get_or<double>(j, ctx, "merge_radius", config.merge_radius);
    config.threads = get_or<int>(j, ctx, "threads", config.threads);
    config.polarity = polarity_policy_from_string(
        get_or<std::string>(j, ctx, "polarity", to_string(config.polarity)));
    return config;
}

std::string pipeline_config_json(const PipelineConfig& config) {
    json j;
    j["dt_us"] = config.dt_us;
    j["frames_per_stack"] = config.frames_per_stack;
    j["stride"] = config.stride;
    j["max_displacement"] = config.max_displacement;
    j["downsample_factor"] = config.downsample_factor;
    j["classifier"] = to_string(config.classifier);
    j["cnn_threshold"] = config.cnn_threshold;
    j["mf_threshold_sigma"] = config.mf_threshold_sigma;
    j["exclusion_radius"] = config.exclusion_radius;
    j["merge_radius"] = config.merge_radius;
    j["threads"] = config.threads;
    j["polarity"] = to_string(config.polarity);
    return j.dump(2) + "\n";
}

std::string ground_truth_json(const GroundTruth& truth) {
    json j;
    j["dt_us"] = truth.dt_us;
    j["tracks"] = json::array();
    for (const SourceTrack& track : truth.tracks) {
        json tj;
        tj["source"] = {{"x0", track.spec.x0},
                        {"y0", track.spec.y0},
                        {"vx_px_s", track.spec.vx_px_s},
                        {"vy_px_s", track.spec.vy_px_s},
                        {"rate_hz", track.spec.rate_hz},
                        {"t_enter_us", track.spec.t_enter_us},
                        {"t_exit_us", track.spec.t_exit_us},
                        {"psf_sigma", track.spec.psf_sigma_px}};
        tj["windows"] = json::array();
        for (const WindowSample& w : track.windows) {
            tj["windows"].push_back({{"window", w.window},
                                     {"t_mid_us", w.t_mid_us},
                                     {"x", w.x},
                                     {"y", w.y},
                                     {"in_fov", w.in_fov}});
        }
        j["tracks"].push_back(tj);
    }
    return j.dump(2) + "\n";
}

GroundTruth parse_ground_truth(const std::string& json_text) {
    const std::string ctx = "ground truth";
    const json j = parse_json(json_text, ctx);

    GroundTruth truth;
    truth.dt_us = require<std::uint64_t>(j, ctx, "dt_us");
    if (!j.contains("tracks") || !j.at("tracks").is_array())
        bad_field(ctx, "tracks", "must be an array");
    for (const json& tj : j.at("tracks")) {
        SourceTrack track;
        const json& s = tj.at("source");
        track.spec.x0 = require<double>(s, ctx, "x0");
        track.spec.y0 = require<double>(s, ctx, "y0");
        track.spec.vx_px_s = require<double>(s, ctx, "vx_px_s");
        track.spec.vy_px_s = require<double>(s, ctx, "vy_px_s");
        track.spec.rate_hz = require<double>(s, ctx, "rate_hz");
        track.spec.t_enter_us = require<std::uint64_t>(s, ctx, "t_enter_us");
        track.spec.t_exit_us = require<std::uint64_t>(s, ctx, "t_exit_us");
        track.spec.psf_sigma_px = require<double>(s, ctx, "psf_sigma");
        for (const json& wj : tj.at("windows")) {
            WindowSample w;
            w.window = require<std::uint64_t>(wj, ctx, "window");
            w.t_mid_us = require<std::uint64_t>(wj, ctx, "t_mid_us");
            w.x = require<double>(wj, ctx, "x");
            w.y = require<double>(wj, ctx, "y");
            w.in_fov = require<bool>(wj, ctx, "in_fov");
            track.windows.push_back(w);
        }
        truth.tracks.push_back(std::move(track));
    }
    return truth;
}

std::string latency_report_json(const WindowLatencyReport& report) {
    json j;
    j["windows"] = report.windows;
    j["grid_width"] = report.grid_width;
    j["grid_height"] = report.grid_height;
    j["frames_per_stack"] = report.frames_per_stack;
    j["vector_count"] = report.vector_count;
    j["with_cnn"] = report.with_cnn;
    j["mean_ms"] = report.mean_ms;
    j["p50_ms"] = report.p50_ms;
    j["p95_ms"] = report.p95_ms;
    j["p99_ms"] = report.p99_ms;
    j["max_ms"] = report.max_ms;
    j["dt_ms"] = report.dt_ms;
    j["realtime_ok"] = report.realtime_ok;
    return j.dump(2) + "\n";
}

WindowLatencyReport parse_latency_report(const std::string& json_text) {
    const std::string ctx = "latency report";
    const json j = parse_json(json_text, ctx);
    WindowLatencyReport report;
    report.windows = require<int>(j, ctx, "windows");
    report.grid_width = require<int>(j, ctx, "grid_width");
    report.grid_height = require<int>(j, ctx, "grid_height");
    report.frames_per_stack = require<int>(j, ctx, "frames_per_stack");
    report.vector_count = require<int>(j, ctx, "vector_count");
    report.with_cnn = require<bool>(j, ctx, "with_cnn");
    report.mean_ms = require<double>(j, ctx, "mean_ms");
    report.p50_ms = require<double>(j, ctx, "p50_ms");
    report.p95_ms = require<double>(j, ctx, "p95_ms");
    report.p99_ms = require<double>(j, ctx, "p99_ms");
    report.max_ms = require<double>(j, ctx, "max_ms");
    report.dt_ms = require<double>(j, ctx, "dt_ms");
    report.realtime_ok = require<bool>(j, ctx, "realtime_ok");
    return report;
}

std::string detection_report_text(std::span<const Detection> detections) {
    std::string out =
        "# stackcnn detections\n"
        "# columns: t_end_us,vx,vy,score,peak_x,peak_y,classifier,mf_sigma\n";
    for (const Detection& d : detections) {
        out += std::to_string(d.t_end_us);
        out += ',';
        out += format_double(d.velocity.vx);
        out += ',';
        out += format_double(d.velocity.vy);
        out += ',';
        out += format_double(d.score);
        out += ',';
        out += std::to_string(d.peak_x);
        out += ',';
        out += std::to_string(d.peak_y);
        out += ',';
        out += to_string(d.classifier);
        out += ',';
        out += format_double(d.mf_sigma);
        out += '\n';
    }
    return out;
}

std::vector<Detection> parse_detection_report(const std::string& text) {
    std::vector<Detection> detections;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 8)
            throw FormatError("detection report line " + std::to_string(line_no) +
                              ": expected 8 fields");

        auto parse_u64 = [&](const std::string& s) {
            std::uint64_t v{};
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                throw FormatError("detection report line " + std::to_string(line_no) +
                                  ": bad integer '" + s + "'");
            return v;
        };
        auto parse_f64 = [&](const std::string& s) {
            double v{};
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                throw FormatError("detection report line " + std::to_string(line_no) +
                                  ": bad number '" + s + "'");
            return v;
        };

        Detection d;
        d.t_end_us = parse_u64(fields[0]);
        d.velocity.vx = parse_f64(fields[1]);
        d.velocity.vy = parse_f64(fields[2]);
        d.score = parse_f64(fields[3]);
        d.peak_x = static_cast<int>(parse_u64(fields[4]));
        d.peak_y = static_cast<int>(parse_u64(fields[5]));
        d.classifier = classifier_kind_from_string(fields[6]);
        d.mf_sigma = parse_f64(fields[7]);
        detections.push_back(d);
    }
    return detections;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw FormatError("write failure on '" + path.string() + "'");
}

}  // namespace stackcnn
