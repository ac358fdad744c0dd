#include "stackcnn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "stackcnn/errors.hpp"
#include "stackcnn/synth.hpp"

namespace stackcnn {

namespace {

void validate(const PipelineConfig& config) {
    if (config.dt_us == 0) throw ConfigError("pipeline: dt_us must be > 0");
    if (config.frames_per_stack < 2) throw ConfigError("pipeline: frames_per_stack must be >= 2");
    if (config.stride < 1) throw ConfigError("pipeline: stride must be >= 1");
    if (!(config.max_displacement > 0))
        throw ConfigError("pipeline: max_displacement must be > 0");
    if (config.downsample_factor < 1)
        throw ConfigError("pipeline: downsample_factor must be >= 1");
    if (config.threads < 1) throw ConfigError("pipeline: threads must be >= 1");
    if (!(config.merge_radius >= 0)) throw ConfigError("pipeline: merge_radius must be >= 0");
}

// Winner ordering: higher score first, then smaller |v|, then lexicographic.
bool better(const VectorScore& a, const VectorScore& b) {
    if (a.value != b.value) return a.value > b.value;
    const double ma = a.velocity.vx * a.velocity.vx + a.velocity.vy * a.velocity.vy;
    const double mb = b.velocity.vx * b.velocity.vx + b.velocity.vy * b.velocity.vy;
    if (ma != mb) return ma < mb;
    if (a.velocity.vx != b.velocity.vx) return a.velocity.vx < b.velocity.vx;
    return a.velocity.vy < b.velocity.vy;
}

}  // namespace

FrameRing::FrameRing(int capacity) {
    if (capacity < 1) throw ConfigError("FrameRing: capacity must be >= 1");
    slots_.resize(static_cast<std::size_t>(capacity));
}

void FrameRing::push(SimilFrame frame) {
    slots_[static_cast<std::size_t>(head_)] = std::move(frame);
    head_ = (head_ + 1) % capacity();
    size_ = std::min(size_ + 1, capacity());
}

const SimilFrame& FrameRing::at(int i) const {
    if (i < 0 || i >= size_) throw std::out_of_range("FrameRing::at");
    const int oldest = (head_ + capacity() - size_) % capacity();
    return slots_[static_cast<std::size_t>((oldest + i) % capacity())];
}

void FrameRing::snapshot(std::vector<SimilFrame>& out) const {
    out.resize(static_cast<std::size_t>(size_));
    for (int i = 0; i < size_; ++i) out[static_cast<std::size_t>(i)] = at(i);
}

std::vector<Detection> merge_triggers(std::span<const VectorScore> scores,
                                      std::uint64_t t_end_us, ClassifierKind kind,
                                      double merge_radius) {
    std::vector<const VectorScore*> positives;
    for (const VectorScore& s : scores)
        if (s.triggered) positives.push_back(&s);

    std::sort(positives.begin(), positives.end(),
              [](const VectorScore* a, const VectorScore* b) { return better(*a, *b); });

    std::vector<Detection> merged;
    std::vector<bool> taken(positives.size(), false);
    const double r2 = merge_radius * merge_radius;
    for (std::size_t i = 0; i < positives.size(); ++i) {
        if (taken[i]) continue;
        const VectorScore& win = *positives[i];
        merged.push_back(Detection{t_end_us, win.velocity, win.value, win.peak_x, win.peak_y,
                                   kind, win.mf_sigma});
        for (std::size_t j = i; j < positives.size(); ++j) {
            if (taken[j]) continue;
            const double dx = positives[j]->peak_x - win.peak_x;
            const double dy = positives[j]->peak_y - win.peak_y;
            if (dx * dx + dy * dy <= r2) taken[j] = true;
        }
    }
    return merged;
}

WindowEvaluation evaluate_window(std::span<const SimilFrame> frames, std::uint64_t t_end_us,
                                 const VectorPool& pool, const PipelineConfig& config,
                                 const CnnModel* model) {
    if (config.classifier == ClassifierKind::Cnn && model == nullptr)
        throw ConfigError("pipeline: cnn classifier selected but no model provided");

    const std::vector<StackedImage> stacks = stack_all(frames, pool, config.threads);
    const MatchedFilterParams mf_params{config.mf_threshold_sigma, config.exclusion_radius};

    WindowEvaluation eval;
    eval.scores.reserve(stacks.size());
    for (const StackedImage& img : stacks) {
        const MatchedFilterResult mf = matched_filter_score(img, mf_params);
        VectorScore vs;
        vs.velocity = img.velocity;
        vs.peak_x = mf.peak_x;
        vs.peak_y = mf.peak_y;
        vs.mf_sigma = mf.score.value;
        if (config.classifier == ClassifierKind::Cnn) {
            vs.value = model->forward(normalize(img));
            vs.triggered = vs.value >= config.cnn_threshold;
        } else {
            vs.value = mf.score.value;
            vs.triggered = mf.score.triggered();
        }
        eval.scores.push_back(vs);
    }
    eval.detections =
        merge_triggers(eval.scores, t_end_us, config.classifier, config.merge_radius);
    return eval;
}

DetectionPipeline::DetectionPipeline(const PipelineConfig& config,
                                     const SensorGeometryHeader& header, const CnnModel* model)
    : config_(config),
      header_(header),
      model_(model),
      pool_(make_hex_pool(config.max_displacement)),
      ring_(config.frames_per_stack) {
    validate(config_);
    if (header_.width < 1 || header_.height < 1)
        throw ConfigError("pipeline: sensor resolution must be >= 1x1");
    current_ = CountGrid(static_cast<int>(header_.width), static_cast<int>(header_.height));

    const auto [gw, gh] = downsampled_dims(header_.width, header_.height,
                                           config_.downsample_factor);
    if (config_.classifier == ClassifierKind::Cnn) {
        if (model_ == nullptr)
            throw ConfigError("pipeline: cnn classifier selected but no model provided");
        const Architecture& arch = model_->architecture();
        if (arch.input_width != gw || arch.input_height != gh)
            throw ConfigError("pipeline: model expects " + std::to_string(arch.input_width) +
                              "x" + std::to_string(arch.input_height) + " input but frames are " +
                              std::to_string(gw) + "x" + std::to_string(gh) +
                              " after downsampling");
    }
}

void DetectionPipeline::set_callback(std::function<void(const Detection&)> callback) {
    callback_ = std::move(callback);
}

void DetectionPipeline::feed(const Event& event) {
    if (finished_) throw ConfigError("pipeline: feed after finish");
    if (any_event_ && event.t_us < last_t_us_)
        throw FormatError("pipeline: events not sorted by t (" + std::to_string(event.t_us) +
                          " after " + std::to_string(last_t_us_) + ")");
    if (event.x >= header_.width || event.y >= header_.height)
        throw FormatError("pipeline: event outside sensor resolution");

    while (event.t_us >= (current_window_ + 1) * config_.dt_us) finalize_frame();

    last_t_us_ = event.t_us;
    any_event_ = true;
    ++stats_.events_consumed;
    if (config_.polarity == PolarityPolicy::PositiveOnly && event.polarity <= 0) return;
    ++stats_.events_accepted;
    current_(event.x, event.y) += 1;
}

void DetectionPipeline::finish() {
    if (finished_) return;
    if (any_event_) finalize_frame();
    finished_ = true;
}

void DetectionPipeline::finalize_frame() {
    SimilFrame frame{std::move(current_), current_window_ * config_.dt_us, config_.dt_us, false};
    current_ = CountGrid(static_cast<int>(header_.width), static_cast<int>(header_.height));
    ++current_window_;

    if (config_.downsample_factor > 1) frame = downsample(frame, config_.downsample_factor);
    ring_.push(std::move(frame));
    ++stats_.frames_built;

    const auto n = static_cast<std::uint64_t>(config_.frames_per_stack);
    if (stats_.frames_built >= n &&
        (stats_.frames_built - n) % static_cast<std::uint64_t>(config_.stride) == 0)
        evaluate();
}

void DetectionPipeline::evaluate() {
    ring_.snapshot(scratch_);
    const std::uint64_t t_end = scratch_.back().t_start_us + scratch_.back().dt_us;
    WindowEvaluation eval = evaluate_window(scratch_, t_end, pool_, config_, model_);
    ++stats_.windows_evaluated;
    for (Detection& d : eval.detections) {
        if (callback_) callback_(d);
        detections_.push_back(d);
    }
}

std::vector<Detection> run_detection(std::span<const Event> events,
                                     const SensorGeometryHeader& header,
                                     const PipelineConfig& config, const CnnModel* model) {
    DetectionPipeline pipeline(config, header, model);
    for (const Event& e : events) pipeline.feed(e);
    pipeline.finish();
    return pipeline.detections();
}

WindowLatencyReport benchmark_window(const PipelineConfig& config,
                                     const SensorGeometryHeader& header, const CnnModel* model,
                                     int windows, std::function<std::uint64_t()> now_ns) {
    validate(config);
    if (windows < 1) throw ConfigError("benchmark: windows must be >= 1");
    if (!now_ns)
        now_ns = [] {
            return static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now().time_since_epoch())
                    .count());
        };

    const auto [gw, gh] = downsampled_dims(header.width, header.height,
                                           config.downsample_factor);
    const VectorPool pool = make_hex_pool(config.max_displacement);
    const int n = config.frames_per_stack;

    // Rolling ring over seeded Poisson-noise frames, like live operation.
    SceneConfig noise;
    noise.width = static_cast<std::uint32_t>(gw);
    noise.height = static_cast<std::uint32_t>(gh);
    noise.duration_us = static_cast<std::uint64_t>(n + windows) * config.dt_us;
    noise.background_rate_hz = 200.0;
    noise.seed = 0x9e3779b97f4a7c15ULL;
    noise.dt_us = config.dt_us;
    const Scene scene = generate_scene(noise);
    const auto frames =
        build_simil_frames(scene.events, scene.header, config.dt_us, config.polarity);

    FrameRing ring(n);
    for (int i = 0; i < n; ++i) ring.push(frames[static_cast<std::size_t>(i)]);

    std::vector<double> samples_ms;
    samples_ms.reserve(static_cast<std::size_t>(windows));
    std::vector<SimilFrame> window_frames;
    for (int w = 0; w < windows; ++w) {
        ring.snapshot(window_frames);
        const std::uint64_t t_end =
            window_frames.back().t_start_us + window_frames.back().dt_us;
        const std::uint64_t begin = now_ns();
        evaluate_window(window_frames, t_end, pool, config, model);
        const std::uint64_t end = now_ns();
        samples_ms.push_back(static_cast<double>(end - begin) * 1e-6);
        ring.push(frames[static_cast<std::size_t>(n + w)]);
    }

    std::sort(samples_ms.begin(), samples_ms.end());
    auto percentile = [&](double q) {
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(samples_ms.size()));
        return samples_ms[std::min(idx, samples_ms.size() - 1)];
    };

    WindowLatencyReport report;
    report.windows = windows;
    report.grid_width = gw;
    report.grid_height = gh;
    report.frames_per_stack = n;
    report.vector_count = static_cast<int>(pool.vectors.size());
    report.with_cnn = config.classifier == ClassifierKind::Cnn;
    double sum = 0;
    for (double s : samples_ms) sum += s;
    report.mean_ms = sum / static_cast<double>(samples_ms.size());
    report.p50_ms = percentile(0.50);
    report.p95_ms = percentile(0.95);
    report.p99_ms = percentile(0.99);
    report.max_ms = samples_ms.back();
    report.dt_ms = static_cast<double>(config.dt_us) * 1e-3;
    report.realtime_ok = report.p99_ms < report.dt_ms;
    return report;
}

}  // namespace stackcnn
