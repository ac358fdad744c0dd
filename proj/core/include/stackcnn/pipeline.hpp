#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stackcnn/classifier.hpp"
#include "stackcnn/events.hpp"
#include "stackcnn/stacking.hpp"

namespace stackcnn {

enum class ClassifierKind { MatchedFilter, Cnn };

struct PipelineConfig {
    std::uint64_t dt_us = 80000;  // simil-frame exposure
    int frames_per_stack = 16;    // n
    int stride = 1;               // frames between window evaluations
    double max_displacement = 1.0;
    int downsample_factor = 1;
    ClassifierKind classifier = ClassifierKind::MatchedFilter;
    double cnn_threshold = kDefaultCnnThreshold;
    double mf_threshold_sigma = kDefaultMfThresholdSigma;
    double exclusion_radius = kDefaultExclusionRadius;
    double merge_radius = 3.0;  // peaks closer than this are one object
    int threads = 1;
    PolarityPolicy polarity = PolarityPolicy::Both;
};

struct Detection {
    std::uint64_t t_end_us = 0;  // end of the triggering window
    TrialVector velocity;        // winning trial vector
    double score = 0;
    int peak_x = 0;  // newest-frame coordinates, downsampled grid
    int peak_y = 0;
    ClassifierKind classifier = ClassifierKind::MatchedFilter;
    double mf_sigma = 0;  // matched-filter cross-check channel, always filled
};

/// Fixed-capacity ring of the most recent simil-frames, chronological access.
class FrameRing {
public:
    explicit FrameRing(int capacity);

    int capacity() const noexcept { return static_cast<int>(slots_.size()); }
    int size() const noexcept { return size_; }
    bool full() const noexcept { return size_ == capacity(); }

    void push(SimilFrame frame);

    /// i = 0 is the oldest stored frame, i = size()-1 the newest.
    const SimilFrame& at(int i) const;

    /// Copies the stored frames oldest-first, reusing out's storage.
    void snapshot(std::vector<SimilFrame>& out) const;

private:
    std::vector<SimilFrame> slots_;
    int head_ = 0;  // next write position
    int size_ = 0;
};

/// One trial vector's classification outcome for a window.
struct VectorScore {
    TrialVector velocity;
    double value = 0;
    bool triggered = false;
    int peak_x = 0;
    int peak_y = 0;
    double mf_sigma = 0;
};

/// Collapses the positive scores of one window into one Detection per
/// spatially distinct peak. Winner per peak cluster: highest score, ties
/// broken by smaller |v|, then lexicographic (vx, vy).
std::vector<Detection> merge_triggers(std::span<const VectorScore> scores,
                                      std::uint64_t t_end_us, ClassifierKind kind,
                                      double merge_radius);

struct WindowEvaluation {
    std::vector<VectorScore> scores;  // pool order
    std::vector<Detection> detections;
};

/// stack_all + classify every stacked image + merge triggers. frames must
/// already be at the classifier's grid resolution.
WindowEvaluation evaluate_window(std::span<const SimilFrame> frames, std::uint64_t t_end_us,
                                 const VectorPool& pool, const PipelineConfig& config,
                                 const CnnModel* model);

/// Online detector: events in, detections out. Frames are finalized as soon
/// as an event beyond their window arrives, and every `stride` completed
/// frames (once the ring is full) the window is stacked over the trial pool
/// and classified, so a window's detections are emitted before any event with
/// t >= t_end + dt is consumed.
class DetectionPipeline {
public:
    struct Stats {
        std::uint64_t events_consumed = 0;
        std::uint64_t events_accepted = 0;  // after the polarity policy
        std::uint64_t frames_built = 0;
        std::uint64_t windows_evaluated = 0;
    };

    DetectionPipeline(const PipelineConfig& config, const SensorGeometryHeader& header,
                      const CnnModel* model = nullptr);

    /// Downstream boundary: invoked once per detection, in window order.
    void set_callback(std::function<void(const Detection&)> callback);

    void feed(const Event& event);
    void finish();

    const std::vector<Detection>& detections() const noexcept { return detections_; }
    const Stats& stats() const noexcept { return stats_; }
    const VectorPool& pool() const noexcept { return pool_; }

private:
    void finalize_frame();
    void evaluate();

    PipelineConfig config_;
    SensorGeometryHeader header_;
    const CnnModel* model_;
    VectorPool pool_;
    CountGrid current_;
    std::uint64_t current_window_ = 0;
    std::uint64_t last_t_us_ = 0;
    bool any_event_ = false;
    bool finished_ = false;
    FrameRing ring_;
    std::vector<SimilFrame> scratch_;
    std::vector<Detection> detections_;
    std::function<void(const Detection&)> callback_;
    Stats stats_;
};

/// Batch convenience wrapper; identical output to feeding event by event.
std::vector<Detection> run_detection(std::span<const Event> events,
                                     const SensorGeometryHeader& header,
                                     const PipelineConfig& config,
                                     const CnnModel* model = nullptr);

struct WindowLatencyReport {
    int windows = 0;
    int grid_width = 0;
    int grid_height = 0;
    int frames_per_stack = 0;
    int vector_count = 0;
    bool with_cnn = false;
    double mean_ms = 0;
    double p50_ms = 0;
    double p95_ms = 0;
    double p99_ms = 0;
    double max_ms = 0;
    double dt_ms = 0;
    bool realtime_ok = false;  // p99 < dt

    friend bool operator==(const WindowLatencyReport&, const WindowLatencyReport&) = default;
};

/// Times evaluate_window over seeded synthetic noise frames. The timer is
/// injectable for tests; the default reads the steady clock.
WindowLatencyReport benchmark_window(const PipelineConfig& config,
                                     const SensorGeometryHeader& header, const CnnModel* model,
                                     int windows = 120,
                                     std::function<std::uint64_t()> now_ns = {});

}  // namespace stackcnn
