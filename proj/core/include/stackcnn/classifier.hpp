#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "stackcnn/grid.hpp"
#include "stackcnn/stacking.hpp"

namespace stackcnn {

/// Z-scored stacked image, the classifier's input representation.
struct ClassifierInput {
    RealGrid values;
};

/// Z-score over all cells (population std). An all-constant grid maps to all
/// zeros, so gain and offset changes never reach the classifier.
ClassifierInput normalize(const RealGrid& raw);
ClassifierInput normalize(const StackedImage& img);

struct Score {
    double value = 0;      // [0,1] for the CNN, sigma units for the matched filter
    double threshold = 0;

    bool triggered() const { return value >= threshold; }
};

inline constexpr double kDefaultCnnThreshold = 0.5;
inline constexpr double kDefaultMfThresholdSigma = 5.5;
inline constexpr double kDefaultExclusionRadius = 5.0;

struct MatchedFilterParams {
    double threshold_sigma = kDefaultMfThresholdSigma;
    double exclusion_radius = kDefaultExclusionRadius;
};

struct MatchedFilterResult {
    Score score;
    int peak_x = 0;
    int peak_y = 0;
};

/// Analytic baseline detector: significance of the global maximum in sigma
/// units (see measure_snr). A zero-variance grid is not scorable and comes
/// back as score 0, i.e. a negative decision.
MatchedFilterResult matched_filter_score(const StackedImage& img,
                                         const MatchedFilterParams& params = {});
MatchedFilterResult matched_filter_score(const CountGrid& values,
                                         const MatchedFilterParams& params = {});

// ---------------------------------------------------------------------------
// Small trainable CNN
// ---------------------------------------------------------------------------

enum class LayerKind : std::uint8_t {
    Conv = 1,     // valid convolution, stride 1, square kernel
    Relu = 2,
    AvgPool2 = 3, // 2x2 mean downsample, floor on odd dims
    Dense = 4,
    Sigmoid = 5,
};

struct LayerSpec {
    LayerKind kind{};
    std::int32_t channels_in = 0;   // Conv
    std::int32_t channels_out = 0;  // Conv
    std::int32_t kernel = 0;        // Conv
    std::int32_t units = 0;         // Dense

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Architecture {
    std::int32_t input_width = 0;
    std::int32_t input_height = 0;
    std::vector<LayerSpec> layers;

    /// conv(8,3x3)-relu-pool - conv(16,3x3)-relu-pool - dense(1) - sigmoid
    static Architecture classifier_default(int input_width, int input_height);
    /// dense(1)-sigmoid: plain logistic regression on the flattened input.
    static Architecture logistic(int input_width, int input_height);

    friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct TrainingMetadata {
    std::uint64_t seed = 0;
    std::uint32_t epochs = 0;
    double learning_rate = 0;
    std::vector<double> loss_curve;  // mean BCE per epoch

    friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

class CnnModel {
public:
    CnnModel() = default;

    /// Builds the model with deterministic fan-in scaled uniform init.
    CnnModel(Architecture arch, std::uint64_t init_seed);

    const Architecture& architecture() const { return arch_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    TrainingMetadata& metadata() { return meta_; }
    const TrainingMetadata& metadata() const { return meta_; }

    /// Forward pass; the architecture must end in a scalar Sigmoid.
    double forward(const ClassifierInput& input) const;

    friend bool operator==(const CnnModel&, const CnnModel&) = default;

private:
    Architecture arch_;
    std::vector<double> params_;
    TrainingMetadata meta_;
};

/// Total parameter count implied by an architecture; also validates layer
/// shapes end to end and throws ConfigError on an inconsistent stack.
std::size_t parameter_count(const Architecture& arch);

Score predict(const CnnModel& model, const ClassifierInput& input,
              double threshold = kDefaultCnnThreshold);

/// Binary cross-entropy of the model output against a {0,1} label.
double bce_loss(const CnnModel& model, const ClassifierInput& input, int label);

/// Analytic d(loss)/d(params); same layout as model.params().
std::vector<double> loss_gradient(const CnnModel& model, const ClassifierInput& input, int label);

struct LabeledSample {
    ClassifierInput input;
    int label = 0;  // 1 = coherent source at (or adjacent to) the trial vector
};

struct TrainHyperparams {
    std::uint32_t epochs = 20;
    double learning_rate = 0.05;
    std::uint64_t seed = 1;
    std::int32_t input_width = 80;
    std::int32_t input_height = 60;
};

/// Plain per-sample SGD over shuffled epochs, deterministic given the seed.
/// Requires both classes in the dataset. epochs = 0 returns the initialized
/// model with an empty loss curve.
CnnModel train_cnn(std::span<const LabeledSample> dataset, const TrainHyperparams& hp);

/// Fraction of samples whose thresholded prediction matches the label.
double accuracy(const CnnModel& model, std::span<const LabeledSample> dataset,
                double threshold = kDefaultCnnThreshold);

struct GradientCheckParams {
    int sample_count = 200;  // parameters to probe; <=0 means all
    double step = 1e-4;
    std::uint64_t seed = 0;
};

/// Max relative error between analytic gradients and central finite
/// differences over a random parameter subsample.
double gradient_check(const CnnModel& model, const ClassifierInput& input, int label,
                      const GradientCheckParams& params = {});

// Model container format "SCNN": magic, u32 version, architecture descriptor,
// raw little-endian f64 parameter block, training metadata. Byte layout is
// documented in docs/model-format.md; round-trips are bit-exact.
void save_model(std::ostream& out, const CnnModel& model);
CnnModel load_model(std::istream& in);
void save_model_file(const std::filesystem::path& path, const CnnModel& model);
CnnModel load_model_file(const std::filesystem::path& path);

}  // namespace stackcnn
