#include "stackcnn/classifier.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "stackcnn/errors.hpp"
#include "stackcnn/rng.hpp"
#include "stackcnn/synth.hpp"

namespace stackcnn {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'N', 'N'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr double kProbEps = 1e-12;

struct Shape {
    int c = 0, h = 0, w = 0;
    std::size_t count() const { return static_cast<std::size_t>(c) * h * w; }
};

struct LayerPlan {
    LayerSpec spec;
    Shape in, out;
    std::size_t param_offset = 0;
    std::size_t param_count = 0;
};

struct Plan {
    std::vector<LayerPlan> layers;
    std::size_t total_params = 0;
    Shape input;
    Shape output;
};

Plan plan_architecture(const Architecture& arch) {
    if (arch.input_width < 1 || arch.input_height < 1)
        throw ConfigError("architecture: input dimensions must be >= 1");
    if (arch.layers.empty()) throw ConfigError("architecture: empty layer stack");

    Plan plan;
    plan.input = Shape{1, arch.input_height, arch.input_width};
    Shape cur = plan.input;
    std::size_t offset = 0;

    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const LayerSpec& spec = arch.layers[i];
        LayerPlan lp{spec, cur, cur, offset, 0};
        switch (spec.kind) {
            case LayerKind::Conv: {
                if (spec.kernel < 1 || spec.channels_in != cur.c || spec.channels_out < 1)
                    throw ConfigError("architecture: bad conv spec at layer " + std::to_string(i));
                if (cur.h < spec.kernel || cur.w < spec.kernel)
                    throw ConfigError("architecture: conv kernel larger than input at layer " +
                                      std::to_string(i));
                lp.out = Shape{spec.channels_out, cur.h - spec.kernel + 1,
                               cur.w - spec.kernel + 1};
                lp.param_count = static_cast<std::size_t>(spec.channels_out) * spec.channels_in *
                                     spec.kernel * spec.kernel +
                                 spec.channels_out;
                break;
            }
            case LayerKind::Relu:
                break;
            case LayerKind::AvgPool2:
                if (cur.h < 2 || cur.w < 2)
                    throw ConfigError("architecture: pool on sub-2x2 input at layer " +
                                      std::to_string(i));
                lp.out = Shape{cur.c, cur.h / 2, cur.w / 2};
                break;
            case LayerKind::Dense:
                if (spec.units < 1)
                    throw ConfigError("architecture: dense units must be >= 1 at layer " +
                                      std::to_string(i));
                lp.out = Shape{spec.units, 1, 1};
                lp.param_count = static_cast<std::size_t>(spec.units) * cur.count() + spec.units;
                break;
            case LayerKind::Sigmoid:
                break;
            default:
                throw ConfigError("architecture: unknown layer kind at layer " +
                                  std::to_string(i));
        }
        offset += lp.param_count;
        cur = lp.out;
        plan.layers.push_back(lp);
    }
    plan.total_params = offset;
    plan.output = cur;
    return plan;
}

void require_scalar_sigmoid(const Plan& plan) {
    if (plan.output.count() != 1 || plan.layers.back().spec.kind != LayerKind::Sigmoid)
        throw ConfigError("architecture: classifier must end in a scalar sigmoid");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// --- layer kernels --------------------------------------------------------

void conv_forward(const double* in, Shape is, const double* w, Shape os, int k, double* out) {
    const double* bias = w + static_cast<std::size_t>(os.c) * is.c * k * k;
    for (int oc = 0; oc < os.c; ++oc) {
        double* oplane = out + static_cast<std::size_t>(oc) * os.h * os.w;
        std::fill(oplane, oplane + static_cast<std::size_t>(os.h) * os.w, bias[oc]);
        for (int ic = 0; ic < is.c; ++ic) {
            const double* iplane = in + static_cast<std::size_t>(ic) * is.h * is.w;
            const double* wk = w + (static_cast<std::size_t>(oc) * is.c + ic) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    const double coef = wk[ky * k + kx];
                    for (int y = 0; y < os.h; ++y) {
                        const double* irow = iplane + static_cast<std::size_t>(y + ky) * is.w + kx;
                        double* orow = oplane + static_cast<std::size_t>(y) * os.w;
                        for (int x = 0; x < os.w; ++x) orow[x] += coef * irow[x];
                    }
                }
            }
        }
    }
}

void conv_backward(const double* in, Shape is, const double* w, Shape os, int k,
                   const double* dout, double* din, double* dw) {
    double* dbias = dw + static_cast<std::size_t>(os.c) * is.c * k * k;
    for (int oc = 0; oc < os.c; ++oc) {
        const double* doplane = dout + static_cast<std::size_t>(oc) * os.h * os.w;
        double acc = 0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(os.h) * os.w; ++i)
            acc += doplane[i];
        dbias[oc] += acc;

        for (int ic = 0; ic < is.c; ++ic) {
            const double* iplane = in + static_cast<std::size_t>(ic) * is.h * is.w;
            double* diplane = din + static_cast<std::size_t>(ic) * is.h * is.w;
            const double* wk = w + (static_cast<std::size_t>(oc) * is.c + ic) * k * k;
            double* dwk = dw + (static_cast<std::size_t>(oc) * is.c + ic) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    const double coef = wk[ky * k + kx];
                    double wacc = 0;
                    for (int y = 0; y < os.h; ++y) {
                        const double* irow = iplane + static_cast<std::size_t>(y + ky) * is.w + kx;
                        double* dirow = diplane + static_cast<std::size_t>(y + ky) * is.w + kx;
                        const double* dorow = doplane + static_cast<std::size_t>(y) * os.w;
                        for (int x = 0; x < os.w; ++x) {
                            wacc += dorow[x] * irow[x];
                            dirow[x] += coef * dorow[x];
                        }
                    }
                    dwk[ky * k + kx] += wacc;
                }
            }
        }
    }
}

void pool_forward(const double* in, Shape is, Shape os, double* out) {
    for (int c = 0; c < is.c; ++c) {
        const double* iplane = in + static_cast<std::size_t>(c) * is.h * is.w;
        double* oplane = out + static_cast<std::size_t>(c) * os.h * os.w;
        for (int y = 0; y < os.h; ++y) {
            const double* r0 = iplane + static_cast<std::size_t>(2 * y) * is.w;
            const double* r1 = r0 + is.w;
            double* orow = oplane + static_cast<std::size_t>(y) * os.w;
            for (int x = 0; x < os.w; ++x)
                orow[x] = 0.25 * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]);
        }
    }
}

void pool_backward(Shape is, Shape os, const double* dout, double* din) {
    for (int c = 0; c < is.c; ++c) {
        double* diplane = din + static_cast<std::size_t>(c) * is.h * is.w;
        const double* doplane = dout + static_cast<std::size_t>(c) * os.h * os.w;
        for (int y = 0; y < os.h; ++y) {
            double* r0 = diplane + static_cast<std::size_t>(2 * y) * is.w;
            double* r1 = r0 + is.w;
            const double* dorow = doplane + static_cast<std::size_t>(y) * os.w;
            for (int x = 0; x < os.w; ++x) {
                const double g = 0.25 * dorow[x];
                r0[2 * x] += g;
                r0[2 * x + 1] += g;
                r1[2 * x] += g;
                r1[2 * x + 1] += g;
            }
        }
    }
}

void dense_forward(const double* in, std::size_t in_count, const double* w, int units,
                   double* out) {
    const double* bias = w + static_cast<std::size_t>(units) * in_count;
    for (int u = 0; u < units; ++u) {
        const double* wrow = w + static_cast<std::size_t>(u) * in_count;
        double acc = bias[u];
        for (std::size_t i = 0; i < in_count; ++i) acc += wrow[i] * in[i];
        out[u] = acc;
    }
}

void dense_backward(const double* in, std::size_t in_count, const double* w, int units,
                    const double* dout, double* din, double* dw) {
    double* dbias = dw + static_cast<std::size_t>(units) * in_count;
    for (int u = 0; u < units; ++u) {
        const double g = dout[u];
        const double* wrow = w + static_cast<std::size_t>(u) * in_count;
        double* dwrow = dw + static_cast<std::size_t>(u) * in_count;
        for (std::size_t i = 0; i < in_count; ++i) {
            dwrow[i] += g * in[i];
            din[i] += g * wrow[i];
        }
        dbias[u] += g;
    }
}

// --- forward / backward over the whole stack ------------------------------

struct Activations {
    // activations[0] is the input; activations[i+1] is layer i's output.
    std::vector<std::vector<double>> values;
};

double forward_pass(const Plan& plan, const std::vector<double>& params,
                    const ClassifierInput& input, Activations* store) {
    if (input.values.height() != plan.input.h || input.values.width() != plan.input.w)
        throw ConfigError("predict: input is " + std::to_string(input.values.width()) + "x" +
                          std::to_string(input.values.height()) + " but the model expects " +
                          std::to_string(plan.input.w) + "x" + std::to_string(plan.input.h));

    std::vector<double> cur(input.values.cells());
    if (store) {
        store->values.clear();
        store->values.push_back(cur);
    }

    for (const LayerPlan& lp : plan.layers) {
        std::vector<double> next(lp.out.count());
        const double* w = params.data() + lp.param_offset;
        switch (lp.spec.kind) {
            case LayerKind::Conv:
                conv_forward(cur.data(), lp.in, w, lp.out, lp.spec.kernel, next.data());
                break;
            case LayerKind::Relu:
                for (std::size_t i = 0; i < cur.size(); ++i) next[i] = std::max(0.0, cur[i]);
                break;
            case LayerKind::AvgPool2:
                pool_forward(cur.data(), lp.in, lp.out, next.data());
                break;
            case LayerKind::Dense:
                dense_forward(cur.data(), lp.in.count(), w, lp.spec.units, next.data());
                break;
            case LayerKind::Sigmoid:
                for (std::size_t i = 0; i < cur.size(); ++i) next[i] = sigmoid(cur[i]);
                break;
        }
        cur = std::move(next);
        if (store) store->values.push_back(cur);
    }
    return cur[0];
}

// Accumulates d(BCE)/d(params) into grad; returns the forward probability.
double backward_pass(const Plan& plan, const std::vector<double>& params,
                     const ClassifierInput& input, int label, std::vector<double>& grad) {
    require_scalar_sigmoid(plan);
    Activations acts;
    const double p = forward_pass(plan, params, input, &acts);

    // Combined sigmoid + BCE: gradient at the logit is p - y.
    std::vector<double> delta{p - static_cast<double>(label)};

    for (std::size_t li = plan.layers.size() - 1; li-- > 0;) {
        // delta currently holds dLoss/d(output of layer li).
        const LayerPlan& lp = plan.layers[li];
        const std::vector<double>& in_act = acts.values[li];
        std::vector<double> din(lp.in.count(), 0.0);
        const double* w = params.data() + lp.param_offset;
        double* dw = grad.data() + lp.param_offset;
        switch (lp.spec.kind) {
            case LayerKind::Conv:
                conv_backward(in_act.data(), lp.in, w, lp.out, lp.spec.kernel, delta.data(),
                              din.data(), dw);
                break;
            case LayerKind::Relu:
                for (std::size_t i = 0; i < din.size(); ++i)
                    din[i] = in_act[i] > 0 ? delta[i] : 0.0;
                break;
            case LayerKind::AvgPool2:
                pool_backward(lp.in, lp.out, delta.data(), din.data());
                break;
            case LayerKind::Dense:
                dense_backward(in_act.data(), lp.in.count(), w, lp.spec.units, delta.data(),
                               din.data(), dw);
                break;
            case LayerKind::Sigmoid:
                throw ConfigError("architecture: sigmoid only supported as the final layer");
        }
        delta = std::move(din);
    }
    return p;
}

double bce(double p, int label) {
    const double q = std::clamp(p, kProbEps, 1.0 - kProbEps);
    return label ? -std::log(q) : -std::log(1.0 - q);
}

// --- serialization helpers -------------------------------------------------

void put_bytes(std::ostream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<char, sizeof(T)> b;
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U u;
    std::memcpy(&u, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
    put_bytes(out, b.data(), b.size());
}

template <typename T>
T get_le(std::istream& in, const char* what) {
    std::array<unsigned char, sizeof(T)> b;
    in.read(reinterpret_cast<char*>(b.data()), b.size());
    if (in.gcount() != static_cast<std::streamsize>(b.size()))
        throw FormatError(std::string("model file: truncated ") + what);
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) u = (u << 8) | b[i];
    T value;
    std::memcpy(&value, &u, sizeof(T));
    return value;
}

}  // namespace

// --- normalize / matched filter -------------------------------------------

ClassifierInput normalize(const RealGrid& raw) {
    const std::size_t n = raw.cell_count();
    double sum = 0, sum_sq = 0;
    for (double v : raw.cells()) {
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double variance = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);

    ClassifierInput out{RealGrid(raw.width(), raw.height())};
    if (variance <= 0) return out;  // constant grid -> all zeros

    const double inv_std = 1.0 / std::sqrt(variance);
    for (std::size_t i = 0; i < n; ++i) out.values.cells()[i] = (raw.cells()[i] - mean) * inv_std;
    return out;
}

ClassifierInput normalize(const StackedImage& img) { return normalize(img.values.cast<double>()); }

MatchedFilterResult matched_filter_score(const CountGrid& values,
                                         const MatchedFilterParams& params) {
    if (values.empty()) throw ConfigError("matched_filter: empty grid");
    const auto [px, py] = values.argmax();
    MatchedFilterResult result{Score{0.0, params.threshold_sigma}, px, py};

    const auto& cells = values.cells();
    const bool constant = std::all_of(cells.begin(), cells.end(),
                                      [&](std::uint32_t v) { return v == cells.front(); });
    if (constant) return result;  // not scorable, stays a negative decision

    result.score.value = measure_snr(values, px, py, params.exclusion_radius);
    return result;
}

MatchedFilterResult matched_filter_score(const StackedImage& img,
                                         const MatchedFilterParams& params) {
    return matched_filter_score(img.values, params);
}

// --- architecture ----------------------------------------------------------

Architecture Architecture::classifier_default(int input_width, int input_height) {
    Architecture arch;
    arch.input_width = input_width;
    arch.input_height = input_height;
    arch.layers = {
        LayerSpec{LayerKind::Conv, 1, 8, 3, 0},
        LayerSpec{LayerKind::Relu},
        LayerSpec{LayerKind::AvgPool2},
        LayerSpec{LayerKind::Conv, 8, 16, 3, 0},
        LayerSpec{LayerKind::Relu},
        LayerSpec{LayerKind::AvgPool2},
        LayerSpec{LayerKind::Dense, 0, 0, 0, 1},
        LayerSpec{LayerKind::Sigmoid},
    };
    return arch;
}

Architecture Architecture::logistic(int input_width, int input_height) {
    Architecture arch;
    arch.input_width = input_width;
    arch.input_height = input_height;
    arch.layers = {LayerSpec{LayerKind::Dense, 0, 0, 0, 1}, LayerSpec{LayerKind::Sigmoid}};
    return arch;
}

std::size_t parameter_count(const Architecture& arch) { return plan_architecture(arch).total_params; }

CnnModel::CnnModel(Architecture arch, std::uint64_t init_seed) : arch_(std::move(arch)) {
    const Plan plan = plan_architecture(arch_);
    params_.assign(plan.total_params, 0.0);

    Rng rng(init_seed);
    for (const LayerPlan& lp : plan.layers) {
        if (lp.param_count == 0) continue;
        // Uniform(-a, a) with a = sqrt(6 / fan_in); biases start at zero.
        const std::size_t fan_in = lp.spec.kind == LayerKind::Conv
                                       ? static_cast<std::size_t>(lp.spec.channels_in) *
                                             lp.spec.kernel * lp.spec.kernel
                                       : lp.in.count();
        const std::size_t weight_count =
            lp.spec.kind == LayerKind::Conv ? lp.param_count - lp.spec.channels_out
                                            : lp.param_count - lp.spec.units;
        const double a = std::sqrt(6.0 / static_cast<double>(fan_in));
        for (std::size_t i = 0; i < weight_count; ++i)
            params_[lp.param_offset + i] = rng.uniform(-a, a);
    }
}

double CnnModel::forward(const ClassifierInput& input) const {
    const Plan plan = plan_architecture(arch_);
    require_scalar_sigmoid(plan);
    if (params_.size() != plan.total_params)
        throw ConfigError("model: parameter vector does not match architecture");
    return forward_pass(plan, params_, input, nullptr);
}

Score predict(const CnnModel& model, const ClassifierInput& input, double threshold) {
    return Score{model.forward(input), threshold};
}

double bce_loss(const CnnModel& model, const ClassifierInput& input, int label) {
    return bce(model.forward(input), label);
}

std::vector<double> loss_gradient(const CnnModel& model, const ClassifierInput& input,
                                  int label) {
    const Plan plan = plan_architecture(model.architecture());
    std::vector<double> grad(plan.total_params, 0.0);
    backward_pass(plan, model.params(), input, label, grad);
    return grad;
}

// --- training ---------------------------------------------------------------

CnnModel train_cnn(std::span<const LabeledSample> dataset, const TrainHyperparams& hp) {
    if (dataset.empty()) throw ConfigError("train: empty dataset");
    const bool has_pos = std::any_of(dataset.begin(), dataset.end(),
                                     [](const LabeledSample& s) { return s.label == 1; });
    const bool has_neg = std::any_of(dataset.begin(), dataset.end(),
                                     [](const LabeledSample& s) { return s.label == 0; });
    if (!has_pos || !has_neg)
        throw ConfigError("train: dataset must contain both classes");

    CnnModel model(Architecture::classifier_default(hp.input_width, hp.input_height),
                   substream_seed(hp.seed, 0));
    const Plan plan = plan_architecture(model.architecture());
    require_scalar_sigmoid(plan);

    model.metadata().seed = hp.seed;
    model.metadata().epochs = hp.epochs;
    model.metadata().learning_rate = hp.learning_rate;

    Rng shuffle_rng(substream_seed(hp.seed, 1));
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> grad(plan.total_params);
    for (std::uint32_t epoch = 0; epoch < hp.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0;
        for (std::size_t idx : order) {
            const LabeledSample& sample = dataset[idx];
            std::fill(grad.begin(), grad.end(), 0.0);
            const double p =
                backward_pass(plan, model.params(), sample.input, sample.label, grad);
            loss_sum += bce(p, sample.label);
            double* w = model.params().data();
            for (std::size_t i = 0; i < grad.size(); ++i) w[i] -= hp.learning_rate * grad[i];
        }
        model.metadata().loss_curve.push_back(loss_sum / static_cast<double>(dataset.size()));
    }
    return model;
}

double accuracy(const CnnModel& model, std::span<const LabeledSample> dataset, double threshold) {
    if (dataset.empty()) return 0;
    std::size_t hits = 0;
    for (const LabeledSample& s : dataset) {
        const bool positive = model.forward(s.input) >= threshold;
        if (positive == (s.label == 1)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

double gradient_check(const CnnModel& model, const ClassifierInput& input, int label,
                      const GradientCheckParams& params) {
    const std::vector<double> analytic = loss_gradient(model, input, label);

    std::vector<std::size_t> indices(analytic.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    if (params.sample_count > 0 &&
        static_cast<std::size_t>(params.sample_count) < indices.size()) {
        Rng rng(params.seed);
        rng.shuffle(indices);
        indices.resize(static_cast<std::size_t>(params.sample_count));
    }

    CnnModel probe = model;
    double worst = 0;
    for (std::size_t i : indices) {
        const double saved = probe.params()[i];
        probe.params()[i] = saved + params.step;
        const double up = bce_loss(probe, input, label);
        probe.params()[i] = saved - params.step;
        const double down = bce_loss(probe, input, label);
        probe.params()[i] = saved;

        const double numeric = (up - down) / (2.0 * params.step);
        const double denom = std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-8);
        worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    return worst;
}

// --- serialization ----------------------------------------------------------

void save_model(std::ostream& out, const CnnModel& model) {
    const Plan plan = plan_architecture(model.architecture());
    if (model.params().size() != plan.total_params)
        throw ConfigError("save_model: parameter vector does not match architecture");

    put_bytes(out, kMagic, 4);
    put_le(out, kFormatVersion);
    put_le(out, static_cast<std::uint32_t>(model.architecture().input_width));
    put_le(out, static_cast<std::uint32_t>(model.architecture().input_height));
    put_le(out, static_cast<std::uint32_t>(model.architecture().layers.size()));
    for (const LayerSpec& l : model.architecture().layers) {
        out.put(static_cast<char>(l.kind));
        put_le(out, static_cast<std::uint32_t>(l.channels_in));
        put_le(out, static_cast<std::uint32_t>(l.channels_out));
        put_le(out, static_cast<std::uint32_t>(l.kernel));
        put_le(out, static_cast<std::uint32_t>(l.units));
    }
    put_le(out, static_cast<std::uint64_t>(model.params().size()));
    for (double v : model.params()) put_le(out, v);

    const TrainingMetadata& meta = model.metadata();
    put_le(out, meta.seed);
    put_le(out, meta.epochs);
    put_le(out, meta.learning_rate);
    put_le(out, static_cast<std::uint64_t>(meta.loss_curve.size()));
    for (double v : meta.loss_curve) put_le(out, v);

    if (!out) throw FormatError("save_model: output stream failure");
}

CnnModel load_model(std::istream& in) {
    std::array<char, 4> magic;
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || std::memcmp(magic.data(), kMagic, 4) != 0)
        throw FormatError("model file: bad magic, expected 'SCNN'");
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kFormatVersion)
        throw FormatError("model file: unsupported version " + std::to_string(version));

    Architecture arch;
    arch.input_width = static_cast<std::int32_t>(get_le<std::uint32_t>(in, "input width"));
    arch.input_height = static_cast<std::int32_t>(get_le<std::uint32_t>(in, "input height"));
    const auto layer_count = get_le<std::uint32_t>(in, "layer count");
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        LayerSpec l;
        const int kind = in.get();
        if (kind == std::istream::traits_type::eof())
            throw FormatError("model file: truncated layer descriptor");
        l.kind = static_cast<LayerKind>(kind);
        l.channels_in = static_cast<std::int32_t>(get_le<std::uint32_t>(in, "layer"));
        l.channels_out = static_cast<std::int32_t>(get_le<std::uint32_t>(in, "layer"));
        l.kernel = static_cast<std::int32_t>(get_le<std::uint32_t>(in, "layer"));
        l.units = static_cast<std::int32_t>(get_le<std::uint32_t>(in, "layer"));
        arch.layers.push_back(l);
    }

    const Plan plan = plan_architecture(arch);  // validates the descriptor
    const auto param_count = get_le<std::uint64_t>(in, "parameter count");
    if (param_count != plan.total_params)
        throw FormatError("model file: parameter count " + std::to_string(param_count) +
                          " does not match architecture (" + std::to_string(plan.total_params) +
                          ")");

    CnnModel model(arch, 0);
    for (std::size_t i = 0; i < param_count; ++i)
        model.params()[i] = get_le<double>(in, "parameters");

    model.metadata().seed = get_le<std::uint64_t>(in, "metadata seed");
    model.metadata().epochs = get_le<std::uint32_t>(in, "metadata epochs");
    model.metadata().learning_rate = get_le<double>(in, "metadata learning rate");
    const auto curve_len = get_le<std::uint64_t>(in, "loss curve length");
    model.metadata().loss_curve.resize(curve_len);
    for (std::size_t i = 0; i < curve_len; ++i)
        model.metadata().loss_curve[i] = get_le<double>(in, "loss curve");
    return model;
}

void save_model_file(const std::filesystem::path& path, const CnnModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    save_model(out, model);
}

CnnModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    return load_model(in);
}

}  // namespace stackcnn
