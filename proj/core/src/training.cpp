#include "stackcnn/training.hpp"

#include <cmath>
#include <utility>

#include "stackcnn/errors.hpp"
#include "stackcnn/rng.hpp"
#include "stackcnn/synth.hpp"

namespace stackcnn {

namespace {

double vector_distance(TrialVector a, TrialVector b) {
    return std::hypot(a.vx - b.vx, a.vy - b.vy);
}

TrialVector pick(const VectorPool& pool, Rng& rng) {
    return pool.vectors[rng.below(pool.vectors.size())];
}

// A vector one lattice step away from v (excluding v itself).
TrialVector pick_adjacent(const VectorPool& pool, TrialVector v, Rng& rng) {
    std::vector<TrialVector> near;
    for (const TrialVector& u : pool.vectors)
        if (u != v && vector_distance(u, v) <= pool.lattice_spacing * 1.001) near.push_back(u);
    if (near.empty()) return v;  // corner vectors always have in-pool neighbours, but be safe
    return near[rng.below(near.size())];
}

// Clearly wrong vector: at least two lattice steps from the truth, so the
// negative class never straddles the labeling boundary.
TrialVector pick_far(const VectorPool& pool, TrialVector truth, Rng& rng) {
    for (;;) {
        const TrialVector u = pick(pool, rng);
        if (vector_distance(u, truth) > 2.0 * pool.lattice_spacing) return u;
    }
}

}  // namespace

std::vector<LabeledSample> make_corpus(const CorpusParams& params) {
    if (params.sample_count < 2) throw ConfigError("corpus: sample_count must be >= 2");
    if (params.frames_per_stack < 2)
        throw ConfigError("corpus: frames_per_stack must be >= 2");

    const VectorPool pool = make_hex_pool(params.max_displacement);
    const double dt_s = static_cast<double>(params.dt_us) * 1e-6;
    const int n = params.frames_per_stack;

    std::vector<LabeledSample> corpus;
    corpus.reserve(params.sample_count);

    for (int i = 0; i < params.sample_count; ++i) {
        Rng rng(substream_seed(params.seed, static_cast<std::uint64_t>(i)));
        const bool positive = (i % 2) == 0;
        const bool with_source = positive || rng.uniform() < 0.5;

        SceneConfig scene;
        scene.width = params.width;
        scene.height = params.height;
        scene.duration_us = static_cast<std::uint64_t>(n) * params.dt_us;
        scene.background_rate_hz = params.background_rate_hz;
        scene.seed = rng.bits();
        scene.dt_us = params.dt_us;

        TrialVector truth{};
        if (with_source) {
            truth = pick(pool, rng);
            const double travel_x = truth.vx * n;
            const double travel_y = truth.vy * n;

            SourceSpec src;
            src.vx_px_s = truth.vx / dt_s;
            src.vy_px_s = truth.vy / dt_s;
            src.x0 = params.width / 2.0 - travel_x / 2.0 + rng.uniform(-8.0, 8.0);
            src.y0 = params.height / 2.0 - travel_y / 2.0 + rng.uniform(-8.0, 8.0);
            src.rate_hz = rng.uniform(params.source_rate_min_hz, params.source_rate_max_hz);
            src.t_enter_us = 0;
            src.t_exit_us = scene.duration_us;
            src.psf_sigma_px = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.3, 0.8);
            scene.sources.push_back(src);
        }

        TrialVector trial;
        if (positive)
            trial = rng.uniform() < 0.8 ? truth : pick_adjacent(pool, truth, rng);
        else if (with_source)
            trial = pick_far(pool, truth, rng);
        else
            trial = pick(pool, rng);

        const Scene generated = generate_scene(scene);
        const auto frames = build_simil_frames(generated.events, generated.header,
                                               params.dt_us, PolarityPolicy::Both);
        const StackedImage stacked =
            stack(std::span(frames).first(static_cast<std::size_t>(n)), trial);
        corpus.push_back(LabeledSample{normalize(stacked), positive ? 1 : 0});
    }
    return corpus;
}

void split_corpus(std::vector<LabeledSample> corpus, std::vector<LabeledSample>& train,
                  std::vector<LabeledSample>& validation) {
    train.clear();
    validation.clear();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (i % 5 == 4)
            validation.push_back(std::move(corpus[i]));
        else
            train.push_back(std::move(corpus[i]));
    }
}

}  // namespace stackcnn
