#pragma once

#include <cstdint>
#include <vector>

#include "stackcnn/classifier.hpp"

namespace stackcnn {

/// Synthetic corpus recipe: labeled stacked images built from generated
/// scenes. Positives stack at the true (or a lattice-adjacent) vector;
/// negatives stack at a far vector or come from source-free noise scenes.
struct CorpusParams {
    int sample_count = 2000;
    std::uint32_t width = 80;
    std::uint32_t height = 60;
    std::uint64_t dt_us = 80000;
    int frames_per_stack = 16;
    double max_displacement = 1.0;
    double background_rate_hz = 50.0;
    double source_rate_min_hz = 150.0;
    double source_rate_max_hz = 450.0;
    std::uint64_t seed = 1;
};

std::vector<LabeledSample> make_corpus(const CorpusParams& params);

/// Deterministic split: every fifth sample goes to validation.
void split_corpus(std::vector<LabeledSample> corpus, std::vector<LabeledSample>& train,
                  std::vector<LabeledSample>& validation);

}  // namespace stackcnn
