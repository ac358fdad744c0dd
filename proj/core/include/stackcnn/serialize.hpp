#pragma once

#include <span>
#include <string>
#include <vector>

#include "stackcnn/pipeline.hpp"
#include "stackcnn/synth.hpp"

namespace stackcnn {

// JSON config files and structured-text reports. Emission is deterministic:
// identical values always produce identical bytes.

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

std::string to_string(PolarityPolicy policy);
PolarityPolicy polarity_policy_from_string(const std::string& name);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

SceneConfig parse_scene_config(const std::string& json_text);
std::string scene_config_json(const SceneConfig& config);

PipelineConfig parse_pipeline_config(const std::string& json_text);
std::string pipeline_config_json(const PipelineConfig& config);

std::string ground_truth_json(const GroundTruth& truth);
GroundTruth parse_ground_truth(const std::string& json_text);

std::string latency_report_json(const WindowLatencyReport& report);
WindowLatencyReport parse_latency_report(const std::string& json_text);

// Detection report: '#' comment header, then one CSV record per detection:
// t_end_us,vx,vy,score,peak_x,peak_y,classifier,mf_sigma
std::string detection_report_text(std::span<const Detection> detections);
std::vector<Detection> parse_detection_report(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace stackcnn
