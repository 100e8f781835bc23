#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cgvm/dataset.hpp"

namespace cgvm {

/// Label cleanup applied before any element matching: trim, casefold,
/// collapse whitespace, strip a trailing plural 's' (guarding "-ss" words).
/// An optional synonym map is applied after the rules.
std::string normalize_label(const std::string& raw,
                            const std::map<std::string, std::string>& synonyms = {});

enum class DetectionOrigin { HumanAnnotation, Detector };

struct DetectionSet {
    std::string image_id;
    std::vector<ElementInstance> instances;
    DetectionOrigin origin = DetectionOrigin::HumanAnnotation;
    std::string detector_model;  // set when origin == Detector
};

/// Reads a per-image detection JSON file, normalizing labels and dropping
/// detector instances below the confidence threshold.
DetectionSet load_detections(const std::string& path, double det_threshold = 0.7);
DetectionSet parse_detections(const std::string& json_text, const std::string& origin_name,
                              double det_threshold = 0.7);
void write_detections(const DetectionSet& det, const std::string& path);

struct EpScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Element presence over distinct label sets. Degenerate conventions:
/// an empty generated set scores precision 1 iff the truth set is empty
/// too (and symmetrically for recall).
EpScores ep_scores(const DetectionSet& gt, const DetectionSet& gen);

double iou_box(const BoundingBox& a, const BoundingBox& b);

enum class IouVariant { Common, Precision, Recall };
enum class MatchStrategy { Greedy, Optimal };
enum class IouAveraging { PerClass, PerInstance };

/// Per-class one-to-one box matching, then averaging per the variant.
/// Common has no defined value when no class is present in both sets;
/// that case returns nullopt so callers can flag and skip the sample.
std::optional<double> iou_variant(const DetectionSet& gt, const DetectionSet& gen,
                                  IouVariant variant,
                                  MatchStrategy strategy = MatchStrategy::Greedy,
                                  IouAveraging averaging = IouAveraging::PerClass);

}  // namespace cgvm
