#ifndef RBFDET_DETECTOR_HPP
#define RBFDET_DETECTOR_HPP

#include <filesystem>
#include <vector>

#include "rbfdet/image.hpp"
#include "rbfdet/model.hpp"

namespace rbfdet {

/// Square detection in original-image pixel coordinates.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int side = 0;
    double score = 0.0;
    int scale_index = 0;
};

struct DetectorConfig {
    int patch_size = 19;
    int stride = 1;
    double score_threshold = 0.0;
    double scale_factor = 1.2;   // > 1; each level shrinks by this factor
    int min_level_size = 19;     // stop the pyramid below this dimension
    double nms_overlap = 0.3;    // IoU above this suppresses; 1.0 keeps everything

    /// Throws InvalidParameterError on out-of-range fields.
    void validate() const;
};

/// Level 0 is the input; each next level is a bilinear downscale by
/// 1/scale_factor (dimensions floor(prev/factor)), until either dimension
/// drops below min_level_size. Throws on images smaller than patch_size.
std::vector<GrayImage> build_pyramid(const GrayImage& image, const DetectorConfig& config);

/// Scores every stride-aligned window of every pyramid level with
/// normalize_patch + forward and keeps those at or above
/// score_threshold, mapped back to original coordinates. Sorted by
/// descending score, ties by (y, x, scale_index) ascending. jobs > 1
/// spreads pyramid levels across threads (results are order-independent).
std::vector<BoundingBox> scan(const GrayImage& image, const RbfModel& model,
                              const DetectorConfig& config, int jobs = 1);

/// Intersection-over-union of two boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Greedy non-maximum suppression: accept the best-scoring box, drop
/// boxes overlapping an accepted one with IoU > overlap_threshold.
/// Output is in acceptance (descending score) order.
std::vector<BoundingBox> nms(std::vector<BoundingBox> boxes, double overlap_threshold);

/// nms(scan(...)) with config.nms_overlap.
std::vector<BoundingBox> detect(const GrayImage& image, const RbfModel& model,
                                const DetectorConfig& config, int jobs = 1);

/// Writes a copy of the image with 1-pixel white outlines at each box
/// (PGM). Boxes must lie inside the image.
void annotate(const GrayImage& image, const std::vector<BoundingBox>& boxes,
              const std::filesystem::path& path);

/// CSV with header x,y,side,score,scale_index, one row per box.
void write_detections_csv(const std::vector<BoundingBox>& boxes,
                          const std::filesystem::path& path);

} // namespace rbfdet

#endif
