#include "rbfdet/detector.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "rbfdet/dataset.hpp"
#include "rbfdet/errors.hpp"

namespace rbfdet {

namespace {

GrayImage downscale_bilinear(const GrayImage& src, int out_w, int out_h) {
    GrayImage dst(out_w, out_h);
    const double x_ratio = static_cast<double>(src.width) / out_w;
    const double y_ratio = static_cast<double>(src.height) / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        // Center-aligned sampling, clamped at the borders.
        const double sy = std::max(0.0, (oy + 0.5) * y_ratio - 0.5);
        const int y0 = std::min(static_cast<int>(sy), src.height - 1);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double fy = sy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            const double sx = std::max(0.0, (ox + 0.5) * x_ratio - 0.5);
            const int x0 = std::min(static_cast<int>(sx), src.width - 1);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double fx = sx - x0;
            const double top = src.at(x0, y0) * (1.0 - fx) + src.at(x1, y0) * fx;
            const double bottom = src.at(x0, y1) * (1.0 - fx) + src.at(x1, y1) * fx;
            const double v = top * (1.0 - fy) + bottom * fy;
            dst.set(ox, oy, static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))));
        }
    }
    return dst;
}

bool box_order(const BoundingBox& a, const BoundingBox& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.scale_index < b.scale_index;
}

// Every window of one pyramid level, mapped back to level-0 coordinates.
void scan_level(const GrayImage& level, int level_index, const GrayImage& original,
                const RbfModel& model, const DetectorConfig& config,
                std::vector<BoundingBox>& out) {
    const int p = config.patch_size;
    if (level.width < p || level.height < p) return;

    const double scale = std::pow(config.scale_factor, level_index);
    int side = static_cast<int>(std::lround(p * scale));
    side = std::min(side, std::min(original.width, original.height));

    GrayImage patch(p, p);
    for (int y = 0; y + p <= level.height; y += config.stride) {
        for (int x = 0; x + p <= level.width; x += config.stride) {
            for (int row = 0; row < p; ++row) {
                const std::uint8_t* src =
                    level.pixels.data() + static_cast<std::size_t>(y + row) * level.width + x;
                std::copy(src, src + p, patch.pixels.begin() + static_cast<std::size_t>(row) * p);
            }
            const double score = forward(normalize_patch(patch), model);
            if (score < config.score_threshold) continue;

            BoundingBox box;
            box.side = side;
            box.x = std::clamp(static_cast<int>(std::lround(x * scale)), 0,
                               original.width - side);
            box.y = std::clamp(static_cast<int>(std::lround(y * scale)), 0,
                               original.height - side);
            box.score = score;
            box.scale_index = level_index;
            out.push_back(box);
        }
    }
}

} // namespace

void DetectorConfig::validate() const {
    if (patch_size < 1)
        throw InvalidParameterError("detector: patch_size must be >= 1");
    if (stride < 1)
        throw InvalidParameterError("detector: stride must be >= 1");
    if (!(scale_factor > 1.0) || !std::isfinite(scale_factor))
        throw InvalidParameterError("detector: scale_factor must be > 1");
    if (min_level_size < 1)
        throw InvalidParameterError("detector: min_level_size must be >= 1");
    if (!(nms_overlap >= 0.0) || !(nms_overlap <= 1.0))
        throw InvalidParameterError("detector: nms_overlap must lie in [0, 1]");
    if (!std::isfinite(score_threshold))
        throw InvalidParameterError("detector: score_threshold must be finite");
}

std::vector<GrayImage> build_pyramid(const GrayImage& image, const DetectorConfig& config) {
    config.validate();
    if (image.width < config.patch_size || image.height < config.patch_size)
        throw InvalidParameterError("build_pyramid: image " + std::to_string(image.width) + "x" +
                                    std::to_string(image.height) + " smaller than patch size " +
                                    std::to_string(config.patch_size));

    std::vector<GrayImage> levels;
    levels.push_back(image);
    while (true) {
        const GrayImage& prev = levels.back();
        const int w = static_cast<int>(std::floor(prev.width / config.scale_factor));
        const int h = static_cast<int>(std::floor(prev.height / config.scale_factor));
        if (w < config.min_level_size || h < config.min_level_size) break;
        levels.push_back(downscale_bilinear(prev, w, h));
    }
    return levels;
}

std::vector<BoundingBox> scan(const GrayImage& image, const RbfModel& model,
                              const DetectorConfig& config, int jobs) {
    model.validate();
    if (model.input_dim != config.patch_size * config.patch_size)
        throw DimensionMismatchError("scan: model input_dim " + std::to_string(model.input_dim) +
                                     " != patch_size^2 = " +
                                     std::to_string(config.patch_size * config.patch_size));
    const std::vector<GrayImage> levels = build_pyramid(image, config);

    std::vector<std::vector<BoundingBox>> per_level(levels.size());
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(levels.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < levels.size(); ++i)
            scan_level(levels[i], static_cast<int>(i), image, model, config, per_level[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < levels.size(); i = next.fetch_add(1))
                    scan_level(levels[i], static_cast<int>(i), image, model, config, per_level[i]);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<BoundingBox> boxes;
    for (auto& lv : per_level) boxes.insert(boxes.end(), lv.begin(), lv.end());
    std::sort(boxes.begin(), boxes.end(), box_order);
    return boxes;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    const int ix = std::max(0, std::min(a.x + a.side, b.x + b.side) - std::max(a.x, b.x));
    const int iy = std::max(0, std::min(a.y + a.side, b.y + b.side) - std::max(a.y, b.y));
    const double inter = static_cast<double>(ix) * iy;
    const double uni =
        static_cast<double>(a.side) * a.side + static_cast<double>(b.side) * b.side - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<BoundingBox> nms(std::vector<BoundingBox> boxes, double overlap_threshold) {
    std::sort(boxes.begin(), boxes.end(), box_order);
    std::vector<BoundingBox> kept;
    for (const auto& candidate : boxes) {
        bool suppressed = false;
        for (const auto& winner : kept) {
            if (iou(candidate, winner) > overlap_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(candidate);
    }
    return kept;
}

std::vector<BoundingBox> detect(const GrayImage& image, const RbfModel& model,
                                const DetectorConfig& config, int jobs) {
    return nms(scan(image, model, config, jobs), config.nms_overlap);
}

void annotate(const GrayImage& image, const std::vector<BoundingBox>& boxes,
              const std::filesystem::path& path) {
    GrayImage out = image;
    for (const auto& b : boxes) {
        if (b.side < 1 || b.x < 0 || b.y < 0 || b.x + b.side > image.width ||
            b.y + b.side > image.height)
            throw InvalidParameterError("annotate: box outside image bounds");
        const int x1 = b.x + b.side - 1;
        const int y1 = b.y + b.side - 1;
        for (int x = b.x; x <= x1; ++x) {
            out.set(x, b.y, 255);
            out.set(x, y1, 255);
        }
        for (int y = b.y; y <= y1; ++y) {
            out.set(b.x, y, 255);
            out.set(x1, y, 255);
        }
    }
    save_pgm(out, path);
}

void write_detections_csv(const std::vector<BoundingBox>& boxes,
                          const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << "x,y,side,score,scale_index\n";
    char buf[128];
    for (const auto& b : boxes) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.6f,%d", b.x, b.y, b.side, b.score,
                      b.scale_index);
        out << buf << "\n";
    }
    if (!out)
        throw IoError("write failure on " + path.string());
}

} // namespace rbfdet
