#ifndef RBFDET_IMAGE_HPP
#define RBFDET_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rbfdet {

/// 8-bit grayscale image, row-major, top-left origin.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    void set(int x, int y, std::uint8_t v) {
        pixels[static_cast<std::size_t>(y) * width + x] = v;
    }

    bool operator==(const GrayImage&) const = default;
};

/// Decodes an ASCII ("P2") or binary ("P5") PGM with maxval <= 255.
/// '#' comments in the header are honored. Parse errors report the path
/// and the byte offset of the offending data.
GrayImage load_pgm(const std::filesystem::path& path);

/// Writes binary P5 with maxval 255. load_pgm(save_pgm(img)) == img.
void save_pgm(const GrayImage& image, const std::filesystem::path& path);

/// Decodes a PNG; color inputs are reduced to luminance (r + g + b) / 3.
GrayImage load_png(const std::filesystem::path& path);

/// Dispatches on the file's magic bytes: PGM or PNG.
GrayImage load_image(const std::filesystem::path& path);

} // namespace rbfdet

#endif
