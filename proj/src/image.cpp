#include "rbfdet/image.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "rbfdet/errors.hpp"

namespace rbfdet {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failure on " + path.string());
    return data;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t offset,
                       const std::string& what) {
    throw ParseError(path.string() + ": " + what + " at byte " + std::to_string(offset));
}

bool is_pnm_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Cursor over the raw bytes; handles PNM whitespace and '#' comments.
struct PnmCursor {
    const std::string& data;
    const std::filesystem::path& path;
    std::size_t pos = 0;

    bool eof() const { return pos >= data.size(); }

    void skip_space_and_comments() {
        while (!eof()) {
            if (is_pnm_space(data[pos])) {
                ++pos;
            } else if (data[pos] == '#') {
                while (!eof() && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    // Unsigned decimal integer token.
    long next_int(const char* what) {
        skip_space_and_comments();
        if (eof()) fail(path, pos, std::string("missing ") + what);
        if (data[pos] < '0' || data[pos] > '9')
            fail(path, pos, std::string("expected digit for ") + what);
        long value = 0;
        while (!eof() && data[pos] >= '0' && data[pos] <= '9') {
            value = value * 10 + (data[pos] - '0');
            if (value > 1'000'000'000) fail(path, pos, std::string("oversized ") + what);
            ++pos;
        }
        return value;
    }
};

} // namespace

GrayImage load_pgm(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    PnmCursor cur{data, path};

    if (data.size() < 2)
        fail(path, 0, "missing PNM magic");
    const std::string magic = data.substr(0, 2);
    if (magic != "P2" && magic != "P5")
        fail(path, 0, "unsupported magic '" + magic + "' (only P2/P5 grayscale PGM)");
    const bool binary = (magic == "P5");
    cur.pos = 2;

    const long width = cur.next_int("width");
    const long height = cur.next_int("height");
    const std::size_t maxval_at = cur.pos;
    const long maxval = cur.next_int("maxval");
    if (width < 1 || height < 1)
        fail(path, 2, "non-positive dimensions");
    if (maxval < 1 || maxval > 255)
        fail(path, maxval_at, "unsupported max value " + std::to_string(maxval));

    GrayImage img(static_cast<int>(width), static_cast<int>(height));
    const std::size_t count = img.pixels.size();

    if (binary) {
        if (cur.eof() || !is_pnm_space(data[cur.pos]))
            fail(path, cur.pos, "expected single whitespace before raster");
        ++cur.pos;  // exactly one separator byte, then the raster
        if (data.size() - cur.pos < count)
            fail(path, data.size(), "truncated raster (" +
                                        std::to_string(data.size() - cur.pos) + " of " +
                                        std::to_string(count) + " bytes)");
        for (std::size_t i = 0; i < count; ++i) {
            const auto v = static_cast<std::uint8_t>(data[cur.pos]);
            if (v > maxval) fail(path, cur.pos, "pixel value exceeds maxval");
            img.pixels[i] = v;
            ++cur.pos;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = cur.pos;
            const long v = cur.next_int("pixel");
            if (v > maxval) fail(path, at, "pixel value exceeds maxval");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }

    cur.skip_space_and_comments();
    if (!cur.eof())
        fail(path, cur.pos, "trailing data after raster");
    return img;
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
    if (image.width < 1 || image.height < 1 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw InvalidParameterError("save_pgm: malformed image");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out)
        throw IoError("write failure on " + path.string());
}

GrayImage load_png(const std::filesystem::path& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;

    if (!png_image_begin_read_from_file(&png, path.string().c_str()))
        throw ParseError(path.string() + ": " + png.message);

    png.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, rgb.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw ParseError(path.string() + ": " + msg);
    }

    GrayImage img(static_cast<int>(png.width), static_cast<int>(png.height));
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const unsigned sum = rgb[3 * i] + rgb[3 * i + 1] + rgb[3 * i + 2];
        img.pixels[i] = static_cast<std::uint8_t>(std::lround(sum / 3.0));
    }
    return img;
}

GrayImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.close();
    if (magic[0] == 'P')
        return load_pgm(path);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P')
        return load_png(path);
    throw ParseError(path.string() + ": unrecognized image format (PGM or PNG expected)");
}

} // namespace rbfdet
