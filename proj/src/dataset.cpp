#include "rbfdet/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "rbfdet/errors.hpp"

namespace rbfdet {

namespace {

bool is_image_file(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".pgm" || ext == ".png";
}

std::vector<std::filesystem::path> list_patch_files(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("dataset directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path()))
            files.push_back(entry.path());
    }
    // Directory enumeration order is unspecified; the contract is
    // lexicographic by filename.
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
        return a.filename().string() < b.filename().string();
    });
    return files;
}

void append_class(const std::vector<std::filesystem::path>& files, int patch_size, double target,
                  LabeledDataset& out) {
    for (const auto& f : files) {
        const GrayImage img = load_image(f);
        if (img.width != patch_size || img.height != patch_size)
            throw InvalidParameterError(f.string() + ": is " + std::to_string(img.width) + "x" +
                                        std::to_string(img.height) + ", expected " +
                                        std::to_string(patch_size) + "x" +
                                        std::to_string(patch_size));
        out.inputs.push_back(normalize_patch(img));
        out.targets.push_back(target);
    }
}

} // namespace

FeatureVector normalize_patch(const GrayImage& patch) {
    if (patch.width != patch.height || patch.width < 1)
        throw InvalidParameterError("normalize_patch: patch must be square, got " +
                                    std::to_string(patch.width) + "x" +
                                    std::to_string(patch.height));
    const std::size_t n = patch.pixels.size();
    FeatureVector v(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = patch.pixels[i] / 255.0;
        mean += v[i];
    }
    mean /= static_cast<double>(n);

    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] -= mean;
        var += v[i] * v[i];
    }
    var /= static_cast<double>(n);

    if (var == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        return v;
    }
    const double inv_sd = 1.0 / std::sqrt(var);
    for (double& x : v) x *= inv_sd;
    return v;
}

LabeledDataset load_dataset(const DatasetManifest& manifest) {
    if (manifest.patch_size < 1)
        throw InvalidParameterError("load_dataset: patch_size must be positive");

    const auto face_files = list_patch_files(manifest.face_dir);
    const auto nonface_files = list_patch_files(manifest.nonface_dir);

    if (manifest.expected_counts) {
        const auto [want_faces, want_nonfaces] = *manifest.expected_counts;
        if (face_files.size() != want_faces || nonface_files.size() != want_nonfaces)
            throw InvalidParameterError(
                "dataset count mismatch: found " + std::to_string(face_files.size()) + " faces / " +
                std::to_string(nonface_files.size()) + " non-faces, expected " +
                std::to_string(want_faces) + " / " + std::to_string(want_nonfaces));
    }

    LabeledDataset ds;
    ds.inputs.reserve(face_files.size() + nonface_files.size());
    ds.targets.reserve(face_files.size() + nonface_files.size());
    append_class(face_files, manifest.patch_size, +1.0, ds);
    append_class(nonface_files, manifest.patch_size, -1.0, ds);
    ds.validate();
    return ds;
}

LabeledDataset synth_dataset(std::uint64_t seed, int n_per_class, int dim, double separation) {
    if (n_per_class < 1)
        throw InvalidParameterError("synth_dataset: n_per_class must be >= 1");
    if (dim < 1)
        throw InvalidParameterError("synth_dataset: dim must be >= 1");
    if (separation < 0.0 || !std::isfinite(separation))
        throw InvalidParameterError("synth_dataset: separation must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    LabeledDataset ds;
    ds.inputs.reserve(2 * static_cast<std::size_t>(n_per_class));
    ds.targets.reserve(2 * static_cast<std::size_t>(n_per_class));
    for (int cls = 0; cls < 2; ++cls) {
        const double offset = (cls == 0 ? +0.5 : -0.5) * separation;
        for (int i = 0; i < n_per_class; ++i) {
            FeatureVector v(dim);
            for (int d = 0; d < dim; ++d) v[d] = unit(rng);
            v[0] += offset;
            ds.inputs.push_back(std::move(v));
            ds.targets.push_back(cls == 0 ? +1.0 : -1.0);
        }
    }
    return ds;
}

void write_patch_dataset(const LabeledDataset& dataset, const std::filesystem::path& root,
                         int patch_size) {
    dataset.validate();
    if (dataset.dim() != patch_size * patch_size)
        throw InvalidParameterError("write_patch_dataset: vector length " +
                                    std::to_string(dataset.dim()) + " != patch_size^2 = " +
                                    std::to_string(patch_size * patch_size));

    const auto face_dir = root / "faces";
    const auto nonface_dir = root / "nonfaces";
    std::filesystem::create_directories(face_dir);
    std::filesystem::create_directories(nonface_dir);

    std::size_t face_idx = 0, nonface_idx = 0;
    char name[32];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const FeatureVector& v = dataset.inputs[i];
        const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
        const double lo = *lo_it, hi = *hi_it;
        const double scale = (hi > lo) ? 255.0 / (hi - lo) : 0.0;

        GrayImage img(patch_size, patch_size);
        for (std::size_t p = 0; p < v.size(); ++p) {
            const double q = (hi > lo) ? (v[p] - lo) * scale : 128.0;
            img.pixels[p] = static_cast<std::uint8_t>(std::lround(q));
        }

        if (dataset.targets[i] > 0) {
            std::snprintf(name, sizeof(name), "face_%05zu.pgm", face_idx++);
            save_pgm(img, face_dir / name);
        } else {
            std::snprintf(name, sizeof(name), "nonface_%05zu.pgm", nonface_idx++);
            save_pgm(img, nonface_dir / name);
        }
    }
}

} // namespace rbfdet
