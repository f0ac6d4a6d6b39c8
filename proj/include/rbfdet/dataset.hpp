#ifndef RBFDET_DATASET_HPP
#define RBFDET_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>

#include "rbfdet/image.hpp"
#include "rbfdet/trainer.hpp"

namespace rbfdet {

struct DatasetManifest {
    std::filesystem::path face_dir;
    std::filesystem::path nonface_dir;
    int patch_size = 19;
    /// (faces, nonfaces); when set, loading fails unless the counts match.
    std::optional<std::pair<std::size_t, std::size_t>> expected_counts;
};

/// Flattens a square patch row-major, scales by 1/255, then standardizes
/// to zero mean and unit (population) standard deviation. A constant
/// patch maps to the all-zeros vector.
FeatureVector normalize_patch(const GrayImage& patch);

/// Loads faces (+1) then non-faces (-1), each directory in lexicographic
/// filename order. Every file must decode to patch_size x patch_size.
LabeledDataset load_dataset(const DatasetManifest& manifest);

/// Two isotropic unit-variance Gaussian blobs, class means `separation`
/// apart along the first axis; +1 samples first. Deterministic per seed.
LabeledDataset synth_dataset(std::uint64_t seed, int n_per_class, int dim, double separation);

/// Writes a dataset as PGM patches under <root>/faces and <root>/nonfaces,
/// min-max rescaling each vector into [0, 255]. Vector length must equal
/// patch_size^2. Deterministic file contents and names.
void write_patch_dataset(const LabeledDataset& dataset, const std::filesystem::path& root,
                         int patch_size);

} // namespace rbfdet

#endif
