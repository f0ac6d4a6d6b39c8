#ifndef RBFDET_MODEL_IO_HPP
#define RBFDET_MODEL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "rbfdet/model.hpp"

namespace rbfdet {

inline constexpr int kModelSchemaVersion = 1;

struct ModelMetadata {
    std::string preprocessing = "div255-zeromean-unitstd";
    std::string center_strategy = "kmeans";
    std::uint64_t seed = 0;
    std::string trained_at;  // ISO-8601 UTC
    int solver_rank = 0;
    double train_seconds = 0.0;
};

struct LoadedModel {
    RbfModel model;
    ModelMetadata metadata;
};

/// JSON model file, schema version 1. Numbers are rendered with
/// shortest-round-trip precision, so a load reproduces the saved doubles
/// bit for bit.
void save_model(const RbfModel& model, const ModelMetadata& metadata,
                const std::filesystem::path& path);

/// Throws ParseError on malformed JSON or an unsupported schema_version
/// (the message names the supported version), InvalidParameterError on
/// structurally inconsistent contents.
LoadedModel load_model(const std::filesystem::path& path);

/// Current time as "YYYY-MM-DDThh:mm:ssZ".
std::string utc_timestamp();

} // namespace rbfdet

#endif
