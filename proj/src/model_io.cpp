#include "rbfdet/model_io.hpp"

#include <ctime>
#include <fstream>

#include <json.hpp>

#include "rbfdet/errors.hpp"

namespace rbfdet {

using nlohmann::json;

void save_model(const RbfModel& model, const ModelMetadata& metadata,
                const std::filesystem::path& path) {
    model.validate();
    json j;
    j["schema_version"] = kModelSchemaVersion;
    j["input_dim"] = model.input_dim;
    j["spread"] = model.spread;
    j["centers"] = model.centers;
    j["weights"] = model.weights;
    j["metadata"] = {
        {"preprocessing", metadata.preprocessing},
        {"center_strategy", metadata.center_strategy},
        {"seed", metadata.seed},
        {"trained_at", metadata.trained_at},
        {"solver_rank", metadata.solver_rank},
        {"train_seconds", metadata.train_seconds},
    };

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("write failure on " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());

    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    try {
        const int version = j.at("schema_version").get<int>();
        if (version != kModelSchemaVersion)
            throw ParseError(path.string() + ": model schema version " +
                             std::to_string(version) + " not supported (this build reads version " +
                             std::to_string(kModelSchemaVersion) + ")");

        LoadedModel loaded;
        loaded.model.input_dim = j.at("input_dim").get<int>();
        loaded.model.spread = j.at("spread").get<double>();
        loaded.model.centers = j.at("centers").get<std::vector<FeatureVector>>();
        loaded.model.weights = j.at("weights").get<std::vector<double>>();
        loaded.model.validate();

        if (j.contains("metadata")) {
            const json& m = j["metadata"];
            loaded.metadata.preprocessing = m.value("preprocessing", std::string{});
            loaded.metadata.center_strategy = m.value("center_strategy", std::string{});
            loaded.metadata.seed = m.value("seed", std::uint64_t{0});
            loaded.metadata.trained_at = m.value("trained_at", std::string{});
            loaded.metadata.solver_rank = m.value("solver_rank", 0);
            loaded.metadata.train_seconds = m.value("train_seconds", 0.0);
        }
        return loaded;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace rbfdet
