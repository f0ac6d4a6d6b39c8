// rbfdet: train, evaluate, sweep, and run the RBF face detector from the
// command line. Exit codes: 0 success, 1 data/runtime error, 2 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "rbfdet/dataset.hpp"
#include "rbfdet/detector.hpp"
#include "rbfdet/errors.hpp"
#include "rbfdet/evaluator.hpp"
#include "rbfdet/model_io.hpp"
#include "rbfdet/trainer.hpp"

namespace {

using namespace rbfdet;

// "2,25,120" or "1:40:1" (inclusive stop) or a mix of both, comma-separated.
std::vector<double> parse_value_list(const std::string& spec) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = std::min(spec.find(',', pos), spec.size());
        const std::string token = spec.substr(pos, comma - pos);
        pos = comma + 1;
        if (token.empty())
            throw InvalidParameterError("empty value in list '" + spec + "'");
        const std::size_t c1 = token.find(':');
        try {
            if (c1 == std::string::npos) {
                values.push_back(std::stod(token));
            } else {
                const std::size_t c2 = token.find(':', c1 + 1);
                if (c2 == std::string::npos)
                    throw InvalidParameterError("range must be start:stop:step, got '" + token +
                                                "'");
                const double start = std::stod(token.substr(0, c1));
                const double stop = std::stod(token.substr(c1 + 1, c2 - c1 - 1));
                const double step = std::stod(token.substr(c2 + 1));
                if (!(step > 0.0))
                    throw InvalidParameterError("range step must be positive in '" + token + "'");
                for (double v = start; v <= stop + 1e-9 * step; v += step) values.push_back(v);
                if (start > stop)
                    throw InvalidParameterError("empty range '" + token + "'");
            }
        } catch (const std::invalid_argument&) {
            throw InvalidParameterError("bad number in '" + token + "'");
        } catch (const std::out_of_range&) {
            throw InvalidParameterError("number out of range in '" + token + "'");
        }
    }
    if (values.empty())
        throw InvalidParameterError("empty value list");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1])
            throw InvalidParameterError("values must be strictly increasing: '" + spec + "'");
    return values;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    for (double v : parse_value_list(spec)) {
        const int i = static_cast<int>(std::lround(v));
        if (std::abs(v - i) > 1e-9)
            throw InvalidParameterError("expected integers in '" + spec + "'");
        out.push_back(i);
    }
    return out;
}

int infer_patch_size(int input_dim) {
    const int p = static_cast<int>(std::lround(std::sqrt(static_cast<double>(input_dim))));
    if (p < 1 || p * p != input_dim)
        throw InvalidParameterError("model input_dim " + std::to_string(input_dim) +
                                    " is not a square patch");
    return p;
}

DatasetManifest manifest_for_root(const std::filesystem::path& root, int patch_size) {
    DatasetManifest m;
    m.face_dir = root / "faces";
    m.nonface_dir = root / "nonfaces";
    m.patch_size = patch_size;
    return m;
}

struct TrainArgs {
    std::string data_root;
    int centers = 0;
    double spread = 0.0;
    std::string strategy = "kmeans";
    std::uint64_t seed = 0;
    double lambda = 0.0;
    int patch_size = 19;
    long long expect_faces = -1;
    long long expect_nonfaces = -1;
    std::string out;
};

int run_train(const TrainArgs& a) {
    DatasetManifest manifest = manifest_for_root(a.data_root, a.patch_size);
    if (a.expect_faces >= 0 || a.expect_nonfaces >= 0) {
        if (a.expect_faces < 0 || a.expect_nonfaces < 0)
            throw InvalidParameterError("--expect-faces and --expect-nonfaces go together");
        manifest.expected_counts = {static_cast<std::size_t>(a.expect_faces),
                                    static_cast<std::size_t>(a.expect_nonfaces)};
    }
    const LabeledDataset dataset = load_dataset(manifest);

    TrainConfig config;
    config.strategy = center_strategy_from_string(a.strategy);
    config.num_centers = a.centers;
    config.spread = a.spread;
    config.seed = a.seed;
    config.regularization = a.lambda;
    const TrainResult result = train(dataset, config);

    ModelMetadata meta;
    meta.center_strategy = a.strategy;
    meta.seed = a.seed;
    meta.trained_at = utc_timestamp();
    meta.solver_rank = result.solver_rank;
    meta.train_seconds = result.train_seconds;
    save_model(result.model, meta, a.out);

    if (result.solver_rank < a.centers)
        std::cerr << "warning: design matrix effective rank " << result.solver_rank << " < "
                  << a.centers << " centers (ill-conditioned; consider --lambda)\n";
    std::printf("trained N=%zu S1=%d spread=%g train_seconds=%.3f solver_rank=%d\n",
                dataset.size(), a.centers, a.spread, result.train_seconds, result.solver_rank);
    return 0;
}

struct EvalArgs {
    std::string model_path;
    std::string data_root;
    std::string csv_path;
};

int run_eval(const EvalArgs& a) {
    const LoadedModel loaded = load_model(a.model_path);
    const int patch_size = infer_patch_size(loaded.model.input_dim);
    const LabeledDataset dataset = load_dataset(manifest_for_root(a.data_root, patch_size));

    EvaluationReport report = evaluate(loaded.model, dataset);
    report.strategy = loaded.metadata.center_strategy == "random_subset"
                          ? CenterStrategy::RandomSubset
                          : CenterStrategy::KMeans;
    report.seed = loaded.metadata.seed;
    report.solver_rank = loaded.metadata.solver_rank;
    report.train_seconds = loaded.metadata.train_seconds;

    if (!a.csv_path.empty()) {
        const bool fresh =
            !std::filesystem::exists(a.csv_path) || std::filesystem::file_size(a.csv_path) == 0;
        std::ofstream out(a.csv_path, std::ios::binary | std::ios::app);
        if (!out)
            throw IoError("cannot open " + a.csv_path + " for writing");
        if (fresh) out << kCsvHeader << "\n";
        out << csv_row(report) << "\n";
    }
    std::printf("%.6f %.6f %.6f %.6f\n", report.face_rate, report.nonface_rate, report.far,
                report.frr);
    return 0;
}

struct SweepArgs {
    std::string train_root;
    std::string test_root;
    std::string centers_spec;
    std::string spreads_spec;
    std::string strategy = "kmeans";
    std::uint64_t base_seed = 0;
    double lambda = 0.0;
    int patch_size = 19;
    std::string out_dir;
    int jobs = 0;
};

int run_sweep_cmd(const SweepArgs& a, const SweepGrid& grid) {
    const LabeledDataset train_set = load_dataset(manifest_for_root(a.train_root, a.patch_size));
    const LabeledDataset test_set = load_dataset(manifest_for_root(a.test_root, a.patch_size));

    TrainConfig base;
    base.strategy = center_strategy_from_string(a.strategy);
    base.regularization = a.lambda;

    const int jobs =
        a.jobs > 0 ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
    const std::vector<EvaluationReport> reports =
        run_sweep(train_set, test_set, grid, base, jobs);

    std::filesystem::create_directories(a.out_dir);
    const auto csv_path = std::filesystem::path(a.out_dir) / "sweep.csv";
    emit_csv(reports, csv_path);
    const auto plots = emit_plots(reports, a.out_dir);

    std::size_t failed = 0;
    for (const auto& r : reports)
        if (r.failed()) {
            std::cerr << "failed cell centers=" << r.num_centers << " spread=" << r.spread << ": "
                      << r.error << "\n";
            ++failed;
        }
    std::printf("sweep: %zu/%zu cells ok, csv=%s, plots=%zu\n", reports.size() - failed,
                reports.size(), csv_path.string().c_str(), plots.size());
    return failed == reports.size() ? 1 : 0;
}

struct DetectArgs {
    std::string model_path;
    std::string image_path;
    std::string out_path;
    std::string csv_path;
    int stride = 1;
    double threshold = 0.0;
    double scale_factor = 1.2;
    int min_level = 0;
    double nms_overlap = 0.3;
    int jobs = 0;
};

int run_detect(const DetectArgs& a) {
    const LoadedModel loaded = load_model(a.model_path);
    const GrayImage image = load_image(a.image_path);

    DetectorConfig config;
    config.patch_size = infer_patch_size(loaded.model.input_dim);
    config.stride = a.stride;
    config.score_threshold = a.threshold;
    config.scale_factor = a.scale_factor;
    config.min_level_size = a.min_level > 0 ? a.min_level : config.patch_size;
    config.nms_overlap = a.nms_overlap;
    config.validate();

    const int jobs =
        a.jobs > 0 ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
    const std::vector<BoundingBox> boxes = detect(image, loaded.model, config, jobs);

    annotate(image, boxes, a.out_path);
    if (!a.csv_path.empty()) write_detections_csv(boxes, a.csv_path);
    std::printf("%zu\n", boxes.size());
    return 0;
}

struct SynthArgs {
    int per_class = 0;
    std::uint64_t seed = 0;
    double separation = 0.0;
    int patch_size = 19;
    std::string out_dir;
};

int run_synth(const SynthArgs& a) {
    const int dim = a.patch_size * a.patch_size;
    const LabeledDataset ds = synth_dataset(a.seed, a.per_class, dim, a.separation);
    write_patch_dataset(ds, a.out_dir, a.patch_size);
    std::printf("wrote %d face + %d nonface patches to %s\n", a.per_class, a.per_class,
                a.out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian RBF network face detector: train on 19x19 patches, "
                 "evaluate detection rates, sweep hyperparameters, find faces in images"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* cmd_train = app.add_subcommand("train", "Train a model and save it as JSON");
    cmd_train->add_option("--data", train_args.data_root, "Dataset root (faces/ + nonfaces/)")
        ->required();
    cmd_train->add_option("--centers", train_args.centers, "Number of RBF centers (S1)")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_train->add_option("--spread", train_args.spread, "Gaussian spread (beta)")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_train->add_option("--strategy", train_args.strategy, "Center selection")
        ->check(CLI::IsMember({"kmeans", "random_subset"}));
    cmd_train->add_option("--seed", train_args.seed, "RNG seed");
    cmd_train->add_option("--lambda", train_args.lambda, "Ridge regularization")
        ->check(CLI::NonNegativeNumber);
    cmd_train->add_option("--patch-size", train_args.patch_size, "Patch side length")
        ->check(CLI::PositiveNumber);
    cmd_train->add_option("--expect-faces", train_args.expect_faces, "Fail unless this many faces");
    cmd_train->add_option("--expect-nonfaces", train_args.expect_nonfaces,
                          "Fail unless this many non-faces");
    cmd_train->add_option("--out", train_args.out, "Output model path")->required();

    EvalArgs eval_args;
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate a model on a labeled dataset");
    cmd_eval->add_option("--model", eval_args.model_path, "Model JSON")->required();
    cmd_eval->add_option("--data", eval_args.data_root, "Dataset root")->required();
    cmd_eval->add_option("--csv", eval_args.csv_path, "Append a CSV report row here");

    SweepArgs sweep_args;
    auto* cmd_sweep = app.add_subcommand("sweep", "Grid sweep over centers and spreads");
    cmd_sweep->add_option("--train", sweep_args.train_root, "Training dataset root")->required();
    cmd_sweep->add_option("--test", sweep_args.test_root, "Test dataset root")->required();
    cmd_sweep
        ->add_option("--centers", sweep_args.centers_spec, "e.g. 2,25,120,200 or 10:200:10")
        ->required();
    cmd_sweep->add_option("--spreads", sweep_args.spreads_spec, "e.g. 1:40:1")->required();
    cmd_sweep->add_option("--strategy", sweep_args.strategy, "Center selection")
        ->check(CLI::IsMember({"kmeans", "random_subset"}));
    cmd_sweep->add_option("--base-seed", sweep_args.base_seed, "Base RNG seed");
    cmd_sweep->add_option("--lambda", sweep_args.lambda, "Ridge regularization")
        ->check(CLI::NonNegativeNumber);
    cmd_sweep->add_option("--patch-size", sweep_args.patch_size, "Patch side length")
        ->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--out-dir", sweep_args.out_dir, "Output directory")->required();
    cmd_sweep->add_option("--jobs", sweep_args.jobs, "Worker threads (0 = all cores)");

    DetectArgs detect_args;
    auto* cmd_detect = app.add_subcommand("detect", "Find faces in an image");
    cmd_detect->add_option("--model", detect_args.model_path, "Model JSON")->required();
    cmd_detect->add_option("--image", detect_args.image_path, "Input image (PGM or PNG)")
        ->required();
    cmd_detect->add_option("--out", detect_args.out_path, "Annotated PGM output")->required();
    cmd_detect->add_option("--csv", detect_args.csv_path, "Detections CSV output");
    cmd_detect->add_option("--stride", detect_args.stride, "Window stride in pixels")
        ->check(CLI::PositiveNumber);
    cmd_detect->add_option("--threshold", detect_args.threshold, "Score threshold");
    cmd_detect->add_option("--scale-factor", detect_args.scale_factor, "Pyramid scale factor");
    cmd_detect->add_option("--min-level", detect_args.min_level,
                           "Smallest pyramid level (0 = patch size)");
    cmd_detect->add_option("--nms", detect_args.nms_overlap, "NMS IoU threshold (1.0 keeps all)")
        ->check(CLI::Range(0.0, 1.0));
    cmd_detect->add_option("--jobs", detect_args.jobs, "Worker threads (0 = all cores)");

    SynthArgs synth_args;
    auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic two-blob patch dataset");
    cmd_synth->add_option("--per-class", synth_args.per_class, "Patches per class")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_synth->add_option("--seed", synth_args.seed, "RNG seed");
    cmd_synth->add_option("--separation", synth_args.separation, "Blob mean distance")
        ->check(CLI::NonNegativeNumber);
    cmd_synth->add_option("--patch-size", synth_args.patch_size, "Patch side length")
        ->check(CLI::PositiveNumber);
    cmd_synth->add_option("--out", synth_args.out_dir, "Output dataset root")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit clean, usage errors exit 2
    }

    // Flag-value problems CLI11 cannot see (ranges, orderings) are still
    // usage errors; anything after data is loaded is a runtime error.
    SweepGrid grid;
    try {
        if (cmd_sweep->parsed()) {
            grid.center_values = parse_int_list(sweep_args.centers_spec);
            grid.spread_values = parse_value_list(sweep_args.spreads_spec);
            grid.base_seed = sweep_args.base_seed;
        }
    } catch (const rbfdet::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_train->parsed()) return run_train(train_args);
        if (cmd_eval->parsed()) return run_eval(eval_args);
        if (cmd_sweep->parsed()) return run_sweep_cmd(sweep_args, grid);
        if (cmd_detect->parsed()) return run_detect(detect_args);
        if (cmd_synth->parsed()) return run_synth(synth_args);
    } catch (const rbfdet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
