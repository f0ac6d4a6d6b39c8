#ifndef RBFDET_EVALUATOR_HPP
#define RBFDET_EVALUATOR_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rbfdet/trainer.hpp"

namespace rbfdet {

struct ConfusionCounts {
    std::int64_t faces_total = 0;
    std::int64_t faces_correct = 0;
    std::int64_t nonfaces_total = 0;
    std::int64_t nonfaces_correct = 0;
};

/// One (centers, spread) measurement. FAR follows the convention used
/// throughout this project: the fraction of face inputs classified as
/// non-face, so face_rate + far == 1 exactly; FRR is the mirror image for
/// non-faces. (Note this is reversed from common biometric usage.)
struct EvaluationReport {
    double face_rate = 0.0;
    double nonface_rate = 0.0;
    double far = 0.0;
    double frr = 0.0;
    int num_centers = 0;
    double spread = 0.0;
    CenterStrategy strategy = CenterStrategy::KMeans;
    std::uint64_t seed = 0;
    int solver_rank = 0;
    double train_seconds = 0.0;
    double eval_seconds = 0.0;
    std::string error;  // non-empty marks a failed sweep cell

    bool failed() const { return !error.empty(); }
};

struct SweepGrid {
    std::vector<int> center_values;      // strictly increasing
    std::vector<double> spread_values;   // strictly increasing
    std::uint64_t base_seed = 0;
};

/// correct / total. Throws InvalidParameterError on total < 1 or
/// correct outside [0, total].
double detection_rate(std::int64_t correct, std::int64_t total);

/// Per-class counts of threshold-0 classifications.
ConfusionCounts confusion(const RbfModel& model, const LabeledDataset& dataset);

/// Rates derived from counts; requires both classes non-empty.
EvaluationReport report_from_counts(const ConfusionCounts& counts);

/// Full evaluation of a trained model; fills rates, the model's
/// centers/spread and the wall-clock eval time. Context fields
/// (strategy, seed, solver_rank, train_seconds) are the caller's.
EvaluationReport evaluate(const RbfModel& model, const LabeledDataset& dataset);

/// Trains and evaluates every (centers, spread) grid cell. Centers are
/// selected once per center count (seeded from base_seed and the
/// center-count index) and reused across spreads; weights are re-solved
/// per spread. Failing cells are recorded with NaN rates and a reason
/// instead of aborting. Reports come back in (centers, spread) order and
/// are byte-reproducible for a fixed base_seed; per-cell timing columns
/// are left at zero for that reason (timings go to the log stream).
/// jobs > 1 distributes center counts across worker threads.
std::vector<EvaluationReport> run_sweep(const LabeledDataset& train_set,
                                        const LabeledDataset& test_set, const SweepGrid& grid,
                                        const TrainConfig& base_config, int jobs = 1);

/// CSV with the fixed header
/// centers,spread,face_rate,nonface_rate,far,frr,strategy,seed,solver_rank,train_seconds,eval_seconds
/// one row per report, rates at 6 decimals. Byte-deterministic.
void emit_csv(const std::vector<EvaluationReport>& reports, const std::filesystem::path& path);

/// Single CSV data row in the emit_csv format (no trailing newline).
std::string csv_row(const EvaluationReport& report);
extern const char* const kCsvHeader;

/// Per center count with >= 2 usable spread points, writes
/// rates_c<count>.svg (face/non-face rate vs spread) and
/// farfrr_c<count>.svg (FAR/FRR vs spread), axes in percent.
/// Returns the written paths. Throws if no center count qualifies.
std::vector<std::filesystem::path> emit_plots(const std::vector<EvaluationReport>& reports,
                                              const std::filesystem::path& out_dir);

} // namespace rbfdet

#endif
