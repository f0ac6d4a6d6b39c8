#include "rbfdet/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include "rbfdet/errors.hpp"
#include "rbfdet/svg.hpp"

namespace rbfdet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base + splitmix64(index));
}

void validate_grid(const SweepGrid& grid) {
    if (grid.center_values.empty() || grid.spread_values.empty())
        throw InvalidParameterError("sweep grid: empty center or spread list");
    for (std::size_t i = 1; i < grid.center_values.size(); ++i)
        if (grid.center_values[i] <= grid.center_values[i - 1])
            throw InvalidParameterError("sweep grid: center values must be strictly increasing");
    for (std::size_t i = 1; i < grid.spread_values.size(); ++i)
        if (grid.spread_values[i] <= grid.spread_values[i - 1])
            throw InvalidParameterError("sweep grid: spread values must be strictly increasing");
    if (grid.center_values.front() < 1)
        throw InvalidParameterError("sweep grid: center values must be positive");
    if (!(grid.spread_values.front() > 0.0))
        throw InvalidParameterError("sweep grid: spread values must be positive");
}

std::string fmt_double(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

} // namespace

const char* const kCsvHeader =
    "centers,spread,face_rate,nonface_rate,far,frr,strategy,seed,solver_rank,"
    "train_seconds,eval_seconds";

double detection_rate(std::int64_t correct, std::int64_t total) {
    if (total < 1)
        throw InvalidParameterError("detection_rate: total must be >= 1");
    if (correct < 0 || correct > total)
        throw InvalidParameterError("detection_rate: correct must lie in [0, total]");
    return static_cast<double>(correct) / static_cast<double>(total);
}

ConfusionCounts confusion(const RbfModel& model, const LabeledDataset& dataset) {
    ConfusionCounts c;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Label predicted = classify(forward(dataset.inputs[i], model));
        if (dataset.targets[i] > 0) {
            ++c.faces_total;
            if (predicted == Label::Face) ++c.faces_correct;
        } else {
            ++c.nonfaces_total;
            if (predicted == Label::NonFace) ++c.nonfaces_correct;
        }
    }
    return c;
}

EvaluationReport report_from_counts(const ConfusionCounts& counts) {
    if (counts.faces_total < 1 || counts.nonfaces_total < 1)
        throw InvalidParameterError("evaluate: both classes must be non-empty");
    EvaluationReport r;
    r.face_rate = detection_rate(counts.faces_correct, counts.faces_total);
    r.nonface_rate = detection_rate(counts.nonfaces_correct, counts.nonfaces_total);
    // Defined as the exact complements so the rate identities hold bit-for-bit.
    r.far = 1.0 - r.face_rate;
    r.frr = 1.0 - r.nonface_rate;
    return r;
}

EvaluationReport evaluate(const RbfModel& model, const LabeledDataset& dataset) {
    const auto start = std::chrono::steady_clock::now();
    model.validate();
    dataset.validate();
    EvaluationReport r = report_from_counts(confusion(model, dataset));
    r.num_centers = static_cast<int>(model.num_centers());
    r.spread = model.spread;
    r.eval_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<EvaluationReport> run_sweep(const LabeledDataset& train_set,
                                        const LabeledDataset& test_set, const SweepGrid& grid,
                                        const TrainConfig& base_config, int jobs) {
    validate_grid(grid);
    train_set.validate();
    test_set.validate();
    for (int k : grid.center_values)
        if (static_cast<std::size_t>(k) > train_set.size())
            throw InvalidParameterError("sweep: " + std::to_string(k) +
                                        " centers exceeds train size " +
                                        std::to_string(train_set.size()));
    if (train_set.dim() != test_set.dim())
        throw DimensionMismatchError("sweep: train dim " + std::to_string(train_set.dim()) +
                                     " != test dim " + std::to_string(test_set.dim()));

    const std::size_t n_counts = grid.center_values.size();
    const std::size_t n_spreads = grid.spread_values.size();
    std::vector<EvaluationReport> reports(n_counts * n_spreads);

    const Eigen::Map<const Eigen::VectorXd> test_targets(test_set.targets.data(),
                                                         test_set.targets.size());
    std::mutex log_mutex;

    auto process_count = [&](std::size_t ci) {
        const int k = grid.center_values[ci];
        const std::uint64_t seed = mix_seed(grid.base_seed, ci);

        // Pre-fill the cell context so failed cells still carry it.
        for (std::size_t si = 0; si < n_spreads; ++si) {
            EvaluationReport& r = reports[ci * n_spreads + si];
            r.num_centers = k;
            r.spread = grid.spread_values[si];
            r.strategy = base_config.strategy;
            r.seed = seed;
            r.face_rate = r.nonface_rate = r.far = r.frr =
                std::numeric_limits<double>::quiet_NaN();
        }

        CenterSet centers;
        Eigen::MatrixXd d2_train, d2_test;
        const auto select_start = std::chrono::steady_clock::now();
        try {
            if (base_config.strategy == CenterStrategy::KMeans) {
                KMeansConfig kc;
                kc.k = k;
                kc.seed = seed;
                centers = kmeans(train_set.inputs, kc);
            } else {
                centers = random_subset(train_set.inputs, k, seed);
            }
            d2_train = pairwise_sqdist(train_set.inputs, centers.centers);
            d2_test = pairwise_sqdist(test_set.inputs, centers.centers);
        } catch (const std::exception& e) {
            for (std::size_t si = 0; si < n_spreads; ++si)
                reports[ci * n_spreads + si].error = e.what();
            return;
        }
        const double select_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - select_start)
                .count();

        const auto cells_start = std::chrono::steady_clock::now();
        for (std::size_t si = 0; si < n_spreads; ++si) {
            EvaluationReport& r = reports[ci * n_spreads + si];
            const double spread = grid.spread_values[si];
            try {
                const Eigen::MatrixXd phi_train = basis_from_sqdist(d2_train, spread);
                const SolveResult solved =
                    solve_weights(phi_train, train_set.targets, base_config.regularization);
                const Eigen::Map<const Eigen::VectorXd> w(solved.weights.data(),
                                                          solved.weights.size());
                const Eigen::VectorXd scores = basis_from_sqdist(d2_test, spread) * w;

                ConfusionCounts counts;
                for (Eigen::Index i = 0; i < scores.size(); ++i) {
                    const bool is_face = classify(scores(i)) == Label::Face;
                    if (test_targets(i) > 0) {
                        ++counts.faces_total;
                        if (is_face) ++counts.faces_correct;
                    } else {
                        ++counts.nonfaces_total;
                        if (!is_face) ++counts.nonfaces_correct;
                    }
                }
                const EvaluationReport rates = report_from_counts(counts);
                r.face_rate = rates.face_rate;
                r.nonface_rate = rates.nonface_rate;
                r.far = rates.far;
                r.frr = rates.frr;
                r.solver_rank = solved.rank;
                // train/eval_seconds stay 0: the CSV is contractually
                // byte-reproducible across runs, so wall-clock values
                // only go to the log below.
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
        const double cells_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - cells_start).count();
        {
            std::lock_guard<std::mutex> lock(log_mutex);
            std::cerr << "sweep: centers=" << k << " select=" << fmt_double(select_seconds, "%.3f")
                      << "s cells=" << n_spreads << " solve+eval="
                      << fmt_double(cells_seconds, "%.3f") << "s\n";
        }
    };

    const int workers =
        std::max(1, std::min<int>(jobs, static_cast<int>(n_counts)));
    if (workers == 1) {
        for (std::size_t ci = 0; ci < n_counts; ++ci) process_count(ci);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t ci = next.fetch_add(1); ci < n_counts; ci = next.fetch_add(1))
                    process_count(ci);
            });
        }
        for (auto& th : pool) th.join();
    }
    return reports;
}

std::string csv_row(const EvaluationReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%s,%.6f,%.6f,%.6f,%.6f,%s,%llu,%d,%.6f,%.6f",
                  r.num_centers, fmt_double(r.spread, "%g").c_str(), r.face_rate, r.nonface_rate,
                  r.far, r.frr, to_string(r.strategy).c_str(),
                  static_cast<unsigned long long>(r.seed), r.solver_rank, r.train_seconds,
                  r.eval_seconds);
    return buf;
}

void emit_csv(const std::vector<EvaluationReport>& reports, const std::filesystem::path& path) {
    if (reports.empty())
        throw InvalidParameterError("emit_csv: no reports");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << kCsvHeader << "\n";
    for (const auto& r : reports) out << csv_row(r) << "\n";
    if (!out)
        throw IoError("write failure on " + path.string());
}

std::vector<std::filesystem::path> emit_plots(const std::vector<EvaluationReport>& reports,
                                              const std::filesystem::path& out_dir) {
    // Group by center count, preserving first-seen order.
    std::vector<int> counts;
    for (const auto& r : reports)
        if (std::find(counts.begin(), counts.end(), r.num_centers) == counts.end())
            counts.push_back(r.num_centers);

    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    for (int count : counts) {
        ChartSeries face{"face rate", "#1f77b4", {}};
        ChartSeries nonface{"non-face rate", "#d62728", {}};
        ChartSeries far{"FAR", "#2ca02c", {}};
        ChartSeries frr{"FRR", "#9467bd", {}};
        for (const auto& r : reports) {
            if (r.num_centers != count || r.failed() || !std::isfinite(r.face_rate)) continue;
            face.points.emplace_back(r.spread, 100.0 * r.face_rate);
            nonface.points.emplace_back(r.spread, 100.0 * r.nonface_rate);
            far.points.emplace_back(r.spread, 100.0 * r.far);
            frr.points.emplace_back(r.spread, 100.0 * r.frr);
        }
        if (face.points.size() < 2) continue;  // nothing to draw a curve through

        const auto rates_path = out_dir / ("rates_c" + std::to_string(count) + ".svg");
        write_line_chart(rates_path, "Detection rate vs spread (centers = " +
                                         std::to_string(count) + ")",
                         "spread", "detection rate (%)", {face, nonface});
        written.push_back(rates_path);

        const auto farfrr_path = out_dir / ("farfrr_c" + std::to_string(count) + ".svg");
        write_line_chart(farfrr_path,
                         "FAR / FRR vs spread (centers = " + std::to_string(count) + ")", "spread",
                         "rate (%)", {far, frr});
        written.push_back(farfrr_path);
    }
    if (written.empty())
        throw InvalidParameterError(
            "emit_plots: need at least 2 usable spread points for some center count");
    return written;
}

} // namespace rbfdet
