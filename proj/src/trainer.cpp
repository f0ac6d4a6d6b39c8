#include "rbfdet/trainer.hpp"

#include <chrono>
#include <cmath>

#include "rbfdet/errors.hpp"

namespace rbfdet {

void LabeledDataset::validate() const {
    if (inputs.empty())
        throw InvalidParameterError("dataset: empty");
    if (inputs.size() != targets.size())
        throw InvalidParameterError("dataset: " + std::to_string(inputs.size()) + " inputs vs " +
                                    std::to_string(targets.size()) + " targets");
    const std::size_t r = inputs[0].size();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].size() != r)
            throw DimensionMismatchError("dataset: input " + std::to_string(i) +
                                         " has length " + std::to_string(inputs[i].size()) +
                                         ", expected " + std::to_string(r));
        for (double v : inputs[i])
            if (!std::isfinite(v))
                throw InvalidParameterError("dataset: input " + std::to_string(i) +
                                            " contains non-finite values");
        if (targets[i] != 1.0 && targets[i] != -1.0)
            throw InvalidParameterError("dataset: target " + std::to_string(i) +
                                        " must be +1 or -1");
    }
}

std::string to_string(CenterStrategy s) {
    return s == CenterStrategy::KMeans ? "kmeans" : "random_subset";
}

CenterStrategy center_strategy_from_string(const std::string& s) {
    if (s == "kmeans") return CenterStrategy::KMeans;
    if (s == "random_subset") return CenterStrategy::RandomSubset;
    throw InvalidParameterError("unknown center strategy '" + s + "'");
}

Eigen::MatrixXd pairwise_sqdist(const std::vector<FeatureVector>& points,
                                const std::vector<FeatureVector>& centers) {
    if (points.empty() || centers.empty())
        throw InvalidParameterError("pairwise_sqdist: empty input");
    const std::size_t dim = points[0].size();
    for (const auto& c : centers)
        if (c.size() != dim)
            throw DimensionMismatchError("pairwise_sqdist: center length " +
                                         std::to_string(c.size()) + " != point length " +
                                         std::to_string(dim));

    Eigen::MatrixXd d2(points.size(), centers.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim)
            throw DimensionMismatchError("pairwise_sqdist: point " + std::to_string(i) +
                                         " has inconsistent length");
        const Eigen::Map<const Eigen::VectorXd> p(points[i].data(), dim);
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const Eigen::Map<const Eigen::VectorXd> c(centers[k].data(), dim);
            d2(i, k) = (p - c).squaredNorm();
        }
    }
    return d2;
}

Eigen::MatrixXd basis_from_sqdist(const Eigen::MatrixXd& sqdist, double spread) {
    if (!(spread > 0.0) || !std::isfinite(spread))
        throw InvalidParameterError("basis_from_sqdist: spread must be positive");
    return (-sqdist / (spread * spread)).array().exp();
}

Eigen::MatrixXd build_design_matrix(const LabeledDataset& dataset, const CenterSet& centers,
                                    double spread) {
    if (centers.centers.empty())
        throw InvalidParameterError("build_design_matrix: no centers");
    return basis_from_sqdist(pairwise_sqdist(dataset.inputs, centers.centers), spread);
}

SolveResult solve_weights(const Eigen::MatrixXd& design, const std::vector<double>& targets,
                          double regularization) {
    if (design.rows() != static_cast<Eigen::Index>(targets.size()))
        throw DimensionMismatchError("solve_weights: " + std::to_string(design.rows()) +
                                     " design rows vs " + std::to_string(targets.size()) +
                                     " targets");
    if (regularization < 0.0 || !std::isfinite(regularization))
        throw InvalidParameterError("solve_weights: regularization must be >= 0");
    if (!design.allFinite())
        throw NumericError("solve_weights: design matrix contains non-finite entries");
    const Eigen::Map<const Eigen::VectorXd> t(targets.data(), targets.size());
    if (!t.allFinite())
        throw NumericError("solve_weights: targets contain non-finite entries");

    const Eigen::Index n = design.rows();
    const Eigen::Index s1 = design.cols();

    Eigen::VectorXd w;
    int rank = 0;
    if (regularization > 0.0) {
        // Ridge as an augmented least-squares problem: [Phi; sqrt(l) I] w = [t; 0].
        Eigen::MatrixXd aug(n + s1, s1);
        aug.topRows(n) = design;
        aug.bottomRows(s1) =
            std::sqrt(regularization) * Eigen::MatrixXd::Identity(s1, s1);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + s1);
        rhs.head(n) = t;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(aug);
        w = cod.solve(rhs);
        // Rank of the unregularized design is what callers care about.
        rank = static_cast<int>(
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(design).rank());
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
        w = cod.solve(t);
        rank = static_cast<int>(cod.rank());
    }

    return SolveResult{std::vector<double>(w.begin(), w.end()), rank};
}

TrainResult train(const LabeledDataset& dataset, const TrainConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    dataset.validate();
    if (config.num_centers < 1)
        throw InvalidParameterError("train: num_centers must be >= 1");
    if (static_cast<std::size_t>(config.num_centers) > dataset.size())
        throw InvalidParameterError("train: num_centers = " + std::to_string(config.num_centers) +
                                    " exceeds dataset size " + std::to_string(dataset.size()));
    if (!(config.spread > 0.0) || !std::isfinite(config.spread))
        throw InvalidParameterError("train: spread must be positive");

    CenterSet centers;
    if (config.strategy == CenterStrategy::KMeans) {
        KMeansConfig kc;
        kc.k = config.num_centers;
        kc.seed = config.seed;
        centers = kmeans(dataset.inputs, kc);
    } else {
        centers = random_subset(dataset.inputs, config.num_centers, config.seed);
    }

    const Eigen::MatrixXd design = build_design_matrix(dataset, centers, config.spread);
    SolveResult solved = solve_weights(design, dataset.targets, config.regularization);

    TrainResult result;
    result.model.input_dim = dataset.dim();
    result.model.spread = config.spread;
    result.model.centers = std::move(centers.centers);
    result.model.weights = std::move(solved.weights);
    result.model.validate();
    result.solver_rank = solved.rank;
    result.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace rbfdet
