#ifndef RBFDET_TRAINER_HPP
#define RBFDET_TRAINER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rbfdet/kmeans.hpp"
#include "rbfdet/model.hpp"

namespace rbfdet {

/// Inputs paired with +1 (face) / -1 (non-face) targets.
struct LabeledDataset {
    std::vector<FeatureVector> inputs;
    std::vector<double> targets;

    std::size_t size() const { return inputs.size(); }
    int dim() const { return inputs.empty() ? 0 : static_cast<int>(inputs[0].size()); }

    /// Throws InvalidParameterError on length mismatch, N = 0, a target
    /// other than +-1, or non-finite features.
    void validate() const;
};

enum class CenterStrategy { KMeans, RandomSubset };

std::string to_string(CenterStrategy s);
CenterStrategy center_strategy_from_string(const std::string& s);

struct TrainConfig {
    CenterStrategy strategy = CenterStrategy::KMeans;
    int num_centers = 1;         // S1
    double spread = 1.0;         // beta
    std::uint64_t seed = 0;
    double regularization = 0.0; // ridge lambda, 0 = plain least squares
};

/// N x S1 matrix of squared Euclidean distances between rows of the
/// dataset and the centers. Computed entry-wise so that a sample equal to
/// a center gives exactly 0.
Eigen::MatrixXd pairwise_sqdist(const std::vector<FeatureVector>& points,
                                const std::vector<FeatureVector>& centers);

/// exp(-d2 / spread^2) applied entry-wise.
Eigen::MatrixXd basis_from_sqdist(const Eigen::MatrixXd& sqdist, double spread);

/// Design matrix Phi: entry (n, k) = gaussian_basis(||x_n - c_k||, spread).
Eigen::MatrixXd build_design_matrix(const LabeledDataset& dataset, const CenterSet& centers,
                                    double spread);

struct SolveResult {
    std::vector<double> weights;
    int rank = 0;  // effective rank detected by the factorization
};

/// Minimizes ||Phi w - t||^2 + lambda ||w||^2 via a complete orthogonal
/// decomposition; with lambda = 0 and rank-deficient Phi this is the
/// minimum-norm least-squares solution. Throws NumericError on non-finite
/// entries.
SolveResult solve_weights(const Eigen::MatrixXd& design, const std::vector<double>& targets,
                          double regularization = 0.0);

struct TrainResult {
    RbfModel model;
    int solver_rank = 0;
    double train_seconds = 0.0;
};

/// Two-stage training: centers per config.strategy (seeded), then output
/// weights by least squares against the +-1 targets. Deterministic for a
/// fixed (dataset, config).
TrainResult train(const LabeledDataset& dataset, const TrainConfig& config);

} // namespace rbfdet

#endif
