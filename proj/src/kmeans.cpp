#include "rbfdet/kmeans.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "rbfdet/errors.hpp"

namespace rbfdet {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<FeatureVector>& points) {
    const std::size_t n = points.size();
    const std::size_t dim = points[0].size();
    Eigen::MatrixXd m(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        if (points[i].size() != dim)
            throw DimensionMismatchError("kmeans: point " + std::to_string(i) + " has length " +
                                         std::to_string(points[i].size()) + ", expected " +
                                         std::to_string(dim));
        for (std::size_t j = 0; j < dim; ++j) m(i, j) = points[i][j];
    }
    return m;
}

// Indices of the first occurrence of each distinct point value.
std::vector<std::size_t> distinct_representatives(const std::vector<FeatureVector>& points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a] != points[b]) return points[a] < points[b];
        return a < b;
    });
    std::vector<std::size_t> reps;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || points[order[i]] != points[order[i - 1]]) reps.push_back(order[i]);
    }
    std::sort(reps.begin(), reps.end());
    return reps;
}

// First k entries of a seeded Fisher-Yates permutation of `values`.
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> values, int k,
                                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, values.size() - 1);
        std::swap(values[i], values[pick(rng)]);
    }
    values.resize(k);
    return values;
}

// Nearest-center assignment; ties go to the lowest center index.
// Returns the distortion (sum of squared distances to the assigned center).
double assign_nearest(const Eigen::MatrixXd& x, const Eigen::VectorXd& xnorm2,
                      const Eigen::MatrixXd& centers, std::vector<int>& assignment,
                      Eigen::VectorXd& dist2_to_own) {
    const Eigen::Index n = x.rows();
    const Eigen::Index k = centers.rows();
    const Eigen::VectorXd cnorm2 = centers.rowwise().squaredNorm();
    const Eigen::MatrixXd dots = x * centers.transpose();  // n x k

    double distortion = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_val = cnorm2(0) - 2.0 * dots(i, 0);
        for (Eigen::Index c = 1; c < k; ++c) {
            const double val = cnorm2(c) - 2.0 * dots(i, c);
            if (val < best_val) {
                best_val = val;
                best = static_cast<int>(c);
            }
        }
        assignment[i] = best;
        const double d2 = std::max(0.0, xnorm2(i) + best_val);
        dist2_to_own(i) = d2;
        distortion += d2;
    }
    return distortion;
}

// Centroid update with empty-cluster repair: an empty cluster steals the
// point farthest from its current centroid and becomes a singleton.
void update_centroids(const Eigen::MatrixXd& x, std::vector<int>& assignment,
                      const Eigen::VectorXd& dist2_to_own, Eigen::MatrixXd& centers) {
    const Eigen::Index n = x.rows();
    const Eigen::Index k = centers.rows();

    std::vector<Eigen::Index> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) ++counts[assignment[i]];

    Eigen::VectorXd steal_dist = dist2_to_own;
    for (Eigen::Index c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        // Stealing from a singleton would just move the hole elsewhere.
        Eigen::Index farthest = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (counts[assignment[i]] < 2) continue;
            if (farthest < 0 || steal_dist(i) > steal_dist(farthest)) farthest = i;
        }
        --counts[assignment[farthest]];
        assignment[farthest] = static_cast<int>(c);
        ++counts[c];
        steal_dist(farthest) = 0.0;
    }

    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centers.row(assignment[i]) += x.row(i);
    for (Eigen::Index c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(counts[c]);
}

std::vector<FeatureVector> to_center_list(const Eigen::MatrixXd& centers) {
    std::vector<FeatureVector> out(centers.rows());
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        out[c].assign(centers.row(c).begin(), centers.row(c).end());
    }
    return out;
}

} // namespace

CenterSet kmeans(const std::vector<FeatureVector>& points, const KMeansConfig& config,
                 std::vector<double>* distortion_trace) {
    if (points.empty())
        throw InvalidParameterError("kmeans: empty input");
    if (config.k < 1)
        throw InvalidParameterError("kmeans: k must be >= 1");
    if (config.max_iterations < 1)
        throw InvalidParameterError("kmeans: max_iterations must be >= 1");

    const std::vector<std::size_t> reps = distinct_representatives(points);
    if (static_cast<std::size_t>(config.k) > reps.size())
        throw InvalidParameterError("kmeans: k = " + std::to_string(config.k) + " exceeds " +
                                    std::to_string(reps.size()) + " distinct points");

    const Eigen::MatrixXd x = to_matrix(points);
    const Eigen::VectorXd xnorm2 = x.rowwise().squaredNorm();

    const std::vector<std::size_t> init = sample_without_replacement(reps, config.k, config.seed);
    Eigen::MatrixXd centers(config.k, x.cols());
    for (int c = 0; c < config.k; ++c) centers.row(c) = x.row(init[c]);

    std::vector<int> assignment(points.size(), 0);
    Eigen::VectorXd dist2_to_own(points.size());
    double distortion = assign_nearest(x, xnorm2, centers, assignment, dist2_to_own);
    if (distortion_trace) {
        distortion_trace->clear();
        distortion_trace->push_back(distortion);
    }

    std::vector<int> next_assignment(points.size(), 0);
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        update_centroids(x, assignment, dist2_to_own, centers);
        const double next_distortion =
            assign_nearest(x, xnorm2, centers, next_assignment, dist2_to_own);
        if (distortion_trace) distortion_trace->push_back(next_distortion);
        const bool stable = (next_assignment == assignment);
        const double improvement = distortion - next_distortion;
        assignment.swap(next_assignment);
        distortion = next_distortion;
        if (stable || improvement <= config.tolerance) break;
    }

    return CenterSet{to_center_list(centers), distortion};
}

CenterSet random_subset(const std::vector<FeatureVector>& points, int k, std::uint64_t seed) {
    if (points.empty())
        throw InvalidParameterError("random_subset: empty input");
    if (k < 1)
        throw InvalidParameterError("random_subset: k must be >= 1");
    if (static_cast<std::size_t>(k) > points.size())
        throw InvalidParameterError("random_subset: k = " + std::to_string(k) + " exceeds " +
                                    std::to_string(points.size()) + " points");

    std::vector<std::size_t> all(points.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const std::vector<std::size_t> chosen = sample_without_replacement(std::move(all), k, seed);

    CenterSet result;
    result.centers.reserve(k);
    for (std::size_t idx : chosen) result.centers.push_back(points[idx]);

    const Eigen::MatrixXd x = to_matrix(points);
    const Eigen::VectorXd xnorm2 = x.rowwise().squaredNorm();
    const Eigen::MatrixXd centers = to_matrix(result.centers);
    std::vector<int> assignment(points.size(), 0);
    Eigen::VectorXd dist2(points.size());
    result.distortion = assign_nearest(x, xnorm2, centers, assignment, dist2);
    return result;
}

} // namespace rbfdet
