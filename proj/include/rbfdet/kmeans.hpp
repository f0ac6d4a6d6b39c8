#ifndef RBFDET_KMEANS_HPP
#define RBFDET_KMEANS_HPP

#include <cstdint>
#include <vector>

#include "rbfdet/model.hpp"

namespace rbfdet {

struct KMeansConfig {
    int k = 1;                   // number of centers to produce
    int max_iterations = 100;
    std::uint64_t seed = 0;      // initialization is sampled from this seed
    double tolerance = 0.0;      // stop when distortion improves by <= tolerance
};

/// Result of a center-selection run. distortion is the sum of squared
/// distances of every input point to its nearest center.
struct CenterSet {
    std::vector<FeatureVector> centers;
    double distortion = 0.0;
};

/// Lloyd's algorithm. Initial centers are k distinct point values sampled
/// uniformly without replacement; nearest-center ties go to the lowest
/// index; clusters that empty out are repaired by turning the point
/// farthest from its current center into a singleton. Deterministic for a
/// fixed seed.
///
/// If distortion_trace is non-null it receives the distortion after every
/// Lloyd iteration (non-increasing by construction).
///
/// Throws InvalidParameterError on empty input or k exceeding the number
/// of distinct points.
CenterSet kmeans(const std::vector<FeatureVector>& points, const KMeansConfig& config,
                 std::vector<double>* distortion_trace = nullptr);

/// k distinct indices sampled without replacement; the centers are copies
/// of the selected points. Deterministic for a fixed seed.
CenterSet random_subset(const std::vector<FeatureVector>& points, int k, std::uint64_t seed);

} // namespace rbfdet

#endif
