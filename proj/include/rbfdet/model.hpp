#ifndef RBFDET_MODEL_HPP
#define RBFDET_MODEL_HPP

#include <cstddef>
#include <vector>

namespace rbfdet {

/// Normalized input vector; length must equal the model/dataset dimension R.
using FeatureVector = std::vector<double>;

/// Binary decision of the classifier.
enum class Label { Face, NonFace };

/// A trained Gaussian RBF network with a single linear output and one
/// spread shared across all centers. Immutable once trained; safe to
/// share read-only across threads.
struct RbfModel {
    int input_dim = 0;                   // R
    double spread = 0.0;                 // beta, > 0
    std::vector<FeatureVector> centers;  // S1 vectors of length R
    std::vector<double> weights;         // S1 output weights

    std::size_t num_centers() const { return centers.size(); }

    /// Throws InvalidParameterError if any structural invariant is broken
    /// (empty centers, mismatched lengths, non-finite values, spread <= 0).
    void validate() const;
};

/// Gaussian basis e^(-distance^2 / spread^2); result in (0, 1].
/// Throws InvalidParameterError on spread <= 0 or non-finite input.
double gaussian_basis(double distance, double spread);

/// Hidden-layer activations: element k is gaussian_basis(||x - c_k||, spread).
std::vector<double> activation_vector(const FeatureVector& x, const RbfModel& model);

/// Network output: inner product of the activation vector with the weights.
double forward(const FeatureVector& x, const RbfModel& model);

/// Face when score >= threshold (ties count as face), NonFace otherwise.
Label classify(double score, double threshold = 0.0);

} // namespace rbfdet

#endif
