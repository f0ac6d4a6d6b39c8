#include "rbfdet/model.hpp"

#include <cmath>
#include <string>

#include "rbfdet/errors.hpp"

namespace rbfdet {

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

} // namespace

void RbfModel::validate() const {
    if (input_dim <= 0)
        throw InvalidParameterError("RbfModel: input_dim must be positive");
    if (centers.empty())
        throw InvalidParameterError("RbfModel: at least one center required");
    if (weights.size() != centers.size())
        throw InvalidParameterError("RbfModel: weights count " + std::to_string(weights.size()) +
                                    " != centers count " + std::to_string(centers.size()));
    if (!(spread > 0.0) || !std::isfinite(spread))
        throw InvalidParameterError("RbfModel: spread must be positive and finite");
    for (std::size_t k = 0; k < centers.size(); ++k) {
        if (centers[k].size() != static_cast<std::size_t>(input_dim))
            throw DimensionMismatchError("RbfModel: center " + std::to_string(k) + " has length " +
                                         std::to_string(centers[k].size()) + ", expected " +
                                         std::to_string(input_dim));
        if (!all_finite(centers[k]))
            throw InvalidParameterError("RbfModel: center " + std::to_string(k) + " contains non-finite values");
    }
    if (!all_finite(weights))
        throw InvalidParameterError("RbfModel: weights contain non-finite values");
}

double gaussian_basis(double distance, double spread) {
    if (!std::isfinite(distance) || !std::isfinite(spread))
        throw InvalidParameterError("gaussian_basis: non-finite input");
    if (!(spread > 0.0))
        throw InvalidParameterError("gaussian_basis: spread must be positive");
    if (distance < 0.0)
        throw InvalidParameterError("gaussian_basis: distance must be non-negative");
    const double r = distance / spread;
    return std::exp(-r * r);
}

std::vector<double> activation_vector(const FeatureVector& x, const RbfModel& model) {
    if (x.size() != static_cast<std::size_t>(model.input_dim))
        throw DimensionMismatchError("activation_vector: input length " + std::to_string(x.size()) +
                                     " != model input_dim " + std::to_string(model.input_dim));
    std::vector<double> phi(model.centers.size());
    for (std::size_t k = 0; k < model.centers.size(); ++k)
        phi[k] = gaussian_basis(std::sqrt(squared_distance(x, model.centers[k])), model.spread);
    return phi;
}

double forward(const FeatureVector& x, const RbfModel& model) {
    if (x.size() != static_cast<std::size_t>(model.input_dim))
        throw DimensionMismatchError("forward: input length " + std::to_string(x.size()) +
                                     " != model input_dim " + std::to_string(model.input_dim));
    double score = 0.0;
    for (std::size_t k = 0; k < model.centers.size(); ++k)
        score += model.weights[k] *
                 gaussian_basis(std::sqrt(squared_distance(x, model.centers[k])), model.spread);
    return score;
}

Label classify(double score, double threshold) {
    return score >= threshold ? Label::Face : Label::NonFace;
}

} // namespace rbfdet
