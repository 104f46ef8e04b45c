#pragma once

#include <Eigen/Core>

namespace cambrian {

/// Objective triple, always ordered (support, confidence, cosine). All components lie in [0, 1].
struct FitnessVector {
    double support = 0.0;
    double confidence = 0.0;
    double cosine = 0.0;

    Eigen::Array3d array() const { return {support, confidence, cosine}; }
    double sum() const { return support + confidence + cosine; }

    friend bool operator==(const FitnessVector&, const FitnessVector&) = default;
};

} // namespace cambrian
