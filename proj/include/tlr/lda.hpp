#pragma once

#include <span>
#include <string>
#include <vector>

#include "tlr/index.hpp"

namespace tlr {

/// Topic model fit by collapsed Gibbs sampling; document-topic distributions
/// are taken from the final sample. Sampling is single-threaded so a fixed
/// seed always reproduces the same chain.
class LdaModel {
public:
    LdaModel() = default;

    /// `documents` are token lists sharing one vocabulary (built internally).
    explicit LdaModel(std::span<const std::vector<std::string>> documents,
                      const ModelConfig& config);

    int topics() const { return topics_; }

    /// Normalized theta for a fitted document; empty docs get the uniform prior.
    const std::vector<double>& theta(int doc) const { return thetas_[doc]; }

    /// Hellinger-based similarity: 1 - (1/sqrt(2)) * ||sqrt(t1) - sqrt(t2)||.
    double similarity(int d1, int d2) const;

private:
    int topics_ = 0;
    std::vector<std::vector<double>> thetas_;
};

double hellinger_similarity(std::span<const double> theta1, std::span<const double> theta2);

}  // namespace tlr
