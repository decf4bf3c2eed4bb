#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlr/balance.hpp"

namespace tlr {

enum class Algorithm { knn5, naive_bayes, logistic, random_forest, svm, vote };

inline constexpr std::array<Algorithm, 6> kAllAlgorithms{
    Algorithm::knn5,          Algorithm::naive_bayes, Algorithm::logistic,
    Algorithm::random_forest, Algorithm::svm,         Algorithm::vote};

std::string algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

/// Untuned defaults, matching the shipped configuration. Everything is
/// overridable through the run config.
struct Hyperparams {
    int knn_k = 5;
    double nb_variance_floor = 1e-9;
    double logistic_ridge = 1e-8;
    double logistic_tolerance = 1e-6;
    int logistic_max_iterations = 500;
    int rf_trees = 100;
    double svm_c = 1.0;
    double svm_gamma = 0.0;  // 0 means 1/num_features
    double svm_tolerance = 1e-3;
    int jobs = 1;            // tree-level parallelism for the forest
};

struct Prediction {
    bool label = false;
    double p_valid = 0.0;
};

class TrainedModel {
public:
    virtual ~TrainedModel() = default;

    virtual Algorithm algorithm() const = 0;

    /// p_valid in [0,1]; label is (p_valid >= 0.5).
    virtual Prediction predict(std::span<const double> row) const = 0;

    virtual nlohmann::json params_json() const = 0;

    const std::vector<std::string>& schema() const { return schema_; }
    std::uint64_t seed() const { return seed_; }

    /// Verifies the probe's column schema before predicting.
    Prediction predict_checked(const std::vector<std::string>& columns,
                               std::span<const double> row) const;

protected:
    std::vector<std::string> schema_;
    std::uint64_t seed_ = 0;
    friend std::unique_ptr<TrainedModel> train(Algorithm, const Table&,
                                               const std::vector<std::string>&,
                                               const Hyperparams&, std::uint64_t);
    friend std::unique_ptr<TrainedModel> deserialize_model(const std::string&);
};

/// Trains one classifier. Logistic and SVM reject single-class data; the
/// vote ensemble trains the other five members on derived seeds.
std::unique_ptr<TrainedModel> train(Algorithm algorithm, const Table& table,
                                    const std::vector<std::string>& schema,
                                    const Hyperparams& params, std::uint64_t seed);

/// Versioned JSON container; round trips preserve predictions exactly.
std::string serialize_model(const TrainedModel& model);
std::unique_ptr<TrainedModel> deserialize_model(const std::string& payload);

// Concrete trainers and decoders live in learn.cpp / forest.cpp / svm.cpp.
std::unique_ptr<TrainedModel> train_random_forest(const Table& table,
                                                  const Hyperparams& params,
                                                  std::uint64_t seed);
std::unique_ptr<TrainedModel> random_forest_from_json(const nlohmann::json& params);
std::unique_ptr<TrainedModel> train_svm(const Table& table, const Hyperparams& params,
                                        std::uint64_t seed);
std::unique_ptr<TrainedModel> svm_from_json(const nlohmann::json& params);

}  // namespace tlr
