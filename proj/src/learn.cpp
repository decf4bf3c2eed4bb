#include "tlr/learn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tlr/common.hpp"

namespace tlr {

using nlohmann::json;

namespace {
constexpr int kModelFormatVersion = 1;
}

std::string algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::knn5: return "5nn";
        case Algorithm::naive_bayes: return "naive_bayes";
        case Algorithm::logistic: return "logistic";
        case Algorithm::random_forest: return "random_forest";
        case Algorithm::svm: return "svm";
        case Algorithm::vote: return "vote";
    }
    throw InternalError("unhandled Algorithm");
}

Algorithm parse_algorithm(const std::string& name) {
    static const std::map<std::string, Algorithm> lookup{
        {"5nn", Algorithm::knn5},
        {"knn5", Algorithm::knn5},
        {"naive_bayes", Algorithm::naive_bayes},
        {"nb", Algorithm::naive_bayes},
        {"logistic", Algorithm::logistic},
        {"random_forest", Algorithm::random_forest},
        {"rf", Algorithm::random_forest},
        {"svm", Algorithm::svm},
        {"vote", Algorithm::vote}};
    const auto it = lookup.find(name);
    if (it == lookup.end()) throw ConfigError("unknown classifier: '" + name + "'");
    return it->second;
}

Prediction TrainedModel::predict_checked(const std::vector<std::string>& columns,
                                         std::span<const double> row) const {
    if (columns != schema_) {
        throw DataError("prediction input schema differs from the training schema");
    }
    return predict(row);
}

namespace {

void require_both_classes(const Table& table, const char* algorithm) {
    bool has_pos = false, has_neg = false;
    for (const auto label : table.labels) (label ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw DataError(std::string(algorithm) + " requires both classes in training data");
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ---------------------------------------------------------------------------
// k-nearest neighbours
// ---------------------------------------------------------------------------

class KnnModel final : public TrainedModel {
public:
    KnnModel(const Table& table, int k, std::uint64_t seed) : k_(k), data_(table) {
        seed_ = seed;
    }
    explicit KnnModel(const json& p)
        : k_(p.at("k").get<int>()) {
        data_.cols = p.at("cols").get<std::size_t>();
        data_.values = p.at("values").get<std::vector<double>>();
        data_.labels = p.at("labels").get<std::vector<std::uint8_t>>();
    }

    Algorithm algorithm() const override { return Algorithm::knn5; }

    Prediction predict(std::span<const double> row) const override {
        const std::size_t n = data_.rows();
        const int k = std::min<int>(k_, static_cast<int>(n));
        // distance ties resolve by training-row order
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t r = 0; r < n; ++r) {
            const double* v = data_.row(r);
            double d2 = 0.0;
            for (std::size_t c = 0; c < data_.cols; ++c) {
                const double diff = v[c] - row[c];
                d2 += diff * diff;
            }
            dist[r] = {d2, r};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        int valid = 0;
        for (int i = 0; i < k; ++i) valid += data_.labels[dist[i].second] ? 1 : 0;
        const double p = k > 0 ? static_cast<double>(valid) / k : 0.0;
        return {p >= 0.5, p};
    }

    json params_json() const override {
        return {{"k", k_}, {"cols", data_.cols}, {"values", data_.values},
                {"labels", data_.labels}};
    }

private:
    int k_;
    Table data_;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes
// ---------------------------------------------------------------------------

class NaiveBayesModel final : public TrainedModel {
public:
    NaiveBayesModel(const Table& table, double variance_floor, std::uint64_t seed) {
        seed_ = seed;
        const std::size_t p = table.cols;
        mean_[0].assign(p, 0.0);
        mean_[1].assign(p, 0.0);
        var_[0].assign(p, 0.0);
        var_[1].assign(p, 0.0);
        std::size_t counts[2] = {0, 0};
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const int y = table.labels[r] ? 1 : 0;
            ++counts[y];
            const double* v = table.row(r);
            for (std::size_t c = 0; c < p; ++c) mean_[y][c] += v[c];
        }
        for (int y = 0; y < 2; ++y) {
            if (counts[y] == 0) continue;
            for (std::size_t c = 0; c < p; ++c) mean_[y][c] /= counts[y];
        }
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const int y = table.labels[r] ? 1 : 0;
            const double* v = table.row(r);
            for (std::size_t c = 0; c < p; ++c) {
                const double d = v[c] - mean_[y][c];
                var_[y][c] += d * d;
            }
        }
        for (int y = 0; y < 2; ++y) {
            for (std::size_t c = 0; c < p; ++c) {
                var_[y][c] = counts[y] > 0 ? var_[y][c] / counts[y] : variance_floor;
                var_[y][c] = std::max(var_[y][c], variance_floor);
            }
        }
        // Laplace-smoothed priors
        const double total = static_cast<double>(counts[0] + counts[1]);
        log_prior_[0] = std::log((counts[0] + 1.0) / (total + 2.0));
        log_prior_[1] = std::log((counts[1] + 1.0) / (total + 2.0));
    }

    explicit NaiveBayesModel(const json& p) {
        mean_[0] = p.at("mean0").get<std::vector<double>>();
        mean_[1] = p.at("mean1").get<std::vector<double>>();
        var_[0] = p.at("var0").get<std::vector<double>>();
        var_[1] = p.at("var1").get<std::vector<double>>();
        log_prior_[0] = p.at("log_prior0").get<double>();
        log_prior_[1] = p.at("log_prior1").get<double>();
    }

    Algorithm algorithm() const override { return Algorithm::naive_bayes; }

    Prediction predict(std::span<const double> row) const override {
        double log_like[2];
        for (int y = 0; y < 2; ++y) {
            double ll = log_prior_[y];
            for (std::size_t c = 0; c < mean_[y].size(); ++c) {
                const double d = row[c] - mean_[y][c];
                ll += -0.5 * std::log(2.0 * M_PI * var_[y][c]) -
                      d * d / (2.0 * var_[y][c]);
            }
            log_like[y] = ll;
        }
        const double m = std::max(log_like[0], log_like[1]);
        const double e0 = std::exp(log_like[0] - m);
        const double e1 = std::exp(log_like[1] - m);
        const double p = e1 / (e0 + e1);
        return {p >= 0.5, p};
    }

    json params_json() const override {
        return {{"mean0", mean_[0]}, {"mean1", mean_[1]}, {"var0", var_[0]},
                {"var1", var_[1]}, {"log_prior0", log_prior_[0]},
                {"log_prior1", log_prior_[1]}};
    }

private:
    std::vector<double> mean_[2], var_[2];
    double log_prior_[2] = {0.0, 0.0};
};

// ---------------------------------------------------------------------------
// L2-regularized logistic regression (Newton iterations, gradient-norm stop)
// ---------------------------------------------------------------------------

class LogisticModel final : public TrainedModel {
public:
    LogisticModel(const Table& table, const Hyperparams& hp, std::uint64_t seed) {
        seed_ = seed;
        require_both_classes(table, "logistic regression");
        const std::size_t n = table.rows();
        const std::size_t p = table.cols;
        const std::size_t dim = p + 1;  // intercept last
        weights_.assign(dim, 0.0);

        std::vector<double> grad(dim), delta(dim), mu(n);
        std::vector<double> hessian(dim * dim);
        for (int iteration = 0; iteration < hp.logistic_max_iterations; ++iteration) {
            for (std::size_t r = 0; r < n; ++r) {
                const double* v = table.row(r);
                double z = weights_[p];
                for (std::size_t c = 0; c < p; ++c) z += weights_[c] * v[c];
                mu[r] = sigmoid(z);
            }
            // gradient of the penalized negative log-likelihood
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t r = 0; r < n; ++r) {
                const double err = mu[r] - (table.labels[r] ? 1.0 : 0.0);
                const double* v = table.row(r);
                for (std::size_t c = 0; c < p; ++c) grad[c] += err * v[c];
                grad[p] += err;
            }
            for (std::size_t c = 0; c < p; ++c) grad[c] += hp.logistic_ridge * weights_[c];

            double norm = 0.0;
            for (const double g : grad) norm += g * g;
            if (std::sqrt(norm) < hp.logistic_tolerance) break;

            std::fill(hessian.begin(), hessian.end(), 0.0);
            for (std::size_t r = 0; r < n; ++r) {
                const double w = std::max(mu[r] * (1.0 - mu[r]), 1e-12);
                const double* v = table.row(r);
                for (std::size_t i = 0; i < p; ++i) {
                    const double wv = w * v[i];
                    double* h = &hessian[i * dim];
                    for (std::size_t j = i; j < p; ++j) h[j] += wv * v[j];
                    h[p] += wv;
                }
                hessian[p * dim + p] += w;
            }
            for (std::size_t c = 0; c < p; ++c) hessian[c * dim + c] += hp.logistic_ridge;
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < i; ++j) hessian[i * dim + j] = hessian[j * dim + i];

            if (!solve_cholesky(hessian, grad, delta, dim)) break;
            for (std::size_t c = 0; c < dim; ++c) weights_[c] -= delta[c];
        }
    }

    explicit LogisticModel(const json& p) {
        weights_ = p.at("weights").get<std::vector<double>>();
    }

    Algorithm algorithm() const override { return Algorithm::logistic; }

    Prediction predict(std::span<const double> row) const override {
        double z = weights_.back();
        for (std::size_t c = 0; c < row.size(); ++c) z += weights_[c] * row[c];
        const double p = sigmoid(z);
        return {p >= 0.5, p};
    }

    json params_json() const override { return {{"weights", weights_}}; }

    const std::vector<double>& weights() const { return weights_; }

private:
    static bool solve_cholesky(std::vector<double> a, const std::vector<double>& b,
                               std::vector<double>& x, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = a[i * n + j];
                for (std::size_t k = 0; k < j; ++k) sum -= a[i * n + k] * a[j * n + k];
                if (i == j) {
                    if (sum <= 1e-14) return false;
                    a[i * n + j] = std::sqrt(sum);
                } else {
                    a[i * n + j] = sum / a[j * n + j];
                }
            }
        }
        x = b;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < i; ++k) x[i] -= a[i * n + k] * x[k];
            x[i] /= a[i * n + i];
        }
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k) x[i] -= a[k * n + i] * x[k];
            x[i] /= a[i * n + i];
        }
        return true;
    }

    std::vector<double> weights_;  // p feature weights then intercept
};

// ---------------------------------------------------------------------------
// voting ensemble: mean probability of the five base classifiers
// ---------------------------------------------------------------------------

class VoteModel final : public TrainedModel {
public:
    VoteModel(std::vector<std::unique_ptr<TrainedModel>> members, std::uint64_t seed)
        : members_(std::move(members)) {
        seed_ = seed;
    }

    Algorithm algorithm() const override { return Algorithm::vote; }

    Prediction predict(std::span<const double> row) const override {
        double total = 0.0;
        for (const auto& m : members_) total += m->predict(row).p_valid;
        const double p = total / static_cast<double>(members_.size());
        return {p >= 0.5, p};
    }

    json params_json() const override {
        json members = json::array();
        for (const auto& m : members_) {
            members.push_back({{"algorithm", algorithm_name(m->algorithm())},
                               {"params", m->params_json()}});
        }
        return {{"members", members}};
    }

    static std::unique_ptr<TrainedModel> from_json(const json& p);

private:
    std::vector<std::unique_ptr<TrainedModel>> members_;
};

std::unique_ptr<TrainedModel> model_from_params(Algorithm algorithm, const json& params) {
    switch (algorithm) {
        case Algorithm::knn5: return std::make_unique<KnnModel>(params);
        case Algorithm::naive_bayes: return std::make_unique<NaiveBayesModel>(params);
        case Algorithm::logistic: return std::make_unique<LogisticModel>(params);
        case Algorithm::random_forest: return random_forest_from_json(params);
        case Algorithm::svm: return svm_from_json(params);
        case Algorithm::vote: return VoteModel::from_json(params);
    }
    throw InternalError("unhandled Algorithm");
}

std::unique_ptr<TrainedModel> VoteModel::from_json(const json& p) {
    std::vector<std::unique_ptr<TrainedModel>> members;
    for (const auto& m : p.at("members")) {
        members.push_back(model_from_params(parse_algorithm(m.at("algorithm")), m.at("params")));
    }
    return std::make_unique<VoteModel>(std::move(members), 0);
}

}  // namespace

std::unique_ptr<TrainedModel> train(Algorithm algorithm, const Table& table,
                                    const std::vector<std::string>& schema,
                                    const Hyperparams& params, std::uint64_t seed) {
    if (table.cols != schema.size()) {
        throw InternalError("training table width differs from schema");
    }
    std::unique_ptr<TrainedModel> model;
    switch (algorithm) {
        case Algorithm::knn5:
            model = std::make_unique<KnnModel>(table, params.knn_k, seed);
            break;
        case Algorithm::naive_bayes:
            model = std::make_unique<NaiveBayesModel>(table, params.nb_variance_floor, seed);
            break;
        case Algorithm::logistic:
            model = std::make_unique<LogisticModel>(table, params, seed);
            break;
        case Algorithm::random_forest:
            model = train_random_forest(table, params, seed);
            break;
        case Algorithm::svm:
            model = train_svm(table, params, seed);
            break;
        case Algorithm::vote: {
            std::vector<std::unique_ptr<TrainedModel>> members;
            const Algorithm bases[] = {Algorithm::knn5, Algorithm::naive_bayes,
                                       Algorithm::logistic, Algorithm::random_forest,
                                       Algorithm::svm};
            for (std::size_t i = 0; i < 5; ++i) {
                members.push_back(train(bases[i], table, schema, params,
                                        derive_seed(seed, i + 1)));
            }
            model = std::make_unique<VoteModel>(std::move(members), seed);
            break;
        }
    }
    model->schema_ = schema;
    model->seed_ = seed;
    return model;
}

std::string serialize_model(const TrainedModel& model) {
    json j;
    j["version"] = kModelFormatVersion;
    j["algorithm"] = algorithm_name(model.algorithm());
    j["schema"] = model.schema();
    j["seed"] = model.seed();
    j["params"] = model.params_json();
    return j.dump();
}

std::unique_ptr<TrainedModel> deserialize_model(const std::string& payload) {
    json j;
    try {
        j = json::parse(payload);
    } catch (const json::exception& e) {
        throw DataError(std::string("corrupt model payload: ") + e.what());
    }
    try {
        if (j.at("version").get<int>() != kModelFormatVersion) {
            throw DataError("unsupported model format version");
        }
        auto model = model_from_params(parse_algorithm(j.at("algorithm")), j.at("params"));
        model->schema_ = j.at("schema").get<std::vector<std::string>>();
        model->seed_ = j.at("seed").get<std::uint64_t>();
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("corrupt model payload: ") + e.what());
    }
}

}  // namespace tlr
