#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tlr/common.hpp"
#include "tlr/learn.hpp"

namespace tlr {

using nlohmann::json;

namespace {

// Soft-margin RBF SVM trained with sequential minimal optimization using
// maximal-violating-pair working set selection. The full kernel matrix is
// precomputed in single precision when it fits.
constexpr std::size_t kPrecomputeLimit = 3500;

double rbf(const double* a, const double* b, std::size_t p, double gamma) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
        const double diff = a[c] - b[c];
        d2 += diff * diff;
    }
    return std::exp(-gamma * d2);
}

class SvmModel final : public TrainedModel {
public:
    SvmModel(const Table& table, const Hyperparams& hp, std::uint64_t seed) {
        seed_ = seed;
        const std::size_t n = table.rows();
        const std::size_t p = table.cols;
        gamma_ = hp.svm_gamma > 0.0 ? hp.svm_gamma : 1.0 / static_cast<double>(p);
        const double c_param = hp.svm_c;
        const double tol = hp.svm_tolerance;

        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = table.labels[i] ? 1.0 : -1.0;

        std::vector<float> kernel;
        const bool precomputed = n <= kPrecomputeLimit;
        if (precomputed) {
            kernel.resize(n * n);
            for (std::size_t i = 0; i < n; ++i) {
                kernel[i * n + i] = 1.0f;
                for (std::size_t j = i + 1; j < n; ++j) {
                    const float k = static_cast<float>(
                        rbf(table.row(i), table.row(j), p, gamma_));
                    kernel[i * n + j] = k;
                    kernel[j * n + i] = k;
                }
            }
        }
        std::vector<double> krow_i(n), krow_j(n);
        auto kernel_row = [&](std::size_t i, std::vector<double>& out) {
            if (precomputed) {
                for (std::size_t j = 0; j < n; ++j) out[j] = kernel[i * n + j];
            } else {
                for (std::size_t j = 0; j < n; ++j) {
                    out[j] = rbf(table.row(i), table.row(j), p, gamma_);
                }
            }
        };

        std::vector<double> alpha(n, 0.0);
        std::vector<double> grad(n, -1.0);  // gradient of the dual objective

        const long long max_steps =
            std::max<long long>(200000, 100 * static_cast<long long>(n));
        long long steps = 0;
        double m_up = 0.0, m_low = 0.0;
        for (; steps < max_steps; ++steps) {
            // maximal violating pair
            int i = -1, j = -1;
            m_up = -std::numeric_limits<double>::infinity();
            m_low = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < n; ++t) {
                const bool in_up = (y[t] > 0 && alpha[t] < c_param) ||
                                   (y[t] < 0 && alpha[t] > 0);
                const bool in_low = (y[t] > 0 && alpha[t] > 0) ||
                                    (y[t] < 0 && alpha[t] < c_param);
                const double v = -y[t] * grad[t];
                if (in_up && v > m_up) {
                    m_up = v;
                    i = static_cast<int>(t);
                }
                if (in_low && v < m_low) {
                    m_low = v;
                    j = static_cast<int>(t);
                }
            }
            if (i < 0 || j < 0 || m_up - m_low < tol) break;

            kernel_row(i, krow_i);
            kernel_row(j, krow_j);
            const double eta =
                std::max(krow_i[i] + krow_j[j] - 2.0 * krow_i[j], 1e-12);
            const double delta = (m_up - m_low) / eta;

            // clip the pair update to the box
            double step = delta;
            if (y[i] > 0) step = std::min(step, c_param - alpha[i]);
            else step = std::min(step, alpha[i]);
            if (y[j] > 0) step = std::min(step, alpha[j]);
            else step = std::min(step, c_param - alpha[j]);

            alpha[i] += y[i] * step;
            alpha[j] -= y[j] * step;
            for (std::size_t t = 0; t < n; ++t) {
                grad[t] += step * y[t] * (krow_i[t] - krow_j[t]);
            }
        }
        // for free support vectors -y grad equals b, bracketed by (m_low, m_up)
        bias_ = (m_up + m_low) / 2.0;

        // keep support vectors only
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] > 1e-12) {
                coeffs_.push_back(alpha[i] * y[i]);
                support_.insert(support_.end(), table.row(i), table.row(i) + p);
            }
        }
        cols_ = p;
    }

    explicit SvmModel(const json& p) {
        gamma_ = p.at("gamma").get<double>();
        bias_ = p.at("bias").get<double>();
        cols_ = p.at("cols").get<std::size_t>();
        coeffs_ = p.at("coeffs").get<std::vector<double>>();
        support_ = p.at("support").get<std::vector<double>>();
    }

    Algorithm algorithm() const override { return Algorithm::svm; }

    double decision_value(std::span<const double> row) const {
        double f = bias_;
        for (std::size_t s = 0; s < coeffs_.size(); ++s) {
            f += coeffs_[s] * rbf(&support_[s * cols_], row.data(), cols_, gamma_);
        }
        return f;
    }

    Prediction predict(std::span<const double> row) const override {
        // probability via decision-value squashing
        const double p = 1.0 / (1.0 + std::exp(-decision_value(row)));
        return {p >= 0.5, p};
    }

    json params_json() const override {
        return {{"gamma", gamma_}, {"bias", bias_}, {"cols", cols_},
                {"coeffs", coeffs_}, {"support", support_}};
    }

private:
    double gamma_ = 0.0;
    double bias_ = 0.0;
    std::size_t cols_ = 0;
    std::vector<double> coeffs_;   // alpha_i * y_i per support vector
    std::vector<double> support_;  // row-major support vectors
};

}  // namespace

std::unique_ptr<TrainedModel> train_svm(const Table& table, const Hyperparams& params,
                                        std::uint64_t seed) {
    bool has_pos = false, has_neg = false;
    for (const auto label : table.labels) (label ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw DataError("svm requires both classes in training data");
    }
    return std::make_unique<SvmModel>(table, params, seed);
}

std::unique_ptr<TrainedModel> svm_from_json(const json& params) {
    return std::make_unique<SvmModel>(params);
}

}  // namespace tlr
