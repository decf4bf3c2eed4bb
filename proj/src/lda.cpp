#include "tlr/lda.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tlr/common.hpp"

namespace tlr {

LdaModel::LdaModel(std::span<const std::vector<std::string>> documents,
                   const ModelConfig& config) {
    topics_ = config.lda_topics;
    if (topics_ < 1) throw ConfigError("lda_topics must be at least 1");
    const int num_docs = static_cast<int>(documents.size());
    const double alpha = config.lda_alpha_value();
    const double beta = config.lda_beta;

    // flatten the corpus into parallel word/doc arrays over an integer vocabulary
    std::map<std::string, int> vocab;
    std::vector<int> token_word, token_doc;
    for (int d = 0; d < num_docs; ++d) {
        for (const auto& w : documents[d]) {
            auto [it, inserted] = vocab.emplace(w, static_cast<int>(vocab.size()));
            token_word.push_back(it->second);
            token_doc.push_back(d);
        }
    }
    const int vocab_size = static_cast<int>(vocab.size());
    const std::size_t num_tokens = token_word.size();
    const int k_topics = topics_;

    std::vector<int> topic_of(num_tokens);
    std::vector<int> n_dk(static_cast<std::size_t>(num_docs) * k_topics, 0);
    std::vector<int> n_kw(static_cast<std::size_t>(k_topics) * vocab_size, 0);
    std::vector<int> n_k(k_topics, 0);

    Rng rng(config.rng_seed);
    for (std::size_t i = 0; i < num_tokens; ++i) {
        const int k = static_cast<int>(rng.below(k_topics));
        topic_of[i] = k;
        ++n_dk[static_cast<std::size_t>(token_doc[i]) * k_topics + k];
        ++n_kw[static_cast<std::size_t>(k) * vocab_size + token_word[i]];
        ++n_k[k];
    }

    const double v_beta = vocab_size * beta;
    std::vector<double> inv_nk(k_topics);
    for (int k = 0; k < k_topics; ++k) inv_nk[k] = 1.0 / (n_k[k] + v_beta);

    std::vector<double> cumulative(k_topics);
    for (int sweep = 0; sweep < config.lda_iterations; ++sweep) {
        for (std::size_t i = 0; i < num_tokens; ++i) {
            const int w = token_word[i];
            const int d = token_doc[i];
            int k = topic_of[i];
            int* doc_counts = &n_dk[static_cast<std::size_t>(d) * k_topics];

            --doc_counts[k];
            --n_kw[static_cast<std::size_t>(k) * vocab_size + w];
            --n_k[k];
            inv_nk[k] = 1.0 / (n_k[k] + v_beta);

            double total = 0.0;
            for (int t = 0; t < k_topics; ++t) {
                total += (doc_counts[t] + alpha) *
                         (n_kw[static_cast<std::size_t>(t) * vocab_size + w] + beta) *
                         inv_nk[t];
                cumulative[t] = total;
            }
            const double u = rng.uniform() * total;
            k = static_cast<int>(
                std::lower_bound(cumulative.begin(), cumulative.end(), u) -
                cumulative.begin());
            if (k >= k_topics) k = k_topics - 1;

            topic_of[i] = k;
            ++doc_counts[k];
            ++n_kw[static_cast<std::size_t>(k) * vocab_size + w];
            ++n_k[k];
            inv_nk[k] = 1.0 / (n_k[k] + v_beta);
        }
    }

    thetas_.assign(num_docs, std::vector<double>(k_topics, 0.0));
    for (int d = 0; d < num_docs; ++d) {
        const double len = static_cast<double>(documents[d].size());
        const double denom = len + k_topics * alpha;
        for (int k = 0; k < k_topics; ++k) {
            thetas_[d][k] =
                (n_dk[static_cast<std::size_t>(d) * k_topics + k] + alpha) / denom;
        }
    }
}

double hellinger_similarity(std::span<const double> theta1, std::span<const double> theta2) {
    double sq = 0.0;
    for (std::size_t k = 0; k < theta1.size(); ++k) {
        const double diff = std::sqrt(theta1[k]) - std::sqrt(theta2[k]);
        sq += diff * diff;
    }
    const double sim = 1.0 - std::sqrt(sq) / std::sqrt(2.0);
    return std::clamp(sim, 0.0, 1.0);
}

double LdaModel::similarity(int d1, int d2) const {
    return hellinger_similarity(thetas_[d1], thetas_[d2]);
}

}  // namespace tlr
