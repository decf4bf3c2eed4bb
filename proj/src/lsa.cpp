#include "tlr/lsa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tlr/common.hpp"

namespace tlr {

EigenResult jacobi_eigen_symmetric(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a[i][j]));
    const double tol = scale > 0.0 ? scale * 1e-14 : 0.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += std::fabs(a[i][j]);
        if (off <= tol * static_cast<double>(n)) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) <= tol) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });

    EigenResult result;
    result.values.reserve(n);
    result.vectors.reserve(n);
    for (const std::size_t idx : order) {
        result.values.push_back(a[idx][idx]);
        std::vector<double> vec(n);
        for (std::size_t k = 0; k < n; ++k) vec[k] = v[k][idx];
        result.vectors.push_back(std::move(vec));
    }
    return result;
}

LsaModel::LsaModel(const TermIndex& index, const ModelConfig& config) {
    if (config.lsa_rank < 1) throw ConfigError("lsa_rank must be at least 1");
    const int n = index.num_docs;
    if (n == 0) return;

    // Gram matrix of TF-IDF document vectors, accumulated term by term.
    std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
    for (std::size_t t = 0; t < index.terms.size(); ++t) {
        const double idf = index.idf(static_cast<int>(t));
        if (idf == 0.0) continue;
        const auto& posting = index.postings[t];
        for (std::size_t i = 0; i < posting.size(); ++i) {
            const double wi = posting[i].count * idf;
            for (std::size_t j = i; j < posting.size(); ++j) {
                const double contribution = wi * (posting[j].count * idf);
                gram[posting[i].doc][posting[j].doc] += contribution;
                if (i != j) gram[posting[j].doc][posting[i].doc] += contribution;
            }
        }
    }

    EigenResult eig = jacobi_eigen_symmetric(std::move(gram));
    const double lead = eig.values.empty() ? 0.0 : std::max(eig.values[0], 0.0);
    int matrix_rank = 0;
    for (const double lambda : eig.values) {
        if (lambda > lead * 1e-12 && lambda > 0.0) ++matrix_rank;
    }
    rank_ = std::min(config.lsa_rank, matrix_rank);

    singular_values_.resize(rank_);
    v_columns_.resize(rank_);
    for (int k = 0; k < rank_; ++k) {
        singular_values_[k] = std::sqrt(eig.values[k]);
        v_columns_[k] = std::move(eig.vectors[k]);
    }
    doc_reps_.assign(n, std::vector<double>(rank_, 0.0));
    for (int d = 0; d < n; ++d) {
        for (int k = 0; k < rank_; ++k) {
            doc_reps_[d][k] = v_columns_[k][d] * singular_values_[k];
        }
    }
}

std::vector<double> LsaModel::fold_in(const TermIndex& index,
                                      const IndexedQuery& query) const {
    // X^T q: dot product of the query's TF-IDF vector with every document.
    std::vector<double> xtq(index.num_docs, 0.0);
    for (const auto& qt : query.terms) {
        const double idf = index.idf(qt.term);
        if (idf == 0.0) continue;
        const double wq = qt.count * idf;
        for (const auto& dc : index.postings[qt.term]) {
            xtq[dc.doc] += wq * (dc.count * idf);
        }
    }
    std::vector<double> rep(rank_, 0.0);
    for (int k = 0; k < rank_; ++k) {
        double dot = 0.0;
        for (int d = 0; d < index.num_docs; ++d) dot += v_columns_[k][d] * xtq[d];
        rep[k] = singular_values_[k] > 0.0 ? dot / singular_values_[k] : 0.0;
    }
    return rep;
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double LsaModel::similarity(int d1, int d2) const {
    return cosine(doc_reps_[d1], doc_reps_[d2]);
}

double LsaModel::similarity_to_query(const std::vector<double>& query_rep, int doc) const {
    return cosine(query_rep, doc_reps_[doc]);
}

}  // namespace tlr
