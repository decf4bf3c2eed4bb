#pragma once

#include <vector>

#include "tlr/index.hpp"

namespace tlr {

/// Symmetric eigendecomposition (cyclic Jacobi). Returns eigenvalues in
/// descending order; `vectors[k]` is the eigenvector of `values[k]`.
struct EigenResult {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};
EigenResult jacobi_eigen_symmetric(std::vector<std::vector<double>> a);

/// Truncated SVD of the TF-IDF term-by-document matrix, computed through the
/// document Gram matrix (documents vastly outnumbered by terms here, so the
/// D x D eigenproblem is the cheap route). Document d is represented by row d
/// of V*S truncated to k dimensions.
class LsaModel {
public:
    LsaModel() = default;
    LsaModel(const TermIndex& index, const ModelConfig& config);

    int rank() const { return rank_; }

    /// k-dimensional representation of an indexed document.
    const std::vector<double>& doc_rep(int doc) const { return doc_reps_[doc]; }

    /// Folds an external query into the document space: S^-1 V^T (X^T q).
    std::vector<double> fold_in(const TermIndex& index, const IndexedQuery& query) const;

    /// Cosine in the truncated space; 0 when either representation is zero.
    double similarity(int d1, int d2) const;
    double similarity_to_query(const std::vector<double>& query_rep, int doc) const;

private:
    int rank_ = 0;
    std::vector<double> singular_values_;
    std::vector<std::vector<double>> v_columns_;  // V's columns, one per kept factor
    std::vector<std::vector<double>> doc_reps_;   // rows of V*S
};

}  // namespace tlr
