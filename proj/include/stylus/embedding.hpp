#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "stylus/bow.hpp"

namespace stylus {

/// n x p document representation, rows aligned with doc_ids.
struct DocEmbedding {
    Eigen::MatrixXd values;
    std::string method;
    std::vector<int> doc_ids;

    Eigen::Index row_of(int doc_id) const noexcept;
    /// Rows for the given ids, in that order.
    Eigen::MatrixXd rows(const std::vector<int>& ids) const;
};

struct WordVectors {
    std::vector<std::string> words;
    Eigen::MatrixXd vectors;  // one row per word
};

/// Text format: "word v1 ... vd", one word per line, constant d.
WordVectors read_word_vectors(std::istream& in);

struct AlignedWordVectors {
    Eigen::MatrixXd vectors;  // vocab.size() x d; zero rows for missing words
    std::vector<std::string> missing;
    double coverage = 0;  // fraction of vocab found
};

AlignedWordVectors align_word_vectors(const WordVectors& wv,
                                      const std::vector<std::string>& vocab);

/// Z_D = X~ Z_W.
DocEmbedding aggregate_word_vectors(const RowNormalizedMatrix& x_norm,
                                    const Eigen::MatrixXd& word_vectors);

/// embedding.csv: doc_id followed by p values; an optional header row is
/// skipped. The result follows the order of expected_docs.
DocEmbedding load_embedding(std::istream& in, const std::vector<int>& expected_docs,
                            std::string method = "external");

void write_embedding_csv(const DocEmbedding& emb, std::ostream& out);

}  // namespace stylus
