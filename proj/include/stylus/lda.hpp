#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "stylus/bow.hpp"

namespace stylus {

struct LdaParams {
    int topics = 5;
    /// Symmetric document-topic prior; a non-positive value means 50 / topics.
    double alpha = -1.0;
    double beta = 0.1;
    int iters = 2000;
    std::uint64_t seed = 1;

    double resolved_alpha() const { return alpha > 0 ? alpha : 50.0 / topics; }
};

struct LdaModel {
    int topics = 0;
    double alpha = 0;
    double beta = 0;
    Eigen::MatrixXd doc_topic;   // n x K, rows on the simplex
    Eigen::MatrixXd topic_word;  // K x N, rows on the simplex
    std::vector<std::vector<int>> assignments;  // per document, per token
    double log_likelihood = 0;
    std::vector<int> doc_ids;
    std::vector<std::string> vocab;
};

/// Collapsed Gibbs sampler over the tokens implied by a count matrix. Tokens
/// of document i are laid out column by column, so token order is fixed by
/// the matrix and the seed fully determines the chain.
class LdaSampler {
public:
    LdaSampler(const TermDocMatrix& tdm, const LdaParams& params);

    void sweep();
    int sweeps_done() const noexcept { return sweeps_; }

    const Eigen::MatrixXi& doc_topic_counts() const noexcept { return doc_topic_; }
    const Eigen::MatrixXi& topic_word_counts() const noexcept { return topic_word_; }
    const Eigen::VectorXi& topic_totals() const noexcept { return topic_total_; }
    const std::vector<std::vector<int>>& assignments() const noexcept { return topic_of_; }
    const std::vector<std::vector<int>>& token_words() const noexcept { return word_of_; }

    /// Posterior-mean estimates from the current state.
    LdaModel model() const;

private:
    const TermDocMatrix* tdm_;
    int topics_;
    double alpha_;
    double beta_;
    std::mt19937_64 rng_;
    std::vector<std::vector<int>> word_of_;
    std::vector<std::vector<int>> topic_of_;
    Eigen::MatrixXi doc_topic_;
    Eigen::MatrixXi topic_word_;
    Eigen::VectorXi topic_total_;
    std::vector<double> weights_;
    int sweeps_ = 0;
};

LdaModel lda_fit(const TermDocMatrix& tdm, const LdaParams& params);

/// sum_ij x_ij log(sum_k doc_topic_ik topic_word_kj)
double lda_log_likelihood(const TermDocMatrix& tdm, const Eigen::MatrixXd& doc_topic,
                          const Eigen::MatrixXd& topic_word);

/// -2 logL + q log(T) with q = K(N-1) + n(K-1) and T the total token count.
double lda_bic(const TermDocMatrix& tdm, const LdaModel& model);

struct LdaSelection {
    int best_topics = 0;
    std::vector<int> candidates;
    std::vector<double> bic;
    LdaModel model;
};

/// Fits every candidate topic count (seed + K each) and keeps the BIC
/// minimizer; ties go to the smaller K.
LdaSelection lda_select_k(const TermDocMatrix& tdm, const std::vector<int>& candidates,
                          const LdaParams& base, unsigned jobs = 1);

/// lda_model.json: {K, alpha, beta, doc_topic, topic_word}
void write_lda_model_json(const LdaModel& model, std::ostream& out);

}  // namespace stylus
