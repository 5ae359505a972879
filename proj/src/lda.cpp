#include "stylus/lda.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "stylus/error.hpp"
#include "stylus/parallel.hpp"

namespace stylus {

LdaSampler::LdaSampler(const TermDocMatrix& tdm, const LdaParams& params)
    : tdm_(&tdm),
      topics_(params.topics),
      alpha_(params.resolved_alpha()),
      beta_(params.beta),
      rng_(params.seed) {
    if (topics_ < 1) throw Error(ErrorKind::InvalidK, "topic count must be >= 1");
    if (!(alpha_ > 0) || !(beta_ > 0))
        throw Error(ErrorKind::InvalidParam, "Dirichlet hyperparameters must be positive");
    const auto n = tdm.rows();
    const auto vocab = tdm.cols();
    doc_topic_ = Eigen::MatrixXi::Zero(n, topics_);
    topic_word_ = Eigen::MatrixXi::Zero(topics_, vocab);
    topic_total_ = Eigen::VectorXi::Zero(topics_);
    word_of_.resize(static_cast<std::size_t>(n));
    topic_of_.resize(static_cast<std::size_t>(n));
    weights_.resize(static_cast<std::size_t>(topics_));

    std::uniform_int_distribution<int> pick(0, topics_ - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& words = word_of_[static_cast<std::size_t>(i)];
        auto& topics = topic_of_[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < vocab; ++j) {
            for (std::int64_t c = 0; c < tdm.counts(i, j); ++c) {
                const int k = pick(rng_);
                words.push_back(static_cast<int>(j));
                topics.push_back(k);
                ++doc_topic_(i, k);
                ++topic_word_(k, j);
                ++topic_total_(k);
            }
        }
    }
}

void LdaSampler::sweep() {
    const double vocab_beta = static_cast<double>(tdm_->cols()) * beta_;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < word_of_.size(); ++i) {
        const auto& words = word_of_[i];
        auto& topics = topic_of_[i];
        const auto row = static_cast<Eigen::Index>(i);
        for (std::size_t t = 0; t < words.size(); ++t) {
            const int w = words[t];
            int k = topics[t];
            --doc_topic_(row, k);
            --topic_word_(k, w);
            --topic_total_(k);

            double total = 0;
            for (int z = 0; z < topics_; ++z) {
                total += (doc_topic_(row, z) + alpha_) * (topic_word_(z, w) + beta_) /
                         (topic_total_(z) + vocab_beta);
                weights_[static_cast<std::size_t>(z)] = total;
            }
            const double u = unif(rng_) * total;
            k = 0;
            while (k < topics_ - 1 && weights_[static_cast<std::size_t>(k)] <= u) ++k;

            topics[t] = k;
            ++doc_topic_(row, k);
            ++topic_word_(k, w);
            ++topic_total_(k);
        }
    }
    ++sweeps_;
}

LdaModel LdaSampler::model() const {
    LdaModel m;
    m.topics = topics_;
    m.alpha = alpha_;
    m.beta = beta_;
    const auto n = doc_topic_.rows();
    const auto vocab = topic_word_.cols();
    m.doc_topic.resize(n, topics_);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double denom = doc_topic_.row(i).sum() + topics_ * alpha_;
        for (int k = 0; k < topics_; ++k) m.doc_topic(i, k) = (doc_topic_(i, k) + alpha_) / denom;
    }
    m.topic_word.resize(topics_, vocab);
    for (int k = 0; k < topics_; ++k) {
        const double denom = topic_total_(k) + static_cast<double>(vocab) * beta_;
        for (Eigen::Index j = 0; j < vocab; ++j)
            m.topic_word(k, j) = (topic_word_(k, j) + beta_) / denom;
    }
    m.assignments = topic_of_;
    m.doc_ids = tdm_->doc_ids;
    m.vocab = tdm_->vocab;
    m.log_likelihood = lda_log_likelihood(*tdm_, m.doc_topic, m.topic_word);
    return m;
}

LdaModel lda_fit(const TermDocMatrix& tdm, const LdaParams& params) {
    if (params.topics < 1) throw Error(ErrorKind::InvalidK, "topic count must be >= 1");
    if (params.iters < 1) throw Error(ErrorKind::InvalidParam, "iters must be >= 1");
    LdaSampler sampler(tdm, params);
    for (int s = 0; s < params.iters; ++s) sampler.sweep();
    return sampler.model();
}

double lda_log_likelihood(const TermDocMatrix& tdm, const Eigen::MatrixXd& doc_topic,
                          const Eigen::MatrixXd& topic_word) {
    const Eigen::MatrixXd word_prob = doc_topic * topic_word;
    double ll = 0;
    for (Eigen::Index i = 0; i < tdm.rows(); ++i)
        for (Eigen::Index j = 0; j < tdm.cols(); ++j)
            if (tdm.counts(i, j) > 0)
                ll += static_cast<double>(tdm.counts(i, j)) * std::log(word_prob(i, j));
    return ll;
}

double lda_bic(const TermDocMatrix& tdm, const LdaModel& model) {
    const double k = model.topics;
    const double vocab = static_cast<double>(tdm.cols());
    const double n = static_cast<double>(tdm.rows());
    const double q = k * (vocab - 1) + n * (k - 1);
    const double tokens = static_cast<double>(tdm.counts.sum());
    return -2.0 * model.log_likelihood + q * std::log(tokens);
}

LdaSelection lda_select_k(const TermDocMatrix& tdm, const std::vector<int>& candidates,
                          const LdaParams& base, unsigned jobs) {
    if (candidates.empty()) throw Error(ErrorKind::InvalidK, "no topic-count candidates");
    std::vector<LdaModel> models(candidates.size());
    parallel_for(candidates.size(), jobs, [&](std::size_t c) {
        LdaParams p = base;
        p.topics = candidates[c];
        p.seed = base.seed + static_cast<std::uint64_t>(candidates[c]);
        models[c] = lda_fit(tdm, p);
    });
    LdaSelection sel;
    sel.candidates = candidates;
    std::size_t best = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        sel.bic.push_back(lda_bic(tdm, models[c]));
        if (sel.bic[c] < sel.bic[best] ||
            (sel.bic[c] == sel.bic[best] && candidates[c] < candidates[best]))
            best = c;
    }
    sel.best_topics = candidates[best];
    sel.model = std::move(models[best]);
    return sel;
}

void write_lda_model_json(const LdaModel& model, std::ostream& out) {
    auto rows = [](const Eigen::MatrixXd& m) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            std::vector<double> r(static_cast<std::size_t>(m.cols()));
            for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
            arr.push_back(r);
        }
        return arr;
    };
    nlohmann::ordered_json j;
    j["K"] = model.topics;
    j["alpha"] = model.alpha;
    j["beta"] = model.beta;
    j["doc_ids"] = model.doc_ids;
    j["vocab"] = model.vocab;
    j["doc_topic"] = rows(model.doc_topic);
    j["topic_word"] = rows(model.topic_word);
    out << j.dump() << '\n';
}

}  // namespace stylus
