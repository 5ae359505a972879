#include "stylus/tables.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "stylus/mw.hpp"
#include "stylus/screen.hpp"
#include "stylus/wordlists.hpp"

namespace stylus {
namespace {

const std::vector<std::string> kMethods{"bow", "lda", "lsa", "nmf"};
const std::vector<InputType> kTypes{InputType::Type1, InputType::Type2, InputType::Type3};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string method_label(const std::string& m) {
    if (m == "bow") return "BoW";
    std::string up = m;
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    return up;
}

int type_number(InputType t) { return t == InputType::Type1 ? 1 : (t == InputType::Type2 ? 2 : 3); }

std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

std::vector<std::int64_t> row_counts(const TermDocMatrix& tdm, int doc_id) {
    const auto r = tdm.row_of(doc_id);
    if (r < 0) throw Error(ErrorKind::MissingDoc, "paper " + std::to_string(doc_id));
    std::vector<std::int64_t> out(static_cast<std::size_t>(tdm.cols()));
    for (Eigen::Index j = 0; j < tdm.cols(); ++j) out[static_cast<std::size_t>(j)] = tdm.counts(r, j);
    return out;
}

std::vector<std::int64_t> pooled(const TermDocMatrix& tdm, const std::vector<int>& ids) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(tdm.cols()), 0);
    for (int id : ids) {
        const auto row = row_counts(tdm, id);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[j];
    }
    return out;
}

std::vector<int> ids_with(const Corpus& corpus, Author author) {
    std::vector<int> out;
    for (const auto& d : corpus.documents())
        if (d.label == author) out.push_back(d.id);
    return out;
}

Table l2_bow(TableContext& ctx) {
    Table t;
    t.header = {"input"};
    for (const char* c : {"lasso", "bart"})
        for (const auto& m : kMethods) t.header.push_back(std::string(c) + "_" + m);
    for (auto type : kTypes) {
        std::vector<std::string> row{"Type " + std::to_string(type_number(type))};
        for (const char* c : {"lasso", "bart"})
            for (const auto& m : kMethods) row.push_back(fmt(ctx.loocv(m, type, c).l2_loss));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table l2_all(TableContext& ctx) {
    Table t;
    t.header = {"classifier", "bow", "lda", "lsa", "nmf"};
    for (const char* c : {"lasso", "bart"}) {
        std::vector<std::string> row{method_label(c)};
        for (const auto& m : kMethods) row.push_back(fmt(ctx.loocv(m, InputType::Type2, c).l2_loss));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table thresholds(TableContext& ctx) {
    Table t;
    t.header = {"method", "lasso_roc", "lasso_f1", "bart_roc", "bart_f1"};
    for (const auto& m : kMethods) {
        for (auto type : kTypes) {
            std::vector<std::string> row{method_label(m) + " " + std::to_string(type_number(type))};
            for (const char* c : {"lasso", "bart"}) {
                const auto& r = ctx.loocv(m, type, c);
                row.push_back(fmt(youden_threshold(as_span(r.probs), as_span(r.labels))));
                row.push_back(fmt(f1_threshold(as_span(r.probs), as_span(r.labels))));
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

Table joint(TableContext& ctx) {
    Table t;
    t.header = {"paper", "bow", "lda", "lsa", "nmf"};
    for (int id : ctx.split().joint_ids) {
        std::vector<std::string> row{"No." + std::to_string(id)};
        for (const auto& m : kMethods) row.push_back(fmt(ctx.joint_probability(m, InputType::Type2, id)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table hc(TableContext& ctx) {
    const auto& corpus = ctx.corpus();
    const auto& tdm = ctx.tdm(InputType::Type2);
    const auto ham = pooled(tdm, ids_with(corpus, Author::Hamilton));
    const auto mad = pooled(tdm, ids_with(corpus, Author::Madison));
    Table t;
    t.header = {"paper", "type", "hamilton", "madison", "diff", "decision"};
    for (Author kind : {Author::Disputed, Author::Joint}) {
        for (int id : ids_with(corpus, kind)) {
            const auto a = attribute_by_hc(row_counts(tdm, id), ham, mad, tdm.vocab, ctx.config().screening.gamma0);
            t.rows.push_back({std::to_string(id), kind == Author::Disputed ? "disputed" : "joint", fmt(a.d_hamilton),
                              fmt(a.d_madison), fmt(a.diff), std::string(to_string(a.author))});
        }
    }
    return t;
}

Table mw(TableContext& ctx) {
    const auto& corpus = ctx.corpus();
    const auto& tdm = ctx.tdm(InputType::Type3);
    const auto ham_ids = ids_with(corpus, Author::Hamilton);
    const auto mad_ids = ids_with(corpus, Author::Madison);
    auto author_counts = [&](const std::vector<int>& ids, Eigen::Index col) {
        AuthorCounts a;
        for (int id : ids) {
            a.counts.push_back(tdm.counts(tdm.row_of(id), col));
            a.lengths.push_back(static_cast<double>(corpus.by_id(id).tokens.size()));
        }
        return a;
    };
    std::vector<NbWordModel> models;
    for (Eigen::Index j = 0; j < tdm.cols(); ++j) {
        const auto h = author_counts(ham_ids, j);
        const auto m = author_counts(mad_ids, j);
        std::int64_t total = 0;
        for (auto c : h.counts) total += c;
        for (auto c : m.counts) total += c;
        if (total < 10) continue;
        models.push_back(fit_word_params(tdm.vocab[static_cast<std::size_t>(j)], h, m));
    }
    Table t;
    t.header = {"paper", "type", "log_odds", "decision"};
    for (Author kind : {Author::Disputed, Author::Joint}) {
        for (int id : ids_with(corpus, kind)) {
            const auto r = document_log_odds(id, row_counts(tdm, id), tdm.vocab,
                                             static_cast<double>(corpus.by_id(id).tokens.size()), models);
            t.rows.push_back({std::to_string(id), kind == Author::Disputed ? "disputed" : "joint", fmt(r.total),
                              r.total < 0 ? "Madison" : "Hamilton"});
        }
    }
    return t;
}

}  // namespace

TableContext::TableContext(RunConfig config, unsigned jobs) : config_(std::move(config)), jobs_(jobs) {}

const Corpus& TableContext::corpus() {
    if (!corpus_) corpus_ = in_stage("ingest", [&] { return load_corpus(config_); });
    return *corpus_;
}

const TermDocMatrix& TableContext::tdm(InputType type) {
    auto it = tdms_.find(type);
    if (it == tdms_.end()) {
        const auto& c = corpus();
        it = tdms_.emplace(type, in_stage("bow", [&] { return build_tdm(c, type); })).first;
    }
    return it->second;
}

const TrainTestSplit& TableContext::split() {
    if (!split_) {
        const auto& m = tdm(InputType::Type2);
        split_ = in_stage("bow", [&] { return split_train_test(m, default_label_table()); });
    }
    return *split_;
}

const DocEmbedding& TableContext::embedding(const std::string& method, InputType type) {
    const auto key = std::make_pair(method, type);
    auto it = embeddings_.find(key);
    if (it == embeddings_.end()) {
        EmbeddingConfig cfg = config_.embedding;
        cfg.method = method;
        const auto& m = tdm(type);
        auto emb = in_stage("embed", [&] { return compute_embedding(m, cfg, jobs_).embedding; });
        it = embeddings_.emplace(key, std::move(emb)).first;
    }
    return it->second;
}

const LoocvResult& TableContext::loocv(const std::string& method, InputType type, const std::string& classifier) {
    const auto key = std::make_tuple(method, type, classifier);
    auto it = loocv_.find(key);
    if (it == loocv_.end()) {
        const auto& s = split();
        const auto& emb = embedding(method, type);
        ClassifierConfig cfg = config_.classifier;
        cfg.method = classifier;
        auto result = in_stage("classify", [&] {
            const Eigen::MatrixXd x = emb.rows(s.train_ids);
            const Eigen::VectorXd y =
                Eigen::Map<const Eigen::VectorXd>(s.train_labels.data(), static_cast<Eigen::Index>(s.train_labels.size()));
            return stylus::loocv(x, y, s.train_ids, make_predictor(cfg), cfg.seed, jobs_, method + "+" + classifier);
        });
        it = loocv_.emplace(key, std::move(result)).first;
    }
    return it->second;
}

double TableContext::joint_probability(const std::string& method, InputType type, int doc_id) {
    const auto key = std::make_pair(method, type);
    auto it = joint_.find(key);
    if (it == joint_.end()) {
        const auto& s = split();
        const auto& emb = embedding(method, type);
        ClassifierConfig cfg = config_.classifier;
        cfg.method = "bart";
        auto preds = in_stage("classify", [&] {
            const Eigen::VectorXd y =
                Eigen::Map<const Eigen::VectorXd>(s.train_labels.data(), static_cast<Eigen::Index>(s.train_labels.size()));
            return fit_and_predict(cfg, emb.rows(s.train_ids), y, emb.rows(s.joint_ids), s.joint_ids);
        });
        it = joint_.emplace(key, std::move(preds)).first;
    }
    for (const auto& p : it->second)
        if (p.doc_id == doc_id) return p.prob;
    throw Error(ErrorKind::MissingDoc, "paper " + std::to_string(doc_id) + " is not a joint paper");
}

const std::vector<std::string>& table_ids() {
    static const std::vector<std::string> ids{"l2_all", "l2_bow", "thresholds", "joint", "mw", "hc"};
    return ids;
}

Table run_table(std::string_view id, TableContext& context) {
    if (id == "l2_all") return l2_all(context);
    if (id == "l2_bow") return l2_bow(context);
    if (id == "thresholds") return thresholds(context);
    if (id == "joint") return joint(context);
    if (id == "mw") return in_stage("mw", [&] { return mw(context); });
    if (id == "hc") return in_stage("screen", [&] { return hc(context); });
    throw Error(ErrorKind::UnknownTable, "unknown table '" + std::string(id) + "'");
}

void write_table_csv(const Table& table, std::ostream& out) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
}

}  // namespace stylus
