#include "stylus/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "stylus/bart.hpp"
#include "stylus/factorize.hpp"
#include "stylus/lasso.hpp"
#include "stylus/schema.hpp"

namespace stylus {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

ordered_json confusion_json(const Confusion& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

}  // namespace

std::string StageError::to_json() const {
    ordered_json j;
    j["error"] = {{"stage", stage_}, {"kind", std::string(to_string(kind()))}, {"message", detail()}};
    return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

Corpus load_corpus(const RunConfig& config) {
    LabelTable labels = default_label_table();
    if (!config.labels.empty()) {
        std::ifstream in(config.labels);
        if (!in) throw Error(ErrorKind::Io, "cannot open " + config.labels.string());
        labels = read_label_table(in);
    }
    ParseOptions options;
    options.lemmatize = config.lemmatize;
    return parse_corpus(config.corpus, labels, options);
}

EmbeddingResult compute_embedding(const TermDocMatrix& tdm, const EmbeddingConfig& config, unsigned jobs) {
    EmbeddingResult out;
    auto& emb = out.embedding;
    emb.method = config.method;
    emb.doc_ids = tdm.doc_ids;
    if (config.method == "bow") {
        emb.values = row_normalize(tdm).values * 1000.0;
    } else if (config.method == "lda") {
        LdaParams params;
        params.alpha = config.lda_alpha;
        params.beta = config.lda_beta;
        params.iters = config.lda_iters;
        params.seed = config.seed;
        out.lda = lda_select_k(tdm, config.topics, params, jobs);
        emb.values = out.lda->model.doc_topic;
    } else if (config.method == "lsa") {
        LsaParams params;
        params.rank = config.rank;
        params.seed = config.seed;
        emb.values = lsa_fit(row_normalize(tdm).values, params).S;
    } else if (config.method == "nmf") {
        NmfParams params;
        params.rank = config.rank;
        params.iters = config.nmf_iters;
        params.seed = config.seed;
        emb.values = nmf_fit(row_normalize(tdm).values, params).S;
    } else if (config.method == "aggregate") {
        std::ifstream in(config.word_vectors);
        if (!in) throw Error(ErrorKind::Io, "cannot open " + config.word_vectors.string());
        const auto aligned = align_word_vectors(read_word_vectors(in), tdm.vocab);
        const auto norm = row_normalize(tdm);
        emb = aggregate_word_vectors(norm, aligned.vectors);
        emb.method = config.method;
    } else if (config.method == "external") {
        std::ifstream in(config.file);
        if (!in) throw Error(ErrorKind::Io, "cannot open " + config.file.string());
        emb = load_embedding(in, tdm.doc_ids, "external");
    } else {
        throw Error(ErrorKind::InvalidConfig, "unknown embedding method '" + config.method + "'");
    }
    return out;
}

FoldPredictor make_predictor(const ClassifierConfig& config) {
    if (config.method == "lasso") {
        const LassoParams params = config.lasso;
        return [params](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::RowVectorXd& test,
                        std::uint64_t) { return lasso_predict(lasso_fit(x, y, params), test)(0); };
    }
    if (config.method == "bart") {
        const BartParams base = config.bart;
        return [base](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::RowVectorXd& test,
                      std::uint64_t seed) {
            BartParams params = base;
            params.seed = seed;
            return bart_predict(bart_fit(x, y, params), test).prob(0);
        };
    }
    throw Error(ErrorKind::InvalidConfig, "unknown classifier '" + config.method + "'");
}

std::vector<Prediction> fit_and_predict(const ClassifierConfig& config, const Eigen::MatrixXd& x_train,
                                        const Eigen::VectorXd& y_train, const Eigen::MatrixXd& x_test,
                                        const std::vector<int>& test_ids) {
    std::vector<Prediction> out(test_ids.size());
    for (std::size_t i = 0; i < test_ids.size(); ++i) out[i].doc_id = test_ids[i];
    if (config.method == "lasso") {
        const auto p = lasso_predict(lasso_fit(x_train, y_train, config.lasso), x_test);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i].prob = out[i].lo95 = out[i].hi95 = p(static_cast<Eigen::Index>(i));
    } else if (config.method == "bart") {
        BartParams params = config.bart;
        params.seed = config.seed;
        const auto p = bart_predict(bart_fit(x_train, y_train, params), x_test);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            out[i].prob = p.prob(r);
            out[i].lo95 = p.lo95(r);
            out[i].hi95 = p.hi95(r);
        }
    } else {
        throw Error(ErrorKind::InvalidConfig, "unknown classifier '" + config.method + "'");
    }
    return out;
}

PipelineResult run_pipeline(const RunConfig& config, unsigned jobs, bool score_test) {
    const Corpus corpus = in_stage("ingest", [&] { return load_corpus(config); });
    const TermDocMatrix tdm = in_stage("bow", [&] { return build_tdm(corpus, config.input_type); });
    const TrainTestSplit split = in_stage("bow", [&] { return split_train_test(tdm, default_label_table()); });
    const EmbeddingResult emb = in_stage("embed", [&] { return compute_embedding(tdm, config.embedding, jobs); });

    PipelineResult result;
    if (emb.lda) result.selected_topics = emb.lda->best_topics;
    const Eigen::MatrixXd x_train = emb.embedding.rows(split.train_ids);
    const Eigen::VectorXd y_train =
        Eigen::Map<const Eigen::VectorXd>(split.train_labels.data(), static_cast<Eigen::Index>(split.train_labels.size()));
    std::vector<int> scored = split.test_ids;
    scored.insert(scored.end(), split.joint_ids.begin(), split.joint_ids.end());

    in_stage("classify", [&] {
        result.loocv = loocv(x_train, y_train, split.train_ids, make_predictor(config.classifier),
                             config.classifier.seed, jobs, config.embedding.method + "+" + config.classifier.method);
        if (score_test)
            result.predictions = fit_and_predict(config.classifier, x_train, y_train, emb.embedding.rows(scored), scored);
    });

    in_stage("eval", [&] {
        const auto probs = as_span(result.loocv.probs);
        const auto labels = as_span(result.loocv.labels);
        result.thresholds = threshold_report(probs, labels, config.fixed_threshold);
        std::vector<double> ham, mad, disputed;
        for (std::size_t i = 0; i < probs.size(); ++i) (labels[i] == 1 ? mad : ham).push_back(probs[i]);
        for (const auto& p : result.predictions)
            if (std::find(split.test_ids.begin(), split.test_ids.end(), p.doc_id) != split.test_ids.end())
                disputed.push_back(p.prob);
        result.density = density_curve(ham, mad, disputed);

        fs::create_directories(config.output_dir);
        ordered_json report;
        report["config"] = {{"input_type", std::string(to_string(config.input_type))},
                            {"embedding", config.embedding.method},
                            {"embedding_seed", config.embedding.seed},
                            {"classifier", config.classifier.method},
                            {"classifier_seed", config.classifier.seed}};
        if (emb.lda) {
            report["lda"] = {{"selected_topics", emb.lda->best_topics},
                             {"candidates", emb.lda->candidates},
                             {"bic", emb.lda->bic}};
        }
        const auto& t = result.thresholds;
        report["l2_loss"] = result.loocv.l2_loss;
        report["thresholds"] = {{"roc", t.roc},
                                {"f1", t.f1},
                                {"fixed", t.fixed},
                                {"class_ratio", static_cast<double>(mad.size()) / static_cast<double>(ham.size())}};
        report["errors"] = {{"roc", t.error_roc}, {"f1", t.error_f1}, {"fixed", t.error_fixed}};
        report["confusion"] = {{"roc", confusion_json(t.confusion_roc)},
                               {"f1", confusion_json(t.confusion_f1)},
                               {"fixed", confusion_json(t.confusion_fixed)}};
        ordered_json folds = ordered_json::array();
        for (std::size_t i = 0; i < probs.size(); ++i)
            folds.push_back({{"doc_id", result.loocv.doc_ids[i]}, {"label", static_cast<int>(labels[i])}, {"prob", probs[i]}});
        report["loocv"] = std::move(folds);
        ordered_json preds = ordered_json::array();
        for (const auto& p : result.predictions) {
            const bool joint = std::find(split.joint_ids.begin(), split.joint_ids.end(), p.doc_id) != split.joint_ids.end();
            preds.push_back({{"doc_id", p.doc_id},
                             {"type", joint ? "joint" : "disputed"},
                             {"prob_madison", p.prob},
                             {"lo95", p.lo95},
                             {"hi95", p.hi95},
                             {"author_roc", p.prob > t.roc ? "Madison" : "Hamilton"}});
        }
        report["predictions"] = std::move(preds);
        write_checked(config.output_dir / "eval_report.json", report.dump(2) + '\n', JsonDocument::EvalReport);

        if (score_test) {
            write_checked(config.output_dir / "predictions.csv", render([&](std::ostream& csv) {
                              csv.precision(17);
                              csv << "doc_id,prob_madison,lo95,hi95\n";
                              for (const auto& p : result.predictions)
                                  csv << p.doc_id << ',' << p.prob << ',' << p.lo95 << ',' << p.hi95 << '\n';
                          }),
                          predictions_schema());
        }
        write_checked(config.output_dir / "density.csv",
                      render([&](std::ostream& out) { write_density_csv(result.density, out); }), density_schema());
    });
    return result;
}

}  // namespace stylus
