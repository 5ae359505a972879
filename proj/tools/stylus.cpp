#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stylus/bow.hpp"
#include "stylus/config.hpp"
#include "stylus/corpus.hpp"
#include "stylus/embedding.hpp"
#include "stylus/lasso.hpp"
#include "stylus/lda.hpp"
#include "stylus/mw.hpp"
#include "stylus/pipeline.hpp"
#include "stylus/schema.hpp"
#include "stylus/screen.hpp"
#include "stylus/tables.hpp"

namespace fs = std::filesystem;
using namespace stylus;

namespace {

struct Options {
    std::string config;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> tables;
};

void write_config_copy(const RunConfig& config) {
    const auto text = describe(config);
    std::istringstream check(text);
    try {
        parse_config(check, config.output_dir);
    } catch (const Error& e) {
        throw Error(ErrorKind::SchemaViolation, "run_config.ini: " + e.detail());
    }
    std::ofstream out(config.output_dir / "run_config.ini", std::ios::binary);
    if (!(out << text)) throw Error(ErrorKind::Io, "cannot write " + (config.output_dir / "run_config.ini").string());
}

RunConfig prepare(const Options& opt) {
    RunConfig config = load_config(opt.config);
    if (opt.seed) {
        config.embedding.seed = *opt.seed;
        config.classifier.seed = *opt.seed;
    }
    if (!opt.out.empty()) config.output_dir = opt.out;
    in_stage("pipeline", [&] {
        fs::create_directories(config.output_dir);
        write_config_copy(config);
    });
    std::cerr << "stylus: embedding seed " << config.embedding.seed << ", classifier seed "
              << config.classifier.seed << ", jobs " << opt.jobs << ", output " << config.output_dir.string()
              << '\n';
    return config;
}

Eigen::VectorXd labels_of(const TrainTestSplit& s) {
    return Eigen::Map<const Eigen::VectorXd>(s.train_labels.data(), static_cast<Eigen::Index>(s.train_labels.size()));
}

std::vector<int> ids_with(const Corpus& corpus, Author author) {
    std::vector<int> out;
    for (const auto& d : corpus.documents())
        if (d.label == author) out.push_back(d.id);
    return out;
}

void cmd_ingest(const RunConfig& c) {
    const auto corpus = in_stage("ingest", [&] { return load_corpus(c); });
    in_stage("ingest", [&] {
        write_checked(c.output_dir / "corpus.json", render([&](std::ostream& out) { write_corpus_json(corpus, out); }),
                      JsonDocument::Corpus);
    });
}

void cmd_bow(const RunConfig& c) {
    const auto corpus = in_stage("ingest", [&] { return load_corpus(c); });
    in_stage("bow", [&] {
        const auto tdm = build_tdm(corpus, c.input_type);
        write_checked(c.output_dir / "tdm.csv", render([&](std::ostream& out) { write_tdm_csv(tdm, out); }),
                      tdm_schema());
    });
}

void cmd_embed(const RunConfig& c, unsigned jobs) {
    const auto corpus = in_stage("ingest", [&] { return load_corpus(c); });
    const auto tdm = in_stage("bow", [&] { return build_tdm(corpus, c.input_type); });
    in_stage("embed", [&] {
        const auto r = compute_embedding(tdm, c.embedding, jobs);
        write_checked(c.output_dir / "embedding.csv",
                      render([&](std::ostream& out) { write_embedding_csv(r.embedding, out); }), embedding_schema());
        if (r.lda) {
            write_checked(c.output_dir / "lda_model.json",
                          render([&](std::ostream& out) { write_lda_model_json(r.lda->model, out); }),
                          JsonDocument::LdaModel);
        }
    });
}

void cmd_screen(const RunConfig& c) {
    const auto corpus = in_stage("ingest", [&] { return load_corpus(c); });
    const auto tdm = in_stage("bow", [&] { return build_tdm(corpus, c.input_type); });
    in_stage("screen", [&] {
        const auto table = pvalue_table(tdm, ids_with(corpus, Author::Hamilton), ids_with(corpus, Author::Madison));
        const auto hc = hc_statistic(table, c.screening.gamma0);
        const auto bh = bh_select(table.p, c.screening.fdr);
        const auto bonf = bonferroni_select(table.p, c.screening.alpha);
        write_checked(c.output_dir / "screen_report.json", render([&](std::ostream& out) {
                          write_screen_report_json(table, hc, bh, bonf, c.screening, out);
                      }),
                      JsonDocument::ScreenReport);
        write_checked(c.output_dir / "wordcloud.csv", render([&](std::ostream& out) { write_wordcloud_csv(table, out); }),
                      wordcloud_schema());
    });
}

void cmd_classify(const RunConfig& c, unsigned jobs) {
    const auto corpus = in_stage("ingest", [&] { return load_corpus(c); });
    const auto tdm = in_stage("bow", [&] { return build_tdm(corpus, c.input_type); });
    const auto split = in_stage("bow", [&] { return split_train_test(tdm, default_label_table()); });
    const auto emb = in_stage("embed", [&] { return compute_embedding(tdm, c.embedding, jobs); });
    in_stage("classify", [&] {
        std::vector<int> scored = split.test_ids;
        scored.insert(scored.end(), split.joint_ids.begin(), split.joint_ids.end());
        const Eigen::MatrixXd x = emb.embedding.rows(split.train_ids);
        const auto preds = fit_and_predict(c.classifier, x, labels_of(split), emb.embedding.rows(scored), scored);
        if (c.classifier.method == "lasso") {
            std::vector<std::string> names = tdm.vocab;
            if (c.embedding.method != "bow") {
                names.clear();
                for (Eigen::Index k = 0; k < x.cols(); ++k) names.push_back("v" + std::to_string(k + 1));
            }
            const auto model = lasso_fit(x, labels_of(split), c.classifier.lasso, names);
            write_checked(c.output_dir / "model.json",
                          render([&](std::ostream& out) { write_lasso_model_json(model, out); }),
                          JsonDocument::LassoModel);
        }
        write_checked(c.output_dir / "predictions.csv", render([&](std::ostream& out) {
                          out.precision(17);
                          out << "doc_id,prob_madison,lo95,hi95\n";
                          for (const auto& p : preds)
                              out << p.doc_id << ',' << p.prob << ',' << p.lo95 << ',' << p.hi95 << '\n';
                      }),
                      predictions_schema());
    });
}

void cmd_mw(const RunConfig& c) {
    TableContext ctx(c, 1);
    const auto& corpus = ctx.corpus();
    const auto& tdm = ctx.tdm(InputType::Type3);
    in_stage("mw", [&] {
        const auto ham = ids_with(corpus, Author::Hamilton);
        const auto mad = ids_with(corpus, Author::Madison);
        auto counts = [&](const std::vector<int>& ids, Eigen::Index col) {
            AuthorCounts a;
            for (int id : ids) {
                a.counts.push_back(tdm.counts(tdm.row_of(id), col));
                a.lengths.push_back(static_cast<double>(corpus.by_id(id).tokens.size()));
            }
            return a;
        };
        std::vector<NbWordModel> models;
        for (Eigen::Index j = 0; j < tdm.cols(); ++j) {
            const auto h = counts(ham, j);
            const auto m = counts(mad, j);
            std::int64_t total = 0;
            for (auto v : h.counts) total += v;
            for (auto v : m.counts) total += v;
            if (total >= 10) models.push_back(fit_word_params(tdm.vocab[static_cast<std::size_t>(j)], h, m));
        }
        std::vector<OddsReport> reports;
        for (Author kind : {Author::Disputed, Author::Joint})
            for (int id : ids_with(corpus, kind)) {
                const auto r = tdm.row_of(id);
                std::vector<std::int64_t> row(static_cast<std::size_t>(tdm.cols()));
                for (Eigen::Index j = 0; j < tdm.cols(); ++j) row[static_cast<std::size_t>(j)] = tdm.counts(r, j);
                reports.push_back(document_log_odds(id, row, tdm.vocab,
                                                    static_cast<double>(corpus.by_id(id).tokens.size()), models));
            }
        write_checked(c.output_dir / "mw_models.csv", render([&](std::ostream& out) { write_mw_models_csv(models, out); }),
                      mw_models_schema());
        write_checked(c.output_dir / "odds_report.json",
                      render([&](std::ostream& out) { write_odds_report_json(reports, out); }), JsonDocument::OddsReport);
    });
}

void cmd_table(const RunConfig& c, unsigned jobs, std::vector<std::string> ids) {
    if (ids.empty() || (ids.size() == 1 && ids[0] == "all")) ids = table_ids();
    TableContext ctx(c, jobs);
    for (const auto& id : ids) {
        const auto table = in_stage("table", [&] { return run_table(id, ctx); });
        in_stage("table", [&] {
            write_checked(c.output_dir / ("table_" + id + ".csv"),
                          render([&](std::ostream& out) { write_table_csv(table, out); }), CsvSchema{table.header, {Cell::Any}});
        });
        std::cerr << "stylus: wrote table_" << id << ".csv\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stylometric authorship attribution for the Federalist Papers"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config, "INI run configuration")->required();
    app.add_option("--jobs", opt.jobs, "worker threads for folds and topic fits")->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "overrides the embedding and classifier seeds");
    app.add_option("--out", opt.out, "output directory (overrides [output] dir)");

    auto* ingest = app.add_subcommand("ingest", "parse the ebook into corpus.json");
    auto* bow = app.add_subcommand("bow", "write the term-document matrix tdm.csv");
    auto* embed = app.add_subcommand("embed", "write embedding.csv (and lda_model.json)");
    auto* screen = app.add_subcommand("screen", "binomial screening, HC, BH and Bonferroni");
    auto* classify = app.add_subcommand("classify", "fit on the 65 known papers and score the rest");
    auto* mw = app.add_subcommand("mw", "negative-binomial word models and log-odds");
    auto* eval = app.add_subcommand("eval", "leave-one-out evaluation and thresholds");
    auto* table = app.add_subcommand("table", "reproduce a results table as CSV");
    table->add_option("--id", opt.tables, "l2_all | l2_bow | thresholds | joint | mw | hc | all");
    auto* pipeline = app.add_subcommand("pipeline", "ingest, bow, embed, classify and eval in one run");
    for (auto* sub : {ingest, bow, embed, screen, classify, mw, eval, table, pipeline}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig config = prepare(opt);
        if (ingest->parsed()) cmd_ingest(config);
        else if (bow->parsed()) cmd_bow(config);
        else if (embed->parsed()) cmd_embed(config, opt.jobs);
        else if (screen->parsed()) cmd_screen(config);
        else if (classify->parsed()) cmd_classify(config, opt.jobs);
        else if (mw->parsed()) cmd_mw(config);
        else if (eval->parsed()) in_stage("pipeline", [&] { return run_pipeline(config, opt.jobs, false); });
        else if (table->parsed()) cmd_table(config, opt.jobs, opt.tables);
        else if (pipeline->parsed()) in_stage("pipeline", [&] { return run_pipeline(config, opt.jobs, true); });
    } catch (const StageError& e) {
        std::cerr << e.to_json() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << StageError("cli", e.kind(), e.detail()).to_json() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << StageError("cli", ErrorKind::Io, e.what()).to_json() << '\n';
        return 1;
    }
    return 0;
}
