#pragma once

#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylus/config.hpp"
#include "stylus/corpus.hpp"
#include "stylus/embedding.hpp"
#include "stylus/error.hpp"
#include "stylus/eval.hpp"
#include "stylus/lda.hpp"

namespace stylus {

/// An Error tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, ErrorKind kind, const std::string& detail)
        : Error(kind, detail), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }
    /// {"error": {"stage", "kind", "message"}}
    std::string to_json() const;

private:
    std::string stage_;
};

/// Runs f, re-raising failures as StageError(stage, ...). A StageError from a
/// nested stage passes through unchanged.
template <class F>
decltype(auto) in_stage(std::string_view stage, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(std::string(stage), e.kind(), e.detail());
    } catch (const std::exception& e) {
        throw StageError(std::string(stage), ErrorKind::Io, e.what());
    }
}

Corpus load_corpus(const RunConfig& config);

struct EmbeddingResult {
    DocEmbedding embedding;
    std::optional<LdaSelection> lda;
};

/// Fits the configured embedding on every document of the matrix.
EmbeddingResult compute_embedding(const TermDocMatrix& tdm, const EmbeddingConfig& config,
                                  unsigned jobs);

FoldPredictor make_predictor(const ClassifierConfig& config);

struct Prediction {
    int doc_id = 0;
    double prob = 0;
    double lo95 = 0;
    double hi95 = 0;
};

/// Fits on the training rows once and scores the given rows.
std::vector<Prediction> fit_and_predict(const ClassifierConfig& config,
                                        const Eigen::MatrixXd& x_train,
                                        const Eigen::VectorXd& y_train,
                                        const Eigen::MatrixXd& x_test,
                                        const std::vector<int>& test_ids);

struct PipelineResult {
    int selected_topics = 0;
    LoocvResult loocv;
    ThresholdReport thresholds;
    std::vector<Prediction> predictions;  // disputed then joint papers
    DensityCurve density;
};

/// ingest -> bow -> embed -> classify -> eval. Writes eval_report.json,
/// predictions.csv and density.csv to the output directory. Without
/// score_test only the cross-validation half runs and predictions.csv is
/// not written.
PipelineResult run_pipeline(const RunConfig& config, unsigned jobs = 1, bool score_test = true);

}  // namespace stylus
