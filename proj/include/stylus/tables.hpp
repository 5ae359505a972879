#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "stylus/config.hpp"
#include "stylus/corpus.hpp"
#include "stylus/embedding.hpp"
#include "stylus/eval.hpp"
#include "stylus/pipeline.hpp"

namespace stylus {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Shared state across table builds so embeddings and LOOCV runs are
/// computed once.
class TableContext {
public:
    TableContext(RunConfig config, unsigned jobs);

    const RunConfig& config() const noexcept { return config_; }
    const Corpus& corpus();
    const TermDocMatrix& tdm(InputType type);
    const TrainTestSplit& split();
    /// method: bow | lda | lsa | nmf
    const DocEmbedding& embedding(const std::string& method, InputType type);
    /// classifier: lasso | bart
    const LoocvResult& loocv(const std::string& method, InputType type, const std::string& classifier);
    double joint_probability(const std::string& method, InputType type, int doc_id);

private:
    RunConfig config_;
    unsigned jobs_;
    std::optional<Corpus> corpus_;
    std::map<InputType, TermDocMatrix> tdms_;
    std::optional<TrainTestSplit> split_;
    std::map<std::pair<std::string, InputType>, DocEmbedding> embeddings_;
    std::map<std::tuple<std::string, InputType, std::string>, LoocvResult> loocv_;
    std::map<std::pair<std::string, InputType>, std::vector<Prediction>> joint_;
};

const std::vector<std::string>& table_ids();

/// l2_all | l2_bow | thresholds | joint | mw | hc; anything else raises UnknownTable.
Table run_table(std::string_view id, TableContext& context);

void write_table_csv(const Table& table, std::ostream& out);

}  // namespace stylus
