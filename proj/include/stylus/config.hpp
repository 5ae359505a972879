#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stylus/bart.hpp"
#include "stylus/bow.hpp"
#include "stylus/lasso.hpp"
#include "stylus/screen.hpp"

namespace stylus {

struct EmbeddingConfig {
    /// bow | lda | lsa | nmf | aggregate | external
    std::string method = "lda";
    std::vector<int> topics{5, 10, 15, 20, 25};
    double lda_alpha = -1;  // <= 0 means 50 / K
    double lda_beta = 0.1;
    int lda_iters = 2000;
    int rank = 10;
    int nmf_iters = 500;
    std::uint64_t seed = 1;
    std::filesystem::path file;          // external embedding.csv
    std::filesystem::path word_vectors;  // aggregate
};

struct ClassifierConfig {
    /// lasso | bart
    std::string method = "bart";
    LassoParams lasso;
    BartParams bart;
    std::uint64_t seed = 1;
};

struct RunConfig {
    std::filesystem::path corpus;
    bool lemmatize = true;
    std::filesystem::path labels;  // empty: bundled table
    InputType input_type = InputType::Type3;
    EmbeddingConfig embedding;
    ClassifierConfig classifier;
    ScreenParams screening;
    double fixed_threshold = 0.3;
    std::filesystem::path output_dir = "out";
};

/// INI file with [corpus], [bow], [embedding], [classifier], [screening],
/// [thresholds] and [output] sections. Relative paths resolve against the
/// file's directory. Unknown sections or keys and missing referenced files
/// raise InvalidConfig through a StageError naming the owning stage.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);

/// Canonical text form, used for logging and report headers.
std::string describe(const RunConfig& config);

}  // namespace stylus
