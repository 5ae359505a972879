#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stylus/bow.hpp"
#include "stylus/corpus.hpp"
#include "stylus/error.hpp"

namespace stylus::testing {

inline Corpus make_corpus(const std::vector<std::pair<int, std::vector<std::string>>>& docs,
                          const LabelTable& labels = default_label_table()) {
    std::vector<Document> out;
    for (const auto& [id, tokens] : docs) {
        Document d;
        d.id = id;
        d.tokens = tokens;
        auto it = labels.find(id);
        if (it != labels.end()) d.label = it->second;
        out.push_back(std::move(d));
    }
    return Corpus(std::move(out), Provenance{"<test>", {}});
}

/// Count matrix with ids 1..n and words w00, w01, ...
inline TermDocMatrix make_tdm(const CountMatrix& counts) {
    TermDocMatrix tdm;
    tdm.counts = counts;
    for (Eigen::Index i = 0; i < counts.rows(); ++i) tdm.doc_ids.push_back(static_cast<int>(i) + 1);
    for (Eigen::Index j = 0; j < counts.cols(); ++j) {
        std::string w = "w";
        if (j < 10) w += '0';
        tdm.vocab.push_back(w + std::to_string(j));
    }
    return tdm;
}

/// n documents over 2 * block words; the first half of the documents only
/// uses the first block.
inline TermDocMatrix two_block_tdm(int docs, int block, int tokens_per_doc, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, block - 1);
    CountMatrix c = CountMatrix::Zero(docs, 2 * block);
    for (int i = 0; i < docs; ++i) {
        const int offset = i < docs / 2 ? 0 : block;
        for (int t = 0; t < tokens_per_doc; ++t) ++c(i, offset + pick(rng));
    }
    return make_tdm(c);
}

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "stylus_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

template <class F>
ErrorKind error_kind(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    throw std::logic_error("no error raised");
}

}  // namespace stylus::testing
