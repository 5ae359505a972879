#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "stylus/corpus.hpp"

namespace stylus {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Type1: lemmas minus stopwords. Type2: all lemmas. Type3: marker words only.
enum class InputType { Type1, Type2, Type3 };

std::string_view to_string(InputType t) noexcept;
InputType input_type_from_string(std::string_view name);

/// Documents x vocabulary counts. Columns are sorted lexicographically and no
/// column is all zero.
struct TermDocMatrix {
    CountMatrix counts;
    std::vector<int> doc_ids;
    std::vector<std::string> vocab;
    InputType input_type = InputType::Type2;

    Eigen::Index rows() const noexcept { return counts.rows(); }
    Eigen::Index cols() const noexcept { return counts.cols(); }
    Eigen::MatrixXd as_double() const { return counts.cast<double>(); }
    /// Row index of a paper number, or -1.
    Eigen::Index row_of(int doc_id) const noexcept;
    /// Column index of a word, or -1.
    Eigen::Index col_of(std::string_view word) const noexcept;
};

TermDocMatrix build_tdm(const Corpus& corpus, InputType input_type);

struct RowNormalizedMatrix {
    Eigen::MatrixXd values;
    std::vector<bool> zero_row;
    const TermDocMatrix* parent = nullptr;
};

RowNormalizedMatrix row_normalize(const TermDocMatrix& tdm);

/// Row subset of a count matrix (keeps all columns).
TermDocMatrix select_rows(const TermDocMatrix& tdm, const std::vector<int>& doc_ids);

struct TrainTestSplit {
    std::vector<int> train_ids;  // Hamilton and Madison papers
    std::vector<int> test_ids;   // disputed
    std::vector<int> joint_ids;
    std::vector<double> train_labels;  // 1 = Madison

    std::vector<Eigen::Index> rows(const TermDocMatrix& tdm,
                                   const std::vector<int>& ids) const;
};

/// Jay's papers are dropped. A label that is missing or disagrees with the
/// bundled authorship table raises LabelMismatch.
TrainTestSplit split_train_test(const TermDocMatrix& tdm, const LabelTable& labels);

/// tdm.csv: header "doc_id,<vocab...>", one integer row per document.
void write_tdm_csv(const TermDocMatrix& tdm, std::ostream& out);
TermDocMatrix read_tdm_csv(std::istream& in, InputType input_type);

}  // namespace stylus
