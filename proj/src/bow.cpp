#include "stylus/bow.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "stylus/error.hpp"
#include "stylus/wordlists.hpp"

namespace stylus {

std::string_view to_string(InputType t) noexcept {
    switch (t) {
        case InputType::Type1: return "type1";
        case InputType::Type2: return "type2";
        case InputType::Type3: return "type3";
    }
    return "?";
}

InputType input_type_from_string(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "type1" || s == "1") return InputType::Type1;
    if (s == "type2" || s == "2") return InputType::Type2;
    if (s == "type3" || s == "3") return InputType::Type3;
    throw Error(ErrorKind::InvalidConfig, "unknown input type '" + std::string(name) + "'");
}

Eigen::Index TermDocMatrix::row_of(int doc_id) const noexcept {
    const auto it = std::find(doc_ids.begin(), doc_ids.end(), doc_id);
    return it == doc_ids.end() ? -1 : static_cast<Eigen::Index>(it - doc_ids.begin());
}

Eigen::Index TermDocMatrix::col_of(std::string_view word) const noexcept {
    const auto it = std::lower_bound(vocab.begin(), vocab.end(), word);
    return (it == vocab.end() || *it != word) ? -1 : static_cast<Eigen::Index>(it - vocab.begin());
}

TermDocMatrix build_tdm(const Corpus& corpus, InputType input_type) {
    const bool lemmas = corpus.provenance().options.lemmatize;
    auto word_set = [&](WordListKind kind) {
        auto list = load_word_list(kind);
        return lemmas ? lemmatized(list).words : list.words;
    };
    std::set<std::string> filter;
    if (input_type == InputType::Type1) filter = word_set(WordListKind::Stopwords);
    if (input_type == InputType::Type3) filter = word_set(WordListKind::MarkerWords145);

    auto keep = [&](const std::string& token) {
        switch (input_type) {
            case InputType::Type1: return filter.count(token) == 0;
            case InputType::Type2: return true;
            case InputType::Type3: return filter.count(token) != 0;
        }
        return false;
    };

    std::set<std::string> vocab_set;
    for (const auto& doc : corpus.documents())
        for (const auto& t : doc.tokens)
            if (keep(t)) vocab_set.insert(t);
    if (vocab_set.empty())
        throw Error(ErrorKind::EmptyVocabulary,
                    "no word survives " + std::string(to_string(input_type)) + " filtering");

    TermDocMatrix tdm;
    tdm.input_type = input_type;
    tdm.vocab.assign(vocab_set.begin(), vocab_set.end());
    std::unordered_map<std::string_view, Eigen::Index> column;
    column.reserve(tdm.vocab.size());
    for (std::size_t j = 0; j < tdm.vocab.size(); ++j)
        column.emplace(tdm.vocab[j], static_cast<Eigen::Index>(j));

    const auto n = static_cast<Eigen::Index>(corpus.size());
    tdm.counts = CountMatrix::Zero(n, static_cast<Eigen::Index>(tdm.vocab.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& doc = corpus.documents()[static_cast<std::size_t>(i)];
        tdm.doc_ids.push_back(doc.id);
        for (const auto& t : doc.tokens)
            if (const auto it = column.find(t); it != column.end()) ++tdm.counts(i, it->second);
    }
    return tdm;
}

RowNormalizedMatrix row_normalize(const TermDocMatrix& tdm) {
    RowNormalizedMatrix out;
    out.parent = &tdm;
    out.values = Eigen::MatrixXd::Zero(tdm.rows(), tdm.cols());
    out.zero_row.assign(static_cast<std::size_t>(tdm.rows()), false);
    for (Eigen::Index i = 0; i < tdm.rows(); ++i) {
        const auto total = tdm.counts.row(i).sum();
        if (total == 0) {
            out.zero_row[static_cast<std::size_t>(i)] = true;
            continue;
        }
        out.values.row(i) = tdm.counts.row(i).cast<double>() / static_cast<double>(total);
    }
    return out;
}

TermDocMatrix select_rows(const TermDocMatrix& tdm, const std::vector<int>& doc_ids) {
    TermDocMatrix out;
    out.vocab = tdm.vocab;
    out.input_type = tdm.input_type;
    out.doc_ids = doc_ids;
    out.counts.resize(static_cast<Eigen::Index>(doc_ids.size()), tdm.cols());
    for (std::size_t r = 0; r < doc_ids.size(); ++r) {
        const auto i = tdm.row_of(doc_ids[r]);
        if (i < 0) throw Error(ErrorKind::MissingDoc, "paper " + std::to_string(doc_ids[r]));
        out.counts.row(static_cast<Eigen::Index>(r)) = tdm.counts.row(i);
    }
    return out;
}

std::vector<Eigen::Index> TrainTestSplit::rows(const TermDocMatrix& tdm,
                                               const std::vector<int>& ids) const {
    std::vector<Eigen::Index> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(tdm.row_of(id));
    return out;
}

TrainTestSplit split_train_test(const TermDocMatrix& tdm, const LabelTable& labels) {
    const auto canonical = default_label_table();
    TrainTestSplit split;
    for (int id : tdm.doc_ids) {
        const auto it = labels.find(id);
        if (it == labels.end())
            throw Error(ErrorKind::LabelMismatch, "missing label for paper " + std::to_string(id));
        const auto ref = canonical.find(id);
        if (ref == canonical.end() || ref->second != it->second)
            throw Error(ErrorKind::LabelMismatch,
                        "label for paper " + std::to_string(id) + " disagrees with the authorship table");
        switch (it->second) {
            case Author::Hamilton:
            case Author::Madison:
                split.train_ids.push_back(id);
                split.train_labels.push_back(it->second == Author::Madison ? 1.0 : 0.0);
                break;
            case Author::Disputed: split.test_ids.push_back(id); break;
            case Author::Joint: split.joint_ids.push_back(id); break;
            case Author::Jay: break;
        }
    }
    return split;
}

void write_tdm_csv(const TermDocMatrix& tdm, std::ostream& out) {
    out << "doc_id";
    for (const auto& w : tdm.vocab) out << ',' << w;
    out << '\n';
    for (Eigen::Index i = 0; i < tdm.rows(); ++i) {
        out << tdm.doc_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < tdm.cols(); ++j) out << ',' << tdm.counts(i, j);
        out << '\n';
    }
}

TermDocMatrix read_tdm_csv(std::istream& in, InputType input_type) {
    auto split_csv = [](const std::string& line) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        return fields;
    };
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::MalformedRow, "empty tdm.csv");
    auto header = split_csv(line);
    if (header.empty() || header[0] != "doc_id")
        throw Error(ErrorKind::MalformedRow, "tdm.csv header must start with doc_id");
    TermDocMatrix tdm;
    tdm.input_type = input_type;
    tdm.vocab.assign(header.begin() + 1, header.end());
    std::vector<std::vector<std::int64_t>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw Error(ErrorKind::MalformedRow, "tdm.csv line " + std::to_string(line_no));
        try {
            tdm.doc_ids.push_back(std::stoi(fields[0]));
            std::vector<std::int64_t> row;
            for (std::size_t j = 1; j < fields.size(); ++j) row.push_back(std::stoll(fields[j]));
            rows.push_back(std::move(row));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::MalformedRow, "tdm.csv line " + std::to_string(line_no));
        }
    }
    tdm.counts.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(tdm.vocab.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            tdm.counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return tdm;
}

}  // namespace stylus
