#include "stylus/embedding.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "stylus/error.hpp"

namespace stylus {

Eigen::Index DocEmbedding::row_of(int doc_id) const noexcept {
    for (std::size_t i = 0; i < doc_ids.size(); ++i)
        if (doc_ids[i] == doc_id) return static_cast<Eigen::Index>(i);
    return -1;
}

Eigen::MatrixXd DocEmbedding::rows(const std::vector<int>& ids) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), values.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto i = row_of(ids[r]);
        if (i < 0) throw Error(ErrorKind::MissingDoc, "paper " + std::to_string(ids[r]));
        out.row(static_cast<Eigen::Index>(r)) = values.row(i);
    }
    return out;
}

WordVectors read_word_vectors(std::istream& in) {
    WordVectors wv;
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string word;
        if (!(ss >> word)) continue;
        std::vector<double> v;
        std::string field;
        while (ss >> field) {
            double x = 0;
            try {
                std::size_t used = 0;
                x = std::stod(field, &used);
                if (used != field.size()) throw std::invalid_argument(field);
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::MalformedRow, "word vectors line " + std::to_string(line_no));
            }
            if (!std::isfinite(x))
                throw Error(ErrorKind::NonFiniteValue, "word vectors line " + std::to_string(line_no));
            v.push_back(x);
        }
        if (v.empty() || (!rows.empty() && v.size() != rows.front().size()))
            throw Error(ErrorKind::MalformedRow, "word vectors line " + std::to_string(line_no));
        wv.words.push_back(word);
        rows.push_back(std::move(v));
    }
    const auto d = rows.empty() ? 0 : rows.front().size();
    wv.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < d; ++j)
            wv.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return wv;
}

AlignedWordVectors align_word_vectors(const WordVectors& wv, const std::vector<std::string>& vocab) {
    std::unordered_map<std::string_view, Eigen::Index> index;
    for (std::size_t i = 0; i < wv.words.size(); ++i)
        index.emplace(wv.words[i], static_cast<Eigen::Index>(i));
    AlignedWordVectors out;
    out.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vocab.size()), wv.vectors.cols());
    std::size_t found = 0;
    for (std::size_t j = 0; j < vocab.size(); ++j) {
        const auto it = index.find(vocab[j]);
        if (it == index.end()) {
            out.missing.push_back(vocab[j]);
            continue;
        }
        out.vectors.row(static_cast<Eigen::Index>(j)) = wv.vectors.row(it->second);
        ++found;
    }
    out.coverage = vocab.empty() ? 0.0 : static_cast<double>(found) / static_cast<double>(vocab.size());
    return out;
}

DocEmbedding aggregate_word_vectors(const RowNormalizedMatrix& x_norm,
                                    const Eigen::MatrixXd& word_vectors) {
    if (word_vectors.rows() != x_norm.values.cols())
        throw Error(ErrorKind::DimensionMismatch,
                    "word vectors have " + std::to_string(word_vectors.rows()) +
                        " rows for a vocabulary of " + std::to_string(x_norm.values.cols()));
    DocEmbedding emb;
    emb.method = "aggregate";
    emb.values = x_norm.values * word_vectors;
    if (x_norm.parent != nullptr) emb.doc_ids = x_norm.parent->doc_ids;
    return emb;
}

DocEmbedding load_embedding(std::istream& in, const std::vector<int>& expected_docs,
                            std::string method) {
    std::map<int, std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        const auto where = "embedding line " + std::to_string(line_no);
        if (fields.size() < 2) throw Error(ErrorKind::MalformedRow, where);
        int id = 0;
        try {
            std::size_t used = 0;
            id = std::stoi(fields[0], &used);
            if (used != fields[0].size()) throw std::invalid_argument(fields[0]);
        } catch (const std::logic_error&) {
            if (rows.empty() && line_no == 1) continue;  // header row
            throw Error(ErrorKind::MalformedRow, where);
        }
        std::vector<double> values;
        for (std::size_t k = 1; k < fields.size(); ++k) {
            double x = 0;
            try {
                std::size_t used = 0;
                x = std::stod(fields[k], &used);
                if (used != fields[k].size()) throw std::invalid_argument(fields[k]);
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::MalformedRow, where);
            }
            if (!std::isfinite(x)) throw Error(ErrorKind::NonFiniteValue, where);
            values.push_back(x);
        }
        if (width == 0) width = values.size();
        if (values.size() != width) throw Error(ErrorKind::MalformedRow, where + ": ragged row");
        if (!rows.emplace(id, std::move(values)).second)
            throw Error(ErrorKind::MalformedRow, where + ": duplicate paper " + std::to_string(id));
    }
    const std::set<int> expected(expected_docs.begin(), expected_docs.end());
    for (int id : expected_docs)
        if (!rows.count(id)) throw Error(ErrorKind::MissingDoc, "paper " + std::to_string(id));
    for (const auto& [id, _] : rows)
        if (!expected.count(id))
            throw Error(ErrorKind::MalformedRow, "unexpected paper " + std::to_string(id));

    DocEmbedding emb;
    emb.method = std::move(method);
    emb.doc_ids = expected_docs;
    emb.values.resize(static_cast<Eigen::Index>(expected_docs.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < expected_docs.size(); ++r) {
        const auto& v = rows.at(expected_docs[r]);
        for (std::size_t k = 0; k < width; ++k)
            emb.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = v[k];
    }
    return emb;
}

void write_embedding_csv(const DocEmbedding& emb, std::ostream& out) {
    out << "doc_id";
    for (Eigen::Index k = 0; k < emb.values.cols(); ++k) out << ",v" << (k + 1);
    out << '\n';
    const auto old_precision = out.precision(17);
    for (Eigen::Index i = 0; i < emb.values.rows(); ++i) {
        out << emb.doc_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < emb.values.cols(); ++k) out << ',' << emb.values(i, k);
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace stylus
