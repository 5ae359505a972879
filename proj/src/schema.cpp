#include "stylus/schema.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stylus/error.hpp"

namespace stylus {
namespace {

using nlohmann::json;

[[noreturn]] void violation(std::string_view name, const std::string& what) {
    throw Error(ErrorKind::SchemaViolation, std::string(name) + ": " + what);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

bool cell_ok(std::string_view v, Cell rule) {
    if (rule == Cell::Any) return true;
    if (rule == Cell::Text) return !v.empty();
    if (rule == Cell::Integer || rule == Cell::Count) {
        long long x = 0;
        const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        return ec == std::errc() && end == v.data() + v.size() && (rule == Cell::Integer || x >= 0);
    }
    const std::string buf(v);
    char* end = nullptr;
    const double x = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size()) return false;
    if (!std::isfinite(x)) return false;
    if (rule == Cell::NonNegative) return x >= 0;
    if (rule == Cell::Probability) return x >= 0 && x <= 1;
    return true;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

struct JsonCheck {
    std::string_view name;

    const json& member(const json& j, const char* key) const {
        if (!j.is_object() || !j.contains(key)) violation(name, std::string("missing member '") + key + "'");
        return j.at(key);
    }
    double number(const json& j, const char* key, double lo = -INFINITY, double hi = INFINITY) const {
        const auto& v = member(j, key);
        if (!v.is_number()) violation(name, std::string("'") + key + "' is not a number");
        const double x = v.get<double>();
        if (!(x >= lo && x <= hi)) violation(name, std::string("'") + key + "' out of range");
        return x;
    }
    const json& array(const json& j, const char* key) const {
        const auto& v = member(j, key);
        if (!v.is_array()) violation(name, std::string("'") + key + "' is not an array");
        return v;
    }
    void string(const json& j, const char* key) const {
        if (!member(j, key).is_string()) violation(name, std::string("'") + key + "' is not a string");
    }
    void integer(const json& j, const char* key) const {
        if (!member(j, key).is_number_integer()) violation(name, std::string("'") + key + "' is not an integer");
    }
};

void check_matrix(const JsonCheck& c, const json& j, const char* key) {
    std::size_t width = 0;
    for (const auto& row : c.array(j, key)) {
        if (!row.is_array() || (width && row.size() != width)) violation(c.name, std::string("'") + key + "' is ragged");
        width = row.size();
        for (const auto& v : row)
            if (!v.is_number() || !std::isfinite(v.get<double>()))
                violation(c.name, std::string("'") + key + "' has a non-numeric entry");
    }
}

}  // namespace

void validate_csv(std::string_view text, const CsvSchema& schema, std::string_view name) {
    std::size_t line_no = 0, width = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) violation(name, "missing final newline");
        const auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        const auto cells = split(line);
        if (line_no == 1) {
            width = cells.size();
            if (!schema.header.empty() && (cells.size() != schema.header.size() ||
                                           !std::equal(cells.begin(), cells.end(), schema.header.begin())))
                violation(name, "unexpected header '" + std::string(line) + "'");
            if (width < schema.cells.size()) violation(name, "header has too few columns");
            continue;
        }
        if (cells.size() != width)
            violation(name, "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                " fields, expected " + std::to_string(width));
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const Cell rule = schema.cells.empty() ? Cell::Text : schema.cells[std::min(k, schema.cells.size() - 1)];
            if (!cell_ok(cells[k], rule))
                violation(name, "line " + std::to_string(line_no) + " column " + std::to_string(k + 1) + ": bad value '" +
                                    std::string(cells[k]) + "'");
        }
    }
    if (line_no == 0) violation(name, "empty file");
}

void validate_json(std::string_view text, JsonDocument kind, std::string_view name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        violation(name, std::string("not valid JSON: ") + e.what());
    }
    const JsonCheck c{name};
    switch (kind) {
        case JsonDocument::Corpus:
            if (!j.is_array()) violation(name, "expected an array of papers");
            for (const auto& d : j) {
                c.integer(d, "id");
                c.string(d, "title");
                c.string(d, "label");
                c.array(d, "tokens");
            }
            return;
        case JsonDocument::LdaModel:
            c.number(j, "K", 1);
            c.number(j, "alpha", 0);
            c.number(j, "beta", 0);
            check_matrix(c, j, "doc_topic");
            check_matrix(c, j, "topic_word");
            return;
        case JsonDocument::ScreenReport: {
            c.array(j, "words");
            const auto& hc = c.member(j, "hc");
            if (!c.member(hc, "admissible").is_boolean()) violation(name, "'admissible' is not a boolean");
            c.array(hc, "selected");
            c.array(j, "bh");
            c.array(j, "bonferroni");
            return;
        }
        case JsonDocument::LassoModel:
            c.number(j, "intercept");
            c.number(j, "lambda", 0);
            if (!c.member(j, "coefficients").is_object()) violation(name, "'coefficients' is not an object");
            c.array(j, "path");
            return;
        case JsonDocument::OddsReport:
            for (const auto& d : c.array(j, "documents")) {
                c.integer(d, "doc_id");
                c.number(d, "total");
                c.string(d, "favors");
                c.array(d, "top_words");
            }
            return;
        case JsonDocument::EvalReport: {
            c.member(j, "config");
            c.number(j, "l2_loss", 0, 1);
            const auto& t = c.member(j, "thresholds");
            for (const char* k : {"roc", "f1", "fixed"}) c.number(t, k, 0, 1);
            c.number(t, "class_ratio", 0);
            const auto& e = c.member(j, "errors");
            for (const char* k : {"roc", "f1", "fixed"}) c.number(e, k, 0, 1);
            c.member(j, "confusion");
            for (const auto& f : c.array(j, "loocv")) {
                c.integer(f, "doc_id");
                c.number(f, "label", 0, 1);
                c.number(f, "prob", 0, 1);
            }
            for (const auto& p : c.array(j, "predictions")) {
                c.integer(p, "doc_id");
                c.string(p, "type");
                const double lo = c.number(p, "lo95", 0, 1);
                const double mid = c.number(p, "prob_madison", 0, 1);
                const double hi = c.number(p, "hi95", 0, 1);
                if (!(lo <= mid && mid <= hi)) violation(name, "prediction interval does not contain the estimate");
                c.string(p, "author_roc");
            }
            return;
        }
    }
}

const CsvSchema& predictions_schema() {
    static const CsvSchema s{{"doc_id", "prob_madison", "lo95", "hi95"},
                             {Cell::Integer, Cell::Probability, Cell::Probability, Cell::Probability}};
    return s;
}

const CsvSchema& density_schema() {
    static const CsvSchema s{{"series", "x", "density"}, {Cell::Text, Cell::Real, Cell::NonNegative}};
    return s;
}

const CsvSchema& wordcloud_schema() {
    static const CsvSchema s{{"word", "weight"}, {Cell::Text, Cell::NonNegative}};
    return s;
}

const CsvSchema& mw_models_schema() {
    static const CsvSchema s{{"word", "mu_H", "mu_M", "delta_H", "delta_M"}, {Cell::Text, Cell::NonNegative}};
    return s;
}

const CsvSchema& tdm_schema() {
    static const CsvSchema s{{}, {Cell::Integer, Cell::Count}};
    return s;
}

const CsvSchema& embedding_schema() {
    static const CsvSchema s{{}, {Cell::Integer, Cell::Real}};
    return s;
}

void write_checked(const std::filesystem::path& path, const std::string& text, const CsvSchema& schema) {
    validate_csv(text, schema, path.filename().string());
    write_text(path, text);
}

void write_checked(const std::filesystem::path& path, const std::string& text, JsonDocument kind) {
    validate_json(text, kind, path.filename().string());
    write_text(path, text);
}

}  // namespace stylus
