#include "stylus/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "stylus/error.hpp"
#include "stylus/wordlists.hpp"

namespace stylus {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    for (auto& l : lines)
        if (!l.empty() && l.back() == '\r') l.pop_back();
    return lines;
}

const std::regex& header_re() {
    static const std::regex re(R"(^\s*FEDERALIST\.?\s+No\.?\s*(\d+)\.?\s*$)", std::regex::icase);
    return re;
}

const std::regex& author_line_re() {
    static const std::regex re(
        R"(^(HAMILTON|MADISON|JAY)(\s+(AND|OR|WITH)\s+(HAMILTON|MADISON|JAY))*\s*\.?$)",
        std::regex::icase);
    return re;
}

bool is_signature(const std::string& line) {
    const auto t = trim(line);
    return t == "PUBLIUS" || t == "PUBLIUS.";
}

bool is_end_marker(const std::string& line) {
    const auto t = trim(line);
    return t.rfind("*** END OF", 0) == 0 || t.rfind("***END OF", 0) == 0 ||
           t.rfind("End of the Project Gutenberg", 0) == 0 ||
           t.rfind("End of Project Gutenberg", 0) == 0;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    return true;
}

struct Section {
    int number = 0;
    std::vector<std::string> lines;
};

// A header followed by fewer tokens than this is a table-of-contents entry.
constexpr std::size_t kMinPaperTokens = 100;

Document make_document(const Section& section, const ParseOptions& options) {
    Document doc;
    doc.id = section.number;
    const auto& lines = section.lines;
    std::size_t i = 0;
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    if (i < lines.size()) doc.title = trim(lines[i++]);

    std::size_t body_start = i;
    bool found_salutation = false;
    for (std::size_t j = i; j < lines.size() && j < i + 40; ++j) {
        if (starts_with_icase(trim(lines[j]), "To the People of the State of New York")) {
            body_start = j + 1;
            found_salutation = true;
            break;
        }
    }
    if (!found_salutation) {
        // No salutation: drop the publication and author lines of the preamble.
        for (std::size_t j = i; j < lines.size() && j < i + 12; ++j) {
            const auto t = trim(lines[j]);
            if (std::regex_match(t, author_line_re())) {
                body_start = j + 1;
                break;
            }
        }
    }

    std::string body;
    for (std::size_t j = body_start; j < lines.size(); ++j) {
        if (is_signature(lines[j])) continue;
        body += lines[j];
        body += '\n';
    }
    doc.raw_text = trim(body);
    doc.tokens = tokenize(doc.raw_text);
    if (options.lemmatize) doc.tokens = lemmatize(doc.tokens);
    return doc;
}

}  // namespace

std::string_view to_string(Author author) noexcept {
    switch (author) {
        case Author::Hamilton: return "Hamilton";
        case Author::Madison: return "Madison";
        case Author::Jay: return "Jay";
        case Author::Disputed: return "Disputed";
        case Author::Joint: return "Joint";
    }
    return "?";
}

Author author_from_string(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "hamilton") return Author::Hamilton;
    if (s == "madison") return Author::Madison;
    if (s == "jay") return Author::Jay;
    if (s == "disputed") return Author::Disputed;
    if (s == "joint") return Author::Joint;
    throw Error(ErrorKind::ParseFailure, "unknown author label '" + std::string(name) + "'");
}

LabelTable read_label_table(std::istream& in) {
    LabelTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorKind::ParseFailure, "labels line " + std::to_string(line_no));
        const auto id_text = trim(line.substr(0, comma));
        if (line_no == 1 && !id_text.empty() && !std::isdigit(static_cast<unsigned char>(id_text[0])))
            continue;  // header
        int id = 0;
        try {
            id = std::stoi(id_text);
        } catch (const std::exception&) {
            throw Error(ErrorKind::ParseFailure, "labels line " + std::to_string(line_no));
        }
        table[id] = author_from_string(trim(line.substr(comma + 1)));
    }
    return table;
}

LabelTable default_label_table() {
    std::istringstream in(data_file("labels.csv"));
    return read_label_table(in);
}

Corpus::Corpus(std::vector<Document> documents, Provenance provenance)
    : documents_(std::move(documents)), provenance_(std::move(provenance)) {
    std::sort(documents_.begin(), documents_.end(),
              [](const Document& a, const Document& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        const auto& d = documents_[i];
        if (d.id < 1 || d.id > kPaperCount)
            throw Error(ErrorKind::ParseFailure, "paper id out of range: " + std::to_string(d.id));
        if (i > 0 && documents_[i - 1].id == d.id)
            throw Error(ErrorKind::DuplicatePaper, "paper " + std::to_string(d.id));
        if (d.tokens.empty())
            throw Error(ErrorKind::ParseFailure, "paper " + std::to_string(d.id) + " has no tokens");
    }
}

const Document& Corpus::by_id(int id) const {
    auto it = std::lower_bound(documents_.begin(), documents_.end(), id,
                               [](const Document& d, int v) { return d.id < v; });
    if (it == documents_.end() || it->id != id)
        throw Error(ErrorKind::MissingPaper, "paper " + std::to_string(id));
    return *it;
}

bool Corpus::contains(int id) const noexcept {
    auto it = std::lower_bound(documents_.begin(), documents_.end(), id,
                               [](const Document& d, int v) { return d.id < v; });
    return it != documents_.end() && it->id == id;
}

Corpus parse_corpus_text(std::string_view text, const LabelTable& labels, ParseOptions options,
                         std::string source) {
    const auto lines = split_lines(text);
    std::vector<Section> sections;
    for (const auto& line : lines) {
        if (is_end_marker(line)) break;
        std::smatch match;
        if (std::regex_match(line, match, header_re())) {
            sections.push_back(Section{std::stoi(match[1].str()), {}});
            continue;
        }
        if (!sections.empty()) sections.back().lines.push_back(line);
    }

    std::vector<Document> docs;
    std::set<int> seen;
    for (const auto& section : sections) {
        Document doc = make_document(section, options);
        if (doc.tokens.size() < kMinPaperTokens) continue;
        if (seen.count(doc.id)) {
            if (doc.id == 70) continue;  // second version of No. 70
            throw Error(ErrorKind::DuplicatePaper, "paper " + std::to_string(doc.id) +
                                                       " appears more than once");
        }
        if (doc.id < 1 || doc.id > Corpus::kPaperCount)
            throw Error(ErrorKind::ParseFailure, "paper number out of range: " +
                                                     std::to_string(doc.id));
        const auto label = labels.find(doc.id);
        if (label == labels.end())
            throw Error(ErrorKind::LabelMismatch, "no label for paper " + std::to_string(doc.id));
        doc.label = label->second;
        seen.insert(doc.id);
        docs.push_back(std::move(doc));
    }
    for (int id = 1; id <= Corpus::kPaperCount; ++id)
        if (!seen.count(id))
            throw Error(ErrorKind::MissingPaper, "MissingPaper(" + std::to_string(id) + ")");
    return Corpus(std::move(docs), Provenance{std::move(source), options});
}

Corpus parse_corpus(const std::filesystem::path& path, const LabelTable& labels,
                    ParseOptions options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open corpus file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_corpus_text(buffer.str(), labels, options, path.string());
}

std::vector<std::string> tokenize(std::string_view raw_text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        const auto first = current.find_first_not_of('\'');
        if (first != std::string::npos) {
            const auto last = current.find_last_not_of('\'');
            tokens.push_back(current.substr(first, last - first + 1));
        }
        current.clear();
    };
    for (std::size_t i = 0; i < raw_text.size(); ++i) {
        const auto c = static_cast<unsigned char>(raw_text[i]);
        if (c >= 'a' && c <= 'z') {
            current.push_back(static_cast<char>(c));
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (c == '\'') {
            current.push_back('\'');
        } else if (c == 0xE2 && i + 2 < raw_text.size() &&
                   static_cast<unsigned char>(raw_text[i + 1]) == 0x80 &&
                   (static_cast<unsigned char>(raw_text[i + 2]) == 0x98 ||
                    static_cast<unsigned char>(raw_text[i + 2]) == 0x99)) {
            // U+2018 / U+2019 quotation marks act as apostrophes.
            current.push_back('\'');
            i += 2;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> lemmatize(std::span<const std::string> tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    std::unordered_map<std::string, std::string> cache;
    for (const auto& t : tokens) {
        auto it = cache.find(t);
        if (it == cache.end()) it = cache.emplace(t, lemmatize_word(t)).first;
        out.push_back(it->second);
    }
    return out;
}

std::vector<std::int64_t> word_counts(std::span<const std::string> tokens,
                                      std::span<const std::string> vocab) {
    std::unordered_map<std::string_view, std::size_t> index;
    index.reserve(vocab.size());
    for (std::size_t j = 0; j < vocab.size(); ++j) index.emplace(vocab[j], j);
    std::vector<std::int64_t> counts(vocab.size(), 0);
    for (const auto& t : tokens) {
        const auto it = index.find(t);
        if (it != index.end()) ++counts[it->second];
    }
    return counts;
}

void write_corpus_json(const Corpus& corpus, std::ostream& out) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& d : corpus.documents()) {
        nlohmann::ordered_json j;
        j["id"] = d.id;
        j["title"] = d.title;
        j["label"] = std::string(to_string(d.label));
        j["tokens"] = d.tokens;
        arr.push_back(std::move(j));
    }
    out << arr.dump(1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

}  // namespace stylus
