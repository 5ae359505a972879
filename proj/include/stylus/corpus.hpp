#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stylus {

enum class Author { Hamilton, Madison, Jay, Disputed, Joint };

std::string_view to_string(Author author) noexcept;
Author author_from_string(std::string_view name);

/// Paper number -> authorship label.
using LabelTable = std::map<int, Author>;

LabelTable read_label_table(std::istream& in);
/// The bundled authorship table (51 Hamilton, 14 Madison, 5 Jay, 12 disputed, 3 joint).
LabelTable default_label_table();

struct Document {
    int id = 0;
    std::string title;
    std::string raw_text;
    std::vector<std::string> tokens;
    Author label = Author::Hamilton;
};

struct ParseOptions {
    bool lemmatize = true;
};

struct Provenance {
    std::string source;
    ParseOptions options;
};

/// Immutable, id-ordered collection of documents. Ids are unique and lie in
/// [1, 85]; every document has at least one token.
class Corpus {
public:
    static constexpr int kPaperCount = 85;

    Corpus(std::vector<Document> documents, Provenance provenance);

    const std::vector<Document>& documents() const noexcept { return documents_; }
    const Provenance& provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return documents_.size(); }
    const Document& by_id(int id) const;
    bool contains(int id) const noexcept;

private:
    std::vector<Document> documents_;
    Provenance provenance_;
};

/// Splits an ebook into papers on "FEDERALIST No. N" header lines. A repeated
/// No. 70 keeps the first occurrence; any other gap or repeat is an error.
Corpus parse_corpus_text(std::string_view text, const LabelTable& labels,
                         ParseOptions options = {}, std::string source = "<memory>");
Corpus parse_corpus(const std::filesystem::path& path, const LabelTable& labels,
                    ParseOptions options = {});

/// Lowercased word tokens; anything outside [a-z'] separates tokens, and
/// leading/trailing apostrophes are trimmed so contractions survive intact.
std::vector<std::string> tokenize(std::string_view raw_text);

std::string lemmatize_word(std::string_view word);
std::vector<std::string> lemmatize(std::span<const std::string> tokens);

std::vector<std::int64_t> word_counts(std::span<const std::string> tokens,
                                      std::span<const std::string> vocab);
inline std::vector<std::int64_t> word_counts(const Document& doc,
                                             std::span<const std::string> vocab) {
    return word_counts(doc.tokens, vocab);
}

/// corpus.json: array of {id, title, label, tokens}.
void write_corpus_json(const Corpus& corpus, std::ostream& out);

}  // namespace stylus
