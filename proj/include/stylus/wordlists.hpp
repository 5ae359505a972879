#pragma once

#include <set>
#include <string>
#include <string_view>

namespace stylus {

enum class WordListKind { Stopwords, FunctionWords70, MarkerWords145 };

struct WordList {
    WordListKind kind;
    std::set<std::string> words;

    bool contains(const std::string& w) const { return words.count(w) != 0; }
    std::size_t size() const noexcept { return words.size(); }
};

/// Contents of a bundled data file (stopwords.txt, function70.txt,
/// marker145.txt, labels.csv). When STYLUS_DATA_DIR is set the file is read
/// from that directory instead.
std::string data_file(std::string_view name);

WordList load_word_list(WordListKind kind);

/// The list mapped through the lemmatizer, i.e. the form in which the words
/// appear in lemmatized token streams.
WordList lemmatized(const WordList& list);

}  // namespace stylus
