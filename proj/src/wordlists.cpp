#include "stylus/wordlists.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "stylus/corpus.hpp"
#include "stylus/error.hpp"

namespace stylus {
namespace embedded {
extern const std::pair<std::string_view, std::string_view> kFiles[];
extern const std::size_t kFileCount;
}  // namespace embedded

std::string data_file(std::string_view name) {
    if (const char* dir = std::getenv("STYLUS_DATA_DIR"); dir != nullptr && *dir != '\0') {
        const auto path = std::filesystem::path(dir) / std::string(name);
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }
    for (std::size_t i = 0; i < embedded::kFileCount; ++i)
        if (embedded::kFiles[i].first == name) return std::string(embedded::kFiles[i].second);
    throw Error(ErrorKind::Io, "no bundled data file " + std::string(name));
}

WordList load_word_list(WordListKind kind) {
    const char* file = kind == WordListKind::Stopwords         ? "stopwords.txt"
                       : kind == WordListKind::FunctionWords70 ? "function70.txt"
                                                               : "marker145.txt";
    WordList list{kind, {}};
    std::istringstream in(data_file(file));
    std::string word;
    while (in >> word) {
        for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        list.words.insert(word);
    }
    return list;
}

WordList lemmatized(const WordList& list) {
    WordList out{list.kind, {}};
    for (const auto& w : list.words) out.words.insert(lemmatize_word(w));
    return out;
}

}  // namespace stylus
