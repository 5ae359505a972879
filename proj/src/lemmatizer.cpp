// Dictionary lemmatizer with a suffix-rule fallback. The fallback follows
// Porter's plural and -ed/-ing rules but repairs the stem into a word
// (undoubling, restoring a final e) instead of leaving a bare stem.

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "stylus/corpus.hpp"

namespace stylus {
namespace {

// "form lemma" pairs.
constexpr std::string_view kIrregular = R"(
am be is be are be was be were be been be being be art be
has have had have having have hath have
does do did do done do doing do doth do
better good best good worse bad worst bad
men man women woman children child people people feet foot teeth tooth
mice mouse geese goose oxen ox lives life wives wife knives knife
leaves leaf halves half selves self thieves thief
went go gone go goes go going go
made make making make makes make
said say says say
took take taken take taking take takes take
gave give given give giving give gives give
came come coming come comes come
saw see seen see seeing see sees see
knew know known know knowing know knows know
thought think thinking think thinks think
brought bring brought bring bringing bring
bought buy sought seek taught teach caught catch fought fight
found find held hold told tell sold sell
felt feel kept keep left leave meant mean met meet paid pay
sent send spent spend lent lend built build lost lose
led lead fed feed fled flee bred breed
stood stand understood understand withstood withstand
wrote write written write writing write writes write
spoke speak spoken speak broke break broken break
chose choose chosen choose choosing choose
rose rise risen rise arose arise arisen arise
fell fall fallen fall
grew grow grown grow
drew draw drawn draw
threw throw thrown throw
shown show showed show
began begin begun begin
ran run running run
sat sit sitting sit
got get gotten get getting get
forgot forget forgotten forget
forbade forbid forbidden forbid
bore bear borne bear born bear
wore wear worn wear swore swear sworn swear tore tear torn tear
drove drive driven drive rode ride ridden ride
hid hide hidden hide
bit bite bitten bite
became become becoming become
overcame overcome
undertook undertake undertaken undertake
lay lie lain lie lying lie
laid lay
dying die tying tie
using use used use uses use
ceased cease
data datum criteria criterion phenomena phenomenon
analyses analysis bases basis crises crisis theses thesis
us us its its his his this this thus thus
)";

// Words the suffix rules would mangle; they are their own lemmas.
constexpr std::string_view kProtected = R"(
during nothing something anything everything thing things bring king string spring
evening morning notwithstanding according
always perhaps whereas besides sometimes nevertheless towards afterwards
upwards downwards news means series species politics ethics riches thanks
united hundred indeed need seed feed proceed succeed exceed
less unless nevertheless regardless
was has is as us yes this thus his its hers ours yours theirs whilst amongst
alas bias gas atlas canvas
ceasing
)";

struct Tables {
    std::unordered_map<std::string, std::string> irregular;
    std::unordered_set<std::string> fixed;  // lemmas and protected words
};

const Tables& tables() {
    static const Tables t = [] {
        Tables out;
        std::string form;
        std::size_t pos = 0;
        auto next_word = [&](std::string_view src) -> std::string {
            while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
            const auto start = pos;
            while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
            return std::string(src.substr(start, pos - start));
        };
        for (;;) {
            auto f = next_word(kIrregular);
            if (f.empty()) break;
            auto l = next_word(kIrregular);
            out.fixed.insert(l);
            out.irregular.emplace(std::move(f), std::move(l));
        }
        pos = 0;
        for (;;) {
            auto w = next_word(kProtected);
            if (w.empty()) break;
            out.fixed.insert(std::move(w));
        }
        return out;
    }();
    return t;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool is_consonant_at(std::string_view w, std::size_t i) {
    const char c = w[i];
    if (is_vowel(c)) return false;
    if (c == 'y') return i == 0 || !is_consonant_at(w, i - 1);
    return true;
}

bool has_vowel(std::string_view w) {
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!is_consonant_at(w, i)) return true;
    return false;
}

// Porter's measure m: number of VC sequences.
int measure(std::string_view w) {
    int m = 0;
    std::size_t i = 0;
    while (i < w.size() && is_consonant_at(w, i)) ++i;
    while (i < w.size()) {
        while (i < w.size() && !is_consonant_at(w, i)) ++i;
        if (i >= w.size()) break;
        while (i < w.size() && is_consonant_at(w, i)) ++i;
        ++m;
    }
    return m;
}

bool ends_cvc(std::string_view w) {
    const auto n = w.size();
    if (n < 3) return false;
    if (!is_consonant_at(w, n - 3) || is_consonant_at(w, n - 2) || !is_consonant_at(w, n - 1))
        return false;
    const char c = w[n - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(std::string_view w, std::string_view s) {
    return w.size() >= s.size() && w.substr(w.size() - s.size()) == s;
}

std::string repair_stem(std::string stem) {
    if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz") ||
        ends_with(stem, "ur") || ends_with(stem, "rc") || ends_with(stem, "nc") ||
        ends_with(stem, "dg") || ends_with(stem, "rv") || ends_with(stem, "lv"))
        return stem + "e";
    const auto n = stem.size();
    if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant_at(stem, n - 1) &&
        stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z')
        return stem.substr(0, n - 1);
    if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
    return stem;
}

// One rewrite step; returns the input unchanged when nothing applies.
std::string step(const std::string& w) {
    const auto& t = tables();
    if (const auto it = t.irregular.find(w); it != t.irregular.end()) return it->second;
    if (t.fixed.count(w) || w.size() <= 3 || w.find('\'') != std::string::npos) return w;

    if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "sses") || ends_with(w, "shes") || ends_with(w, "ches") ||
        ends_with(w, "xes"))
        return w.substr(0, w.size() - 2);
    if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") &&
        !ends_with(w, "ous"))
        return w.substr(0, w.size() - 1);
    if (ends_with(w, "ing")) {
        const auto stem = w.substr(0, w.size() - 3);
        if (stem.size() >= 2 && has_vowel(stem)) return repair_stem(stem);
    }
    if (ends_with(w, "ied") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "eed")) return w;
    if (ends_with(w, "ed")) {
        const auto stem = w.substr(0, w.size() - 2);
        if (stem.size() >= 2 && has_vowel(stem)) return repair_stem(stem);
    }
    return w;
}

}  // namespace

std::string lemmatize_word(std::string_view word) {
    // Every rule either maps into the fixed set or shortens the word, so the
    // iteration reaches a fixed point; returning it makes lemmatization idempotent.
    std::string current(word);
    for (int guard = 0; guard < 64; ++guard) {
        auto next = step(current);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

}  // namespace stylus
