#include "stylus/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "stylus/pipeline.hpp"

namespace stylus {
namespace {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

const std::map<std::string, std::string>& section_stage() {
    static const std::map<std::string, std::string> stages{
        {"corpus", "ingest"},     {"bow", "bow"},         {"embedding", "embed"},
        {"classifier", "classify"}, {"screening", "screen"}, {"thresholds", "eval"},
        {"output", "pipeline"}};
    return stages;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"corpus", {"path", "lemmatize", "labels"}},
        {"bow", {"input_type"}},
        {"embedding",
         {"method", "topics", "alpha", "beta", "iters", "rank", "nmf_iters", "seed", "file", "word_vectors"}},
        {"classifier",
         {"method", "seed", "path_size", "lambda_min_ratio", "trees", "burn_in", "draws", "k", "min_leaf",
          "split_alpha", "split_beta"}},
        {"screening", {"gamma0", "fdr", "alpha"}},
        {"thresholds", {"fixed"}},
        {"output", {"dir"}}};
    return keys;
}

[[noreturn]] void fail(const std::string& section, const std::string& message) {
    const auto it = section_stage().find(section);
    throw StageError(it == section_stage().end() ? "config" : it->second, ErrorKind::InvalidConfig, message);
}

class Reader {
public:
    Reader(const pt::ptree& tree, fs::path base) : tree_(tree), base_(std::move(base)) {}

    const pt::ptree* section(const std::string& name) const {
        const auto it = tree_.find(name);
        return it == tree_.not_found() ? nullptr : &it->second;
    }

    std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
        const auto* s = section(sec);
        if (s == nullptr) return std::nullopt;
        const auto it = s->find(key);
        if (it == s->not_found()) return std::nullopt;
        return it->second.data();
    }

    template <class T>
    void get(const std::string& sec, const std::string& key, T& out) const {
        const auto v = raw(sec, key);
        if (!v) return;
        std::istringstream ss(*v);
        T parsed{};
        if constexpr (std::is_same_v<T, bool>) {
            if (*v == "true" || *v == "yes" || *v == "1") parsed = true;
            else if (*v == "false" || *v == "no" || *v == "0") parsed = false;
            else fail(sec, sec + "." + key + ": expected a boolean, got '" + *v + "'");
        } else {
            ss >> parsed;
            if (!ss || !(ss >> std::ws).eof())
                fail(sec, sec + "." + key + ": cannot parse '" + *v + "'");
        }
        out = parsed;
    }

    void get_path(const std::string& sec, const std::string& key, fs::path& out) const {
        const auto v = raw(sec, key);
        if (!v) return;
        const fs::path p(*v);
        out = p.is_absolute() ? p : base_ / p;
    }

private:
    const pt::ptree& tree_;
    fs::path base_;
};

void require_file(const std::string& sec, const std::string& key, const fs::path& path) {
    if (path.empty()) fail(sec, sec + "." + key + " is required");
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) fail(sec, sec + "." + key + ": no such file " + path.string());
}

std::vector<int> parse_topics(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        int k = 0;
        if (!(is >> k) || !(is >> std::ws).eof() || k < 1)
            fail("embedding", "embedding.topics: bad topic count '" + item + "'");
        out.push_back(k);
    }
    if (out.empty()) fail("embedding", "embedding.topics is empty");
    return out;
}

}  // namespace

RunConfig parse_config(std::istream& in, const fs::path& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw StageError("config", ErrorKind::InvalidConfig, e.what());
    }
    for (const auto& [name, section] : tree) {
        const auto known = known_keys().find(name);
        if (known == known_keys().end()) {
            if (section.empty()) throw StageError("config", ErrorKind::InvalidConfig, "key outside a section: " + name);
            throw StageError("config", ErrorKind::InvalidConfig, "unknown section [" + name + "]");
        }
        for (const auto& [key, _] : section)
            if (!known->second.count(key)) fail(name, "unknown key " + name + "." + key);
    }

    Reader r(tree, base_dir);
    RunConfig c;
    r.get_path("corpus", "path", c.corpus);
    r.get("corpus", "lemmatize", c.lemmatize);
    r.get_path("corpus", "labels", c.labels);
    require_file("corpus", "path", c.corpus);
    if (!c.labels.empty()) require_file("corpus", "labels", c.labels);

    if (const auto v = r.raw("bow", "input_type")) {
        try {
            c.input_type = input_type_from_string(*v);
        } catch (const Error& e) {
            fail("bow", e.detail());
        }
    }

    auto& e = c.embedding;
    r.get("embedding", "method", e.method);
    static const std::set<std::string> methods{"bow", "lda", "lsa", "nmf", "aggregate", "external"};
    if (!methods.count(e.method)) fail("embedding", "embedding.method: unknown method '" + e.method + "'");
    if (const auto v = r.raw("embedding", "topics")) e.topics = parse_topics(*v);
    r.get("embedding", "alpha", e.lda_alpha);
    r.get("embedding", "beta", e.lda_beta);
    r.get("embedding", "iters", e.lda_iters);
    r.get("embedding", "rank", e.rank);
    r.get("embedding", "nmf_iters", e.nmf_iters);
    r.get("embedding", "seed", e.seed);
    r.get_path("embedding", "file", e.file);
    r.get_path("embedding", "word_vectors", e.word_vectors);
    if (e.method == "external") require_file("embedding", "file", e.file);
    if (e.method == "aggregate") require_file("embedding", "word_vectors", e.word_vectors);
    if (e.lda_iters < 1 || e.rank < 1 || e.nmf_iters < 0 || !(e.lda_beta > 0))
        fail("embedding", "embedding parameters out of range");

    auto& k = c.classifier;
    r.get("classifier", "method", k.method);
    if (k.method != "lasso" && k.method != "bart")
        fail("classifier", "classifier.method: unknown method '" + k.method + "'");
    r.get("classifier", "seed", k.seed);
    r.get("classifier", "path_size", k.lasso.path_size);
    r.get("classifier", "lambda_min_ratio", k.lasso.lambda_min_ratio);
    r.get("classifier", "trees", k.bart.trees);
    r.get("classifier", "burn_in", k.bart.burn_in);
    r.get("classifier", "draws", k.bart.draws);
    r.get("classifier", "k", k.bart.k);
    r.get("classifier", "min_leaf", k.bart.min_leaf);
    r.get("classifier", "split_alpha", k.bart.split_alpha);
    r.get("classifier", "split_beta", k.bart.split_beta);
    if (k.lasso.path_size < 1 || !(k.lasso.lambda_min_ratio > 0 && k.lasso.lambda_min_ratio < 1) ||
        k.bart.trees < 1 || k.bart.burn_in < 0 || k.bart.draws < 1 || k.bart.min_leaf < 1 || !(k.bart.k > 0))
        fail("classifier", "classifier parameters out of range");

    r.get("screening", "gamma0", c.screening.gamma0);
    r.get("screening", "fdr", c.screening.fdr);
    r.get("screening", "alpha", c.screening.alpha);
    if (!(c.screening.gamma0 > 0 && c.screening.gamma0 <= 1) || !(c.screening.fdr > 0 && c.screening.fdr < 1) ||
        !(c.screening.alpha > 0 && c.screening.alpha < 1))
        fail("screening", "screening parameters out of range");

    r.get("thresholds", "fixed", c.fixed_threshold);
    if (!(c.fixed_threshold >= 0 && c.fixed_threshold <= 1)) fail("thresholds", "thresholds.fixed must lie in [0, 1]");

    c.output_dir = base_dir / "out";
    r.get_path("output", "dir", c.output_dir);
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw StageError("config", ErrorKind::Io, "cannot open config " + path.string());
    return parse_config(in, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::string describe(const RunConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "[corpus]\npath = " << c.corpus.string() << "\nlemmatize = " << (c.lemmatize ? "true" : "false") << '\n';
    if (!c.labels.empty()) out << "labels = " << c.labels.string() << '\n';
    out << "\n[bow]\ninput_type = " << to_string(c.input_type) << '\n';
    const auto& e = c.embedding;
    out << "\n[embedding]\nmethod = " << e.method << "\ntopics = ";
    for (std::size_t i = 0; i < e.topics.size(); ++i) out << (i ? "," : "") << e.topics[i];
    out << "\nalpha = " << e.lda_alpha << "\nbeta = " << e.lda_beta << "\niters = " << e.lda_iters
        << "\nrank = " << e.rank << "\nnmf_iters = " << e.nmf_iters << "\nseed = " << e.seed << '\n';
    if (!e.file.empty()) out << "file = " << e.file.string() << '\n';
    if (!e.word_vectors.empty()) out << "word_vectors = " << e.word_vectors.string() << '\n';
    const auto& k = c.classifier;
    out << "\n[classifier]\nmethod = " << k.method << "\nseed = " << k.seed << "\npath_size = " << k.lasso.path_size
        << "\nlambda_min_ratio = " << k.lasso.lambda_min_ratio << "\ntrees = " << k.bart.trees
        << "\nburn_in = " << k.bart.burn_in << "\ndraws = " << k.bart.draws << "\nk = " << k.bart.k
        << "\nmin_leaf = " << k.bart.min_leaf << "\nsplit_alpha = " << k.bart.split_alpha
        << "\nsplit_beta = " << k.bart.split_beta << '\n';
    out << "\n[screening]\ngamma0 = " << c.screening.gamma0 << "\nfdr = " << c.screening.fdr
        << "\nalpha = " << c.screening.alpha << '\n';
    out << "\n[thresholds]\nfixed = " << c.fixed_threshold << '\n';
    out << "\n[output]\ndir = " << c.output_dir.string() << '\n';
    return out.str();
}

}  // namespace stylus
