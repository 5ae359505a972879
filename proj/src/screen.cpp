#include "stylus/screen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include <json.hpp>

#include "stylus/error.hpp"

namespace stylus {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_binomial_pmf(std::int64_t k, std::int64_t m, double q) {
    if (q <= 0) return k == 0 ? 0.0 : kNegInf;
    if (q >= 1) return k == m ? 0.0 : kNegInf;
    const auto kd = static_cast<double>(k);
    const auto md = static_cast<double>(m);
    return std::lgamma(md + 1) - std::lgamma(kd + 1) - std::lgamma(md - kd + 1) + kd * std::log(q) +
           (md - kd) * std::log1p(-q);
}

HcResult hc_from_order(std::span<const double> p, const std::vector<std::size_t>& order,
                       double gamma0) {
    if (p.empty()) throw Error(ErrorKind::EmptyInput, "HC statistic of an empty p-value list");
    if (!(gamma0 > 0 && gamma0 <= 1)) throw Error(ErrorKind::InvalidParam, "gamma0 must lie in (0, 1]");
    for (double v : p)
        if (!(v >= 0 && v <= 1)) throw Error(ErrorKind::InvalidParam, "p-value outside [0, 1]");
    HcResult out;
    out.gamma0 = gamma0;
    const auto N = static_cast<double>(p.size());
    const auto last = static_cast<std::size_t>(std::floor(gamma0 * N + 1e-9));
    for (std::size_t i = 1; i <= last && i < p.size(); ++i) {
        const double pi = p[order[i - 1]];
        if (pi < 1.0 / N) continue;
        const double frac = static_cast<double>(i) / N;
        const double value = std::sqrt(N) * (frac - pi) / std::sqrt(frac * (1 - frac));
        if (!out.admissible || value > out.statistic) {
            out.admissible = true;
            out.statistic = value;
            out.i_star = i;
            out.t_hc = pi;
        }
    }
    if (out.admissible)
        for (std::size_t j = 0; j < p.size(); ++j)
            if (p[j] <= out.t_hc) out.selected_indices.push_back(j);
    return out;
}

}  // namespace

BinomialTest binomial_test(std::int64_t x1, std::int64_t x2, std::int64_t t1, std::int64_t t2) {
    if (x1 < 0 || x2 < 0 || x1 > t1 || x2 > t2)
        throw Error(ErrorKind::InvalidParam, "word counts must lie in [0, total]");
    const std::int64_t m = x1 + x2;
    if (m < 1) throw Error(ErrorKind::InvalidParam, "binomial test needs a pooled count of at least 1");
    const std::int64_t den = t1 + t2 - m;
    if (den <= 0) throw Error(ErrorKind::DegenerateTotals, "no other words in either table");

    BinomialTest out;
    out.m = m;
    out.q = static_cast<double>(t1 - x1) / static_cast<double>(den);
    const double mean = static_cast<double>(m) * out.q;
    const double dev = std::abs(static_cast<double>(x1) - mean);
    const double tol = 1e-9 * (1.0 + static_cast<double>(m));
    double log_tail = kNegInf;
    double log_mid = kNegInf;
    for (std::int64_t k = 0; k <= m; ++k) {
        const double lp = log_binomial_pmf(k, m, out.q);
        if (std::abs(static_cast<double>(k) - mean) >= dev - tol)
            log_tail = log_add(log_tail, lp);
        else
            log_mid = log_add(log_mid, lp);
    }
    if (log_mid == kNegInf) {
        out.p = 1;
        out.log_p = 0;
    } else if (log_tail == kNegInf) {
        out.p = 0;
        out.log_p = kNegInf;
    } else {
        out.log_p = log_tail - log_add(log_tail, log_mid);
        out.p = std::exp(out.log_p);
    }
    return out;
}

std::ptrdiff_t PValueTable::find(const std::string& word) const {
    const auto it = std::find(words.begin(), words.end(), word);
    return it == words.end() ? -1 : it - words.begin();
}

PValueTable pvalue_table(std::span<const std::int64_t> counts1, std::span<const std::int64_t> counts2,
                         const std::vector<std::string>& vocab) {
    if (counts1.size() != vocab.size() || counts2.size() != vocab.size())
        throw Error(ErrorKind::DimensionMismatch, "count vectors are not aligned to the vocabulary");
    const auto t1 = std::accumulate(counts1.begin(), counts1.end(), std::int64_t{0});
    const auto t2 = std::accumulate(counts2.begin(), counts2.end(), std::int64_t{0});
    PValueTable table;
    for (std::size_t j = 0; j < vocab.size(); ++j) {
        if (counts1[j] + counts2[j] == 0) continue;
        const auto test = binomial_test(counts1[j], counts2[j], t1, t2);
        table.words.push_back(vocab[j]);
        table.p.push_back(test.p);
        table.log_p.push_back(test.log_p);
        table.m.push_back(test.m);
        table.q.push_back(test.q);
    }
    return table;
}

PValueTable pvalue_table(const TermDocMatrix& tdm, const std::vector<int>& group1,
                         const std::vector<int>& group2) {
    if (group1.empty() || group2.empty()) throw Error(ErrorKind::EmptyInput, "screening group is empty");
    const std::set<int> first(group1.begin(), group1.end());
    for (int id : group2)
        if (first.count(id)) throw Error(ErrorKind::InvalidParam, "paper " + std::to_string(id) + " is in both groups");
    const auto V = tdm.counts.cols();
    auto pool = [&](const std::vector<int>& ids) {
        std::vector<std::int64_t> total(static_cast<std::size_t>(V), 0);
        for (int id : ids) {
            const auto r = tdm.row_of(id);
            if (r < 0) throw Error(ErrorKind::MissingDoc, "paper " + std::to_string(id));
            for (Eigen::Index j = 0; j < V; ++j) total[static_cast<std::size_t>(j)] += tdm.counts(r, j);
        }
        return total;
    };
    const auto c1 = pool(group1);
    const auto c2 = pool(group2);
    return pvalue_table(c1, c2, tdm.vocab);
}

HcResult hc_statistic(std::span<const double> p_values, double gamma0) {
    std::vector<std::size_t> order(p_values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    return hc_from_order(p_values, order, gamma0);
}

HcResult hc_statistic(const PValueTable& table, double gamma0) {
    std::vector<std::size_t> order(table.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (table.p[a] != table.p[b]) return table.p[a] < table.p[b];
        return table.words[a] < table.words[b];
    });
    auto out = hc_from_order(table.p, order, gamma0);
    for (auto j : out.selected_indices) out.selected.push_back(table.words[j]);
    return out;
}

double hc_distance(std::span<const std::int64_t> doc_counts, std::span<const std::int64_t> author_pool,
                   const std::vector<std::string>& vocab, double gamma0) {
    return hc_statistic(pvalue_table(doc_counts, author_pool, vocab), gamma0).statistic;
}

HcAttribution attribute_by_hc(std::span<const std::int64_t> doc_counts,
                              std::span<const std::int64_t> hamilton_pool,
                              std::span<const std::int64_t> madison_pool,
                              const std::vector<std::string>& vocab, double gamma0) {
    const auto sum = [](std::span<const std::int64_t> v) {
        return std::accumulate(v.begin(), v.end(), std::int64_t{0});
    };
    if (sum(hamilton_pool) == 0 || sum(madison_pool) == 0)
        throw Error(ErrorKind::EmptyInput, "author pool is empty");
    HcAttribution out;
    out.d_hamilton = hc_distance(doc_counts, hamilton_pool, vocab, gamma0);
    out.d_madison = hc_distance(doc_counts, madison_pool, vocab, gamma0);
    out.diff = out.d_hamilton == out.d_madison ? 0.0 : out.d_hamilton - out.d_madison;
    out.author = out.d_madison < out.d_hamilton ? Author::Madison : Author::Hamilton;
    return out;
}

std::vector<std::size_t> bh_select(std::span<const double> p_values, double fdr) {
    if (!(fdr > 0 && fdr < 1)) throw Error(ErrorKind::InvalidParam, "fdr must lie in (0, 1)");
    std::vector<double> sorted(p_values.begin(), p_values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto N = static_cast<double>(sorted.size());
    double cutoff = -1;
    for (std::size_t k = sorted.size(); k >= 1; --k) {
        if (sorted[k - 1] <= static_cast<double>(k) * fdr / N) {
            cutoff = sorted[k - 1];
            break;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < p_values.size(); ++j)
        if (p_values[j] <= cutoff) out.push_back(j);
    return out;
}

std::vector<std::size_t> bonferroni_select(std::span<const double> p_values, double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw Error(ErrorKind::InvalidParam, "alpha must lie in (0, 1)");
    const double cutoff = alpha / static_cast<double>(p_values.size());
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < p_values.size(); ++j)
        if (p_values[j] <= cutoff) out.push_back(j);
    return out;
}

void write_screen_report_json(const PValueTable& table, const HcResult& hc,
                              const std::vector<std::size_t>& bh,
                              const std::vector<std::size_t>& bonferroni,
                              const ScreenParams& params, std::ostream& out) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["params"] = {{"gamma0", params.gamma0}, {"fdr", params.fdr}, {"alpha", params.alpha}};
    ordered_json words = ordered_json::array();
    for (std::size_t k = 0; k < table.size(); ++k)
        words.push_back({{"word", table.words[k]},
                         {"p", table.p[k]},
                         {"log_p", std::isfinite(table.log_p[k]) ? ordered_json(table.log_p[k]) : ordered_json()},
                         {"m", table.m[k]},
                         {"q", table.q[k]}});
    j["words"] = std::move(words);
    j["hc"] = {{"admissible", hc.admissible},
               {"statistic", hc.admissible ? ordered_json(hc.statistic) : ordered_json()},
               {"i_star", hc.i_star},
               {"t_hc", hc.t_hc},
               {"selected", hc.selected}};
    auto names = [&](const std::vector<std::size_t>& idx) {
        std::vector<std::string> w;
        for (auto k : idx) w.push_back(table.words[k]);
        return w;
    };
    j["bh"] = names(bh);
    j["bonferroni"] = names(bonferroni);
    out << j.dump(2, ' ', false, ordered_json::error_handler_t::replace) << '\n';
}

void write_wordcloud_csv(const PValueTable& table, std::ostream& out) {
    out << "word,weight\n";
    const auto old_precision = out.precision(17);
    for (std::size_t k = 0; k < table.size(); ++k) {
        const double w = -table.log_p[k] / std::log(10.0);
        out << table.words[k] << ',' << (std::isfinite(w) ? w : 400.0) << '\n';
    }
    out.precision(old_precision);
}

}  // namespace stylus
