#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stylus/bow.hpp"
#include "stylus/corpus.hpp"

namespace stylus {

struct BinomialTest {
    double p = 1;
    double log_p = 0;
    double q = 0;       // null share of D1
    std::int64_t m = 0; // pooled count
};

/// Exact two-sided binomial allocation test of a word's split between two
/// corpora: with m = x1 + x2 and q = (T1 - x1) / (T1 + T2 - m),
/// p = P(|Bin(m, q) - mq| >= |x1 - mq|).
BinomialTest binomial_test(std::int64_t count_in_d1, std::int64_t count_in_d2,
                           std::int64_t total_d1, std::int64_t total_d2);
inline double binomial_pvalue(std::int64_t count_in_d1, std::int64_t count_in_d2,
                              std::int64_t total_d1, std::int64_t total_d2) {
    return binomial_test(count_in_d1, count_in_d2, total_d1, total_d2).p;
}

struct PValueTable {
    std::vector<std::string> words;
    std::vector<double> p;
    std::vector<double> log_p;
    std::vector<std::int64_t> m;
    std::vector<double> q;

    std::size_t size() const noexcept { return words.size(); }
    /// Index of a word or -1.
    std::ptrdiff_t find(const std::string& word) const;
};

/// Word-by-word test between two count tables aligned to vocab. Words absent
/// from both tables are left out.
PValueTable pvalue_table(std::span<const std::int64_t> counts1,
                         std::span<const std::int64_t> counts2,
                         const std::vector<std::string>& vocab);

/// Pools the rows of each group before testing.
PValueTable pvalue_table(const TermDocMatrix& tdm, const std::vector<int>& group1,
                         const std::vector<int>& group2);

struct HcResult {
    /// Max of sqrt(N)(i/N - p_(i)) / sqrt(i/N (1 - i/N)) over 1 <= i <= gamma0 N
    /// with p_(i) >= 1/N; -inf when no index qualifies.
    double statistic = -std::numeric_limits<double>::infinity();
    std::size_t i_star = 0;  // 1-based rank; 0 when none admissible
    double t_hc = 0;
    double gamma0 = 0.2;
    bool admissible = false;
    std::vector<std::size_t> selected_indices;  // p <= t_hc, ascending index
    std::vector<std::string> selected;          // words, when known
};

/// Sorted order breaks p-value ties by index.
HcResult hc_statistic(std::span<const double> p_values, double gamma0 = 0.2);
/// Sorted order breaks p-value ties by word.
HcResult hc_statistic(const PValueTable& table, double gamma0 = 0.2);

/// HC distance between one document and a pooled author table.
double hc_distance(std::span<const std::int64_t> doc_counts,
                   std::span<const std::int64_t> author_pool,
                   const std::vector<std::string>& vocab, double gamma0 = 0.2);

struct HcAttribution {
    Author author = Author::Hamilton;
    double d_hamilton = 0;
    double d_madison = 0;
    double diff = 0;  // d_hamilton - d_madison; positive favors Madison
};

HcAttribution attribute_by_hc(std::span<const std::int64_t> doc_counts,
                              std::span<const std::int64_t> hamilton_pool,
                              std::span<const std::int64_t> madison_pool,
                              const std::vector<std::string>& vocab, double gamma0 = 0.2);

/// Step-up rule: largest k with p_(k) <= k fdr / N; selects every p <= p_(k).
std::vector<std::size_t> bh_select(std::span<const double> p_values, double fdr);
/// Selects p <= alpha / N.
std::vector<std::size_t> bonferroni_select(std::span<const double> p_values, double alpha);

struct ScreenParams {
    double gamma0 = 0.2;
    double fdr = 0.1;
    double alpha = 0.05;
};

void write_screen_report_json(const PValueTable& table, const HcResult& hc,
                              const std::vector<std::size_t>& bh,
                              const std::vector<std::size_t>& bonferroni,
                              const ScreenParams& params, std::ostream& out);
/// word, -log10(p)
void write_wordcloud_csv(const PValueTable& table, std::ostream& out);

}  // namespace stylus
