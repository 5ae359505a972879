#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "stylus/screen.hpp"

using namespace stylus;
using stylus::testing::brute_force_hc;
using stylus::testing::error_kind;
using stylus::testing::make_tdm;

namespace {

double binom_pmf(int k, int m, double q) {
    return std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) + k * std::log(q) +
                    (m - k) * std::log(1 - q));
}

/// Direct two-sided tail, summing every outcome at least as far from the mean.
double direct_pvalue(int x1, int x2, long t1, long t2) {
    const int m = x1 + x2;
    const double q = static_cast<double>(t1 - x1) / static_cast<double>(t1 + t2 - m);
    const double dev = std::abs(x1 - m * q);
    double p = 0;
    for (int k = 0; k <= m; ++k)
        if (std::abs(k - m * q) >= dev - 1e-9) p += binom_pmf(k, m, q);
    return std::min(1.0, p);
}

std::vector<std::size_t> brute_bh(const std::vector<double>& p, double fdr) {
    const double n = static_cast<double>(p.size());
    double cutoff = -1;
    for (double t : p) {
        const auto rank = static_cast<double>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= t; }));
        if (t <= rank * fdr / n) cutoff = std::max(cutoff, t);
    }
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (p[j] <= cutoff) out.push_back(j);
    return out;
}

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<std::string> words(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t j = 0; j < n; ++j) v.push_back("w" + std::to_string(100 + j));
    return v;
}

}  // namespace

TEST_SUITE("screen") {
    TEST_CASE("binomial test examples") {
        const auto sym = binomial_test(1, 1, 10, 10);
        CHECK(sym.q == doctest::Approx(0.5));
        CHECK(sym.p == doctest::Approx(1.0));
        const auto extreme = binomial_test(10, 0, 110, 100);
        CHECK(extreme.q == doctest::Approx(0.5));
        CHECK(extreme.m == 10);
        CHECK(extreme.p == doctest::Approx(2 * std::pow(0.5, 10)).epsilon(1e-12));
        CHECK(extreme.log_p == doctest::Approx(std::log(2 * std::pow(0.5, 10))).epsilon(1e-12));
    }

    TEST_CASE("binomial test agrees with direct summation") {
        std::mt19937_64 rng(12);
        for (int trial = 0; trial < 300; ++trial) {
            const int x1 = std::uniform_int_distribution<int>(0, 40)(rng);
            const int x2 = std::uniform_int_distribution<int>(x1 == 0 ? 1 : 0, 40)(rng);
            const long t1 = x1 + std::uniform_int_distribution<int>(1, 500)(rng);
            const long t2 = x2 + std::uniform_int_distribution<int>(0, 500)(rng);
            const double p = binomial_pvalue(x1, x2, t1, t2);
            CHECK(p == doctest::Approx(direct_pvalue(x1, x2, t1, t2)).epsilon(1e-9));
            CHECK(p > 0);
            CHECK(p <= 1);
        }
    }

    TEST_CASE("binomial test errors") {
        CHECK(error_kind([] { binomial_test(3, 2, 3, 2); }) == ErrorKind::DegenerateTotals);
        CHECK(error_kind([] { binomial_test(5, 0, 4, 10); }) == ErrorKind::InvalidParam);
    }

    TEST_CASE("p-value tables") {
        CountMatrix c(4, 4);
        c << 3, 5, 1, 0,   //
            2, 4, 0, 1,    //
            3, 5, 1, 0,    //
            2, 4, 0, 1;
        const auto tdm = make_tdm(c);
        const auto same = pvalue_table(tdm, {1, 2}, {3, 4});
        REQUIRE(same.size() == 4);
        for (double p : same.p) CHECK(p == doctest::Approx(1.0));

        CountMatrix e(2, 3);
        e << 40, 10, 12, 0, 11, 13;
        const auto t = pvalue_table(make_tdm(e), {1}, {2});
        const auto it = std::min_element(t.p.begin(), t.p.end());
        CHECK(t.words[static_cast<std::size_t>(it - t.p.begin())] == "w00");
        CHECK(*it == doctest::Approx(direct_pvalue(40, 0, 62, 24)).epsilon(1e-9));
        CHECK(t.find("w02") == 2);
        CHECK(t.find("zz") == -1);

        CHECK(error_kind([&] { pvalue_table(tdm, {1}, {1}); }) == ErrorKind::InvalidParam);
        CHECK(error_kind([&] { pvalue_table(tdm, {}, {1}); }) == ErrorKind::EmptyInput);
        CHECK(error_kind([&] { pvalue_table(tdm, {1}, {9}); }) == ErrorKind::MissingDoc);
    }

    TEST_CASE("words absent from both tables are skipped") {
        const std::vector<std::int64_t> a{3, 0, 2}, b{1, 0, 4};
        const auto t = pvalue_table(a, b, {"x", "y", "z"});
        CHECK(t.words == std::vector<std::string>{"x", "z"});
    }

    TEST_CASE("HC on uniform quantiles is zero") {
        std::vector<double> p;
        for (int i = 1; i <= 10; ++i) p.push_back(i / 10.0);
        const auto hc = hc_statistic(p, 0.2);
        CHECK(hc.admissible);
        CHECK(std::abs(hc.statistic) < 1e-12);
    }

    TEST_CASE("HC skips indices with p below 1/N") {
        const std::vector<double> p{0.001, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.9, 0.95};
        const auto hc = hc_statistic(p, 0.2);
        const double expect = std::sqrt(10.0) * (0.2 - 0.5) / std::sqrt(0.2 * 0.8);
        CHECK(hc.i_star == 2);
        CHECK(hc.statistic == doctest::Approx(expect).epsilon(1e-12));
        CHECK(hc.statistic == doctest::Approx(-2.3717).epsilon(1e-4));
        CHECK(hc.t_hc == 0.5);
        CHECK(hc.selected_indices == std::vector<std::size_t>{0, 1});
    }

    TEST_CASE("HC with all p equal to one") {
        const std::vector<double> p(10, 1.0);
        const auto hc = hc_statistic(p, 0.2);
        const auto brute = brute_force_hc(p, 0.2);
        CHECK(hc.statistic < 0);
        CHECK(hc.statistic == doctest::Approx(brute.value).epsilon(1e-12));
        CHECK(hc.i_star == brute.i_star);
        CHECK(hc.selected_indices.size() == 10);
    }

    TEST_CASE("HC with no admissible index") {
        const auto hc = hc_statistic(std::vector<double>{0.001, 0.002, 0.9}, 0.2);
        CHECK_FALSE(hc.admissible);
        CHECK(hc.statistic == -std::numeric_limits<double>::infinity());
        CHECK(hc.selected_indices.empty());
        CHECK(error_kind([] { hc_statistic(std::vector<double>{}, 0.2); }) == ErrorKind::EmptyInput);
    }

    TEST_CASE("HC equals brute force on random p-vectors") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(0, 1);
        for (int trial = 0; trial < 1000; ++trial) {
            const int n = std::uniform_int_distribution<int>(1, 50)(rng);
            const double gamma0 = trial % 3 == 0 ? 0.2 : std::uniform_real_distribution<double>(0.05, 1.0)(rng);
            std::vector<double> p(static_cast<std::size_t>(n));
            for (auto& v : p) {
                v = u(rng);
                if (trial % 4 == 1) v = std::pow(v, 3);
                if (trial % 5 == 2) v = std::round(v * 8) / 8;
            }
            const auto hc = hc_statistic(p, gamma0);
            const auto brute = brute_force_hc(p, gamma0);
            CHECK(hc.i_star == brute.i_star);
            if (brute.i_star > 0) {
                CHECK(std::abs(hc.statistic - brute.value) <= 1e-12);
            } else {
                CHECK_FALSE(hc.admissible);
            }
        }
    }

    TEST_CASE("HC table overload reports words") {
        PValueTable t;
        t.words = {"a", "b", "c", "d", "e"};
        t.p = {0.9, 0.3, 0.7, 0.25, 0.8};
        const auto hc = hc_statistic(t, 0.4);
        const auto brute = brute_force_hc(t.p, 0.4);
        CHECK(hc.i_star == brute.i_star);
        CHECK(hc.selected == std::vector<std::string>{"b", "d"});
    }

    TEST_CASE("HC distance of a document to a proportional pool") {
        const std::vector<std::int64_t> doc{5, 3, 8, 1, 2, 6, 4, 7, 9, 3, 2, 5};
        std::vector<std::int64_t> pool;
        for (auto x : doc) pool.push_back(10 * x);
        CHECK(hc_distance(doc, pool, words(doc.size())) <= 0);
    }

    TEST_CASE("HC distance to a pool with moderate shifts is positive") {
        std::vector<std::int64_t> doc(40, 3), pool(40, 100);
        for (int j = 0; j < 8; ++j) doc[static_cast<std::size_t>(j)] = 8;
        const auto vocab = words(40);
        std::vector<double> p;
        for (std::size_t j = 0; j < 40; ++j) p.push_back(direct_pvalue(static_cast<int>(doc[j]),
                                                                        static_cast<int>(pool[j]), 160, 4000));
        const auto brute = brute_force_hc(p, 0.2);
        const double d = hc_distance(doc, pool, vocab);
        CHECK(d > 1.0);
        CHECK(d == doctest::Approx(brute.value).epsilon(1e-8));
    }

    TEST_CASE("attribution by HC") {
        std::mt19937_64 rng(14);
        const std::size_t v = 40;
        std::vector<std::int64_t> doc(v), madison(v), hamilton(v);
        for (std::size_t j = 0; j < v; ++j) {
            doc[j] = std::uniform_int_distribution<int>(2, 9)(rng);
            madison[j] = 10 * doc[j];
            hamilton[j] = j < 10 ? 40 : 100;
        }
        const auto a = attribute_by_hc(doc, hamilton, madison, words(v));
        CHECK(a.author == Author::Madison);
        CHECK(a.diff > 0);
        CHECK(a.diff == doctest::Approx(a.d_hamilton - a.d_madison));

        const auto tie = attribute_by_hc(doc, madison, madison, words(v));
        CHECK(tie.diff == 0.0);
        const std::vector<std::int64_t> empty(v, 0);
        CHECK(error_kind([&] { attribute_by_hc(doc, empty, madison, words(v)); }) == ErrorKind::EmptyInput);
    }

    TEST_CASE("BH and Bonferroni examples") {
        const std::vector<double> zeros(5, 0.0);
        CHECK(bh_select(zeros, 0.1).size() == 5);
        CHECK(bonferroni_select(zeros, 0.05).size() == 5);
        CHECK(bh_select(std::vector<double>{0.01, 0.02, 0.9}, 0.1) == std::vector<std::size_t>{0, 1});
        CHECK(bonferroni_select(std::vector<double>{0.01, 0.02, 0.9}, 0.05) == std::vector<std::size_t>{0});
        CHECK(bh_select(std::vector<double>{}, 0.1).empty());
    }

    TEST_CASE("BH monotone in fdr and contains Bonferroni on fuzzed p-vectors") {
        std::mt19937_64 rng(15);
        std::uniform_real_distribution<double> u(0, 1);
        for (int trial = 0; trial < 500; ++trial) {
            const int n = std::uniform_int_distribution<int>(1, 80)(rng);
            std::vector<double> p(static_cast<std::size_t>(n));
            for (auto& x : p) x = trial % 2 ? std::pow(u(rng), 4) : u(rng);
            const double a = std::uniform_real_distribution<double>(0.001, 0.5)(rng);
            const double b = std::uniform_real_distribution<double>(a, 0.9)(rng);
            const auto bh_a = bh_select(p, a);
            CHECK(bh_a == brute_bh(p, a));
            CHECK(subset(bh_a, bh_select(p, b)));
            CHECK(subset(bonferroni_select(p, a), bh_a));
            // Lowering p-values can only grow the selection.
            auto lower = p;
            for (auto& x : lower) x *= 0.5;
            CHECK(subset(bh_a, bh_select(lower, a)));
        }
    }

    TEST_CASE("screen report and word cloud") {
        PValueTable t;
        t.words = {"upon", "whilst", "the"};
        t.p = {1e-12, 0.001, 0.0};
        t.log_p = {std::log(1e-12), std::log(0.001), -std::numeric_limits<double>::infinity()};
        t.m = {10, 4, 30};
        t.q = {0.5, 0.5, 0.5};
        const auto hc = hc_statistic(t, 0.2);
        std::ostringstream json;
        write_screen_report_json(t, hc, bh_select(t.p, 0.1), bonferroni_select(t.p, 0.05), {}, json);
        CHECK(json.str().find("\"bonferroni\"") != std::string::npos);
        CHECK(json.str().find("\"statistic\": null") != std::string::npos);
        std::ostringstream csv;
        write_wordcloud_csv(t, csv);
        CHECK(csv.str().rfind("word,weight\n", 0) == 0);
        const auto at = csv.str().find("upon,");
        REQUIRE(at != std::string::npos);
        CHECK(std::stod(csv.str().substr(at + 5)) == doctest::Approx(12.0));
        CHECK(csv.str().find("the,400") != std::string::npos);
    }
}
