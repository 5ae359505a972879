#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "stylus/eval.hpp"

using namespace stylus;
using stylus::testing::error_kind;

namespace {

using V = std::vector<double>;

/// F1 for every candidate threshold, written out from the confusion counts.
double f1_at(const V& p, const V& y, double t) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool pred = p[i] > t;
        tp += pred && y[i] == 1;
        fp += pred && y[i] == 0;
        fn += !pred && y[i] == 1;
    }
    return tp == 0 ? 0 : 2 * tp / (2 * tp + fp + fn);
}

}  // namespace

TEST_SUITE("eval") {
    TEST_CASE("l2 loss") {
        CHECK(l2_loss(V{0.5, 0.5, 0.5, 0.5}, V{0, 1, 0, 1}) == doctest::Approx(0.25));
        CHECK(l2_loss(V{0, 1, 1}, V{0, 1, 1}) == 0);
        CHECK(error_kind([] { l2_loss(V{}, V{}); }) == ErrorKind::EmptyInput);
        CHECK(error_kind([] { l2_loss(V{0.1}, V{0, 1}); }) == ErrorKind::DimensionMismatch);
    }

    TEST_CASE("Youden threshold") {
        CHECK(youden_threshold(V{0.1, 0.2, 0.8, 0.9}, V{0, 0, 1, 1}) == doctest::Approx(0.5));
        CHECK(youden_threshold(V{0.4, 0.4, 0.4, 0.4}, V{0, 1, 0, 1}) == 0.0);
        CHECK(error_kind([] { youden_threshold(V{0.2, 0.3}, V{1, 1}); }) == ErrorKind::SingleClass);
        CHECK(threshold_candidates(V{0.8, 0.2, 0.2, 0.5}) == V{0, 0.35, 0.65, 1});
    }

    TEST_CASE("F1 threshold") {
        CHECK(f1_threshold(V{0.1, 0.2, 0.8, 0.9}, V{0, 0, 1, 1}) == doctest::Approx(0.5));
        const V p{0.2, 0.4, 0.6, 0.8}, y{0, 1, 0, 1};
        CHECK(f1_threshold(p, y) == doctest::Approx(0.3));
        double best = -1, arg = 0;
        for (double t : {0.0, 0.3, 0.5, 0.7, 1.0})
            if (f1_at(p, y, t) > best) {
                best = f1_at(p, y, t);
                arg = t;
            }
        CHECK(arg == doctest::Approx(0.3));
        CHECK(best == doctest::Approx(0.8));
        CHECK(f1_threshold(V{0.3, 0.6, 0.7}, V{1, 1, 1}) < 0.3);
    }

    TEST_CASE("Youden and F1 against exhaustive search on random data") {
        std::mt19937_64 rng(51);
        std::uniform_real_distribution<double> u(0, 1);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = std::uniform_int_distribution<int>(2, 30)(rng);
            V p(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                p[static_cast<std::size_t>(i)] = std::round(u(rng) * 20) / 20;
                y[static_cast<std::size_t>(i)] = i % 2;
            }
            std::vector<double> grid{0, 1};
            auto s = p;
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            for (std::size_t k = 1; k < s.size(); ++k) grid.push_back((s[k - 1] + s[k]) / 2);
            std::sort(grid.begin(), grid.end());
            double best_j = -2, arg_j = 0, best_f = -1, arg_f = 0;
            for (double t : grid) {
                const auto c = confusion(p, y, t);
                const double j = static_cast<double>(c.tp) / (c.tp + c.fn) + static_cast<double>(c.tn) / (c.tn + c.fp) - 1;
                if (j > best_j + 1e-12) {
                    best_j = j;
                    arg_j = t;
                }
                if (f1_at(p, y, t) > best_f + 1e-12) {
                    best_f = f1_at(p, y, t);
                    arg_f = t;
                }
            }
            CHECK(youden_threshold(p, y) == doctest::Approx(arg_j));
            CHECK(f1_threshold(p, y) == doctest::Approx(arg_f));
        }
    }

    TEST_CASE("classification error and confusion") {
        CHECK(classification_error(V{0.1, 0.2, 0.8, 0.9}, V{0, 0, 1, 1}, 0.5) == 0);
        CHECK(classification_error(V{0.1, 0.2, 0.8, 0.9}, V{1, 1, 0, 0}, 0.5) == 1);
        const auto c = confusion(V{0.1, 0.6, 0.7, 0.3}, V{0, 0, 1, 1}, 0.5);
        CHECK(c.tp == 1);
        CHECK(c.fp == 1);
        CHECK(c.tn == 1);
        CHECK(c.fn == 1);
        const auto r = threshold_report(V{0.1, 0.2, 0.8, 0.9}, V{0, 0, 1, 1});
        CHECK(r.fixed == 0.3);
        CHECK(r.error_roc == 0);
        CHECK(r.error_fixed == 0);
    }

    TEST_CASE("KDE of two points is symmetric") {
        const auto curve = kde(V{0, 1});
        const auto n = curve.density.size();
        REQUIRE(n == 512);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(curve.density[i] - curve.density[n - 1 - i]) < 1e-9);
        const auto left = std::max_element(curve.density.begin(), curve.density.begin() + 256);
        const auto right = std::max_element(curve.density.begin() + 256, curve.density.end());
        CHECK(std::abs(*left - *right) < 1e-9);
        CHECK(trapezoid(curve.grid, curve.density) == doctest::Approx(1.0).epsilon(1e-3));
    }

    TEST_CASE("KDE mode of a normal sample") {
        std::mt19937_64 rng(52);
        std::normal_distribution<double> g(0.5, 0.1);
        double mode_sum = 0;
        for (int rep = 0; rep < 20; ++rep) {
            V x(10000);
            for (auto& v : x) v = g(rng);
            const auto curve = kde(x);
            CHECK_FALSE(curve.degenerate);
            const auto at = std::max_element(curve.density.begin(), curve.density.end()) - curve.density.begin();
            const double mode = curve.grid[static_cast<std::size_t>(at)];
            mode_sum += mode;
            // Direct evaluation of the kernel sum around the peak.
            const double step = curve.grid[1] - curve.grid[0];
            double best = -1, arg = 0;
            for (double t = mode - 5 * step; t <= mode + 5 * step; t += step / 20) {
                double s = 0;
                for (double v : x) s += std::exp(-0.5 * (t - v) * (t - v) / (curve.bandwidth * curve.bandwidth));
                if (s > best) {
                    best = s;
                    arg = t;
                }
            }
            CHECK(std::abs(mode - arg) <= step);
        }
        CHECK(std::abs(mode_sum / 20 - 0.5) < 0.02);
    }

    TEST_CASE("bandwidth") {
        const V x{1, 2, 3, 4, 5};
        const double sd = std::sqrt(2.5);
        const double iqr = 2.0;
        CHECK(silverman_bandwidth(x) == doctest::Approx(0.9 * std::min(sd, iqr / 1.34) * std::pow(5.0, -0.2)));
        CHECK(silverman_bandwidth(V{2, 2, 2}) > 0);
        CHECK(kde(V{0.3, 0.3, 0.3}).degenerate);
        CHECK(error_kind([] { kde(V{}); }) == ErrorKind::EmptyInput);
    }

    TEST_CASE("density curves share a grid") {
        const auto d = density_curve(V{0.01, 0.05, 0.1, 0.02}, V{0.9, 0.95, 0.8}, V{0.7, 0.99});
        CHECK(d.grid.size() == d.hamilton.size());
        CHECK(d.grid.size() == d.madison.size());
        CHECK(trapezoid(d.grid, d.hamilton) == doctest::Approx(1.0).epsilon(1e-2));
        CHECK(trapezoid(d.grid, d.madison) == doctest::Approx(1.0).epsilon(1e-2));
        CHECK(d.disputed_marks == V{0.7, 0.99});
        std::ostringstream out;
        write_density_csv(d, out);
        CHECK(out.str().rfind("series,x,density\n", 0) == 0);
        std::istringstream lines(out.str());
        int disputed = 0;
        for (std::string line; std::getline(lines, line);) disputed += line.rfind("disputed,", 0) == 0;
        CHECK(disputed == 2);
    }

    TEST_CASE("leave-one-out") {
        Eigen::MatrixXd X(5, 1);
        X << 1, 2, 3, 4, 5;
        Eigen::VectorXd y(5);
        y << 0, 0, 1, 1, 1;
        std::vector<std::uint64_t> seeds(5);
        const FoldPredictor mean_label = [&](const Eigen::MatrixXd& xt, const Eigen::VectorXd& yt,
                                             const Eigen::RowVectorXd& x, std::uint64_t seed) {
            CHECK(xt.rows() == 4);
            seeds[static_cast<std::size_t>(x(0)) - 1] = seed;
            return yt.mean();
        };
        const auto r = loocv(X, y, {10, 11, 12, 13, 14}, mean_label, 100, 1, "mean");
        CHECK(r.probs(0) == doctest::Approx(0.75));
        CHECK(r.probs(4) == doctest::Approx(0.5));
        CHECK(seeds == std::vector<std::uint64_t>{100, 101, 102, 103, 104});
        double l2 = 0;
        for (int i = 0; i < 5; ++i) l2 += (r.probs(i) - y(i)) * (r.probs(i) - y(i));
        CHECK(r.l2_loss == doctest::Approx(l2 / 5));

        const FoldPredictor failing = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, const Eigen::RowVectorXd& x,
                                         std::uint64_t) -> double {
            if (x(0) == 3) throw Error(ErrorKind::SingleClass, "one class");
            return 0.5;
        };
        try {
            loocv(X, y, {10, 11, 12, 13, 14}, failing, 0);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SingleClass);
            CHECK(std::string(e.what()) == "SingleClass: fold 2 (paper 12): one class");
        }
    }

    TEST_CASE("parallel folds match the serial run") {
        std::mt19937_64 rng(53);
        std::normal_distribution<double> g;
        Eigen::MatrixXd X(12, 2);
        Eigen::VectorXd y(12);
        for (int i = 0; i < 12; ++i) {
            X(i, 0) = g(rng);
            X(i, 1) = g(rng);
            y(i) = i % 3 == 0;
        }
        std::vector<int> ids(12);
        for (int i = 0; i < 12; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
        const FoldPredictor noisy = [](const Eigen::MatrixXd& xt, const Eigen::VectorXd&, const Eigen::RowVectorXd& x,
                                       std::uint64_t seed) {
            std::mt19937_64 r(seed);
            return std::uniform_real_distribution<double>(0, 1)(r) * 0.5 + 0.01 * x(0) * xt.rows() / 100;
        };
        CHECK(loocv(X, y, ids, noisy, 7, 1).probs == loocv(X, y, ids, noisy, 7, 4).probs);
    }
}
