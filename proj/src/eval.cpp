#include "stylus/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "stylus/error.hpp"
#include "stylus/parallel.hpp"

namespace stylus {
namespace {

void check_aligned(std::span<const double> probs, std::span<const double> labels) {
    if (probs.size() != labels.size())
        throw Error(ErrorKind::DimensionMismatch, "probabilities and labels differ in length");
}

void check_both_classes(std::span<const double> labels) {
    if (labels.empty()) throw Error(ErrorKind::EmptyInput, "no labels");
    const bool pos = std::any_of(labels.begin(), labels.end(), [](double y) { return y == 1; });
    const bool neg = std::any_of(labels.begin(), labels.end(), [](double y) { return y == 0; });
    if (!pos || !neg) throw Error(ErrorKind::SingleClass, "labels contain a single class");
}

double quantile7(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double sample_sd(std::span<const double> x) {
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

/// Scans the candidates and keeps the first (smallest) maximizer of score.
template <class Score>
double best_threshold(std::span<const double> probs, std::span<const double> labels, Score&& score) {
    const auto candidates = threshold_candidates(probs);
    double best = candidates.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (double t : candidates) {
        const double s = score(confusion(probs, labels, t));
        if (s > best_score + 1e-12) {
            best_score = s;
            best = t;
        }
    }
    return best;
}

}  // namespace

LoocvResult loocv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& doc_ids,
                  const FoldPredictor& predictor, std::uint64_t base_seed, unsigned jobs,
                  std::string method) {
    const auto n = X.rows();
    if (y.size() != n || doc_ids.size() != static_cast<std::size_t>(n))
        throw Error(ErrorKind::DimensionMismatch, "features, labels and ids differ in length");
    if (n < 3) throw Error(ErrorKind::EmptyInput, "leave-one-out needs at least three rows");

    LoocvResult out;
    out.method = std::move(method);
    out.doc_ids = doc_ids;
    out.labels = y;
    out.probs = Eigen::VectorXd::Zero(n);
    parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t fold) {
        const auto i = static_cast<Eigen::Index>(fold);
        Eigen::MatrixXd xt(n - 1, X.cols());
        Eigen::VectorXd yt(n - 1);
        for (Eigen::Index r = 0, k = 0; r < n; ++r) {
            if (r == i) continue;
            xt.row(k) = X.row(r);
            yt(k) = y(r);
            ++k;
        }
        try {
            out.probs(i) = predictor(xt, yt, X.row(i), base_seed + fold);
        } catch (const Error& e) {
            throw Error(e.kind(), "fold " + std::to_string(fold) + " (paper " +
                                      std::to_string(doc_ids[fold]) + "): " + e.detail());
        }
    });
    out.l2_loss = l2_loss(std::span<const double>(out.probs.data(), static_cast<std::size_t>(n)),
                          std::span<const double>(out.labels.data(), static_cast<std::size_t>(n)));
    return out;
}

double l2_loss(std::span<const double> probs, std::span<const double> labels) {
    check_aligned(probs, labels);
    if (probs.empty()) throw Error(ErrorKind::EmptyInput, "no predictions");
    double total = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) total += (probs[i] - labels[i]) * (probs[i] - labels[i]);
    return total / static_cast<double>(probs.size());
}

Confusion confusion(std::span<const double> probs, std::span<const double> labels, double t) {
    check_aligned(probs, labels);
    Confusion c;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const bool predicted = probs[i] > t;
        const bool actual = labels[i] == 1;
        if (predicted && actual) ++c.tp;
        else if (predicted) ++c.fp;
        else if (actual) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double classification_error(std::span<const double> probs, std::span<const double> labels, double t) {
    const auto c = confusion(probs, labels, t);
    const int n = c.tp + c.fp + c.tn + c.fn;
    return n == 0 ? 0.0 : static_cast<double>(c.fp + c.fn) / n;
}

std::vector<double> threshold_candidates(std::span<const double> probs) {
    std::vector<double> sorted(probs.begin(), probs.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<double> out{0.0};
    for (std::size_t k = 1; k < sorted.size(); ++k) out.push_back(0.5 * (sorted[k - 1] + sorted[k]));
    out.push_back(1.0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double youden_threshold(std::span<const double> probs, std::span<const double> labels) {
    check_aligned(probs, labels);
    check_both_classes(labels);
    return best_threshold(probs, labels, [](const Confusion& c) {
        const double recall = static_cast<double>(c.tp) / (c.tp + c.fn);
        const double specificity = static_cast<double>(c.tn) / (c.tn + c.fp);
        return recall + specificity - 1;
    });
}

double f1_threshold(std::span<const double> probs, std::span<const double> labels) {
    check_aligned(probs, labels);
    if (probs.empty()) throw Error(ErrorKind::EmptyInput, "no predictions");
    return best_threshold(probs, labels, [](const Confusion& c) {
        const int denom = 2 * c.tp + c.fp + c.fn;
        return denom == 0 ? 0.0 : 2.0 * c.tp / denom;
    });
}

ThresholdReport threshold_report(std::span<const double> probs, std::span<const double> labels, double fixed) {
    ThresholdReport r;
    r.roc = youden_threshold(probs, labels);
    r.f1 = f1_threshold(probs, labels);
    r.fixed = fixed;
    r.error_roc = classification_error(probs, labels, r.roc);
    r.error_f1 = classification_error(probs, labels, r.f1);
    r.error_fixed = classification_error(probs, labels, r.fixed);
    r.confusion_roc = confusion(probs, labels, r.roc);
    r.confusion_f1 = confusion(probs, labels, r.f1);
    r.confusion_fixed = confusion(probs, labels, r.fixed);
    return r;
}

double silverman_bandwidth(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorKind::EmptyInput, "bandwidth needs at least two points");
    const std::vector<double> v(x.begin(), x.end());
    const double sd = sample_sd(x);
    const double iqr = quantile7(v, 0.75) - quantile7(v, 0.25);
    double lo = std::min(sd, iqr / 1.34);
    if (!(lo > 0)) lo = sd > 0 ? sd : (x[0] != 0 ? std::abs(x[0]) : 1.0);
    return 0.9 * lo * std::pow(static_cast<double>(x.size()), -0.2);
}

std::vector<double> kde_on_grid(std::span<const double> x, double bandwidth, std::span<const double> grid) {
    if (x.empty()) throw Error(ErrorKind::EmptyInput, "density of an empty sample");
    if (!(bandwidth > 0)) throw Error(ErrorKind::InvalidParam, "bandwidth must be positive");
    const double norm = 1.0 / (static_cast<double>(x.size()) * bandwidth * std::sqrt(2 * std::numbers::pi));
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double total = 0;
        for (double xi : x) {
            const double u = (grid[g] - xi) / bandwidth;
            total += std::exp(-0.5 * u * u);
        }
        out[g] = total * norm;
    }
    return out;
}

KdeCurve kde(std::span<const double> x, int points) {
    if (points < 2) throw Error(ErrorKind::InvalidParam, "density grid needs at least two points");
    KdeCurve curve;
    curve.bandwidth = silverman_bandwidth(x);
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    curve.degenerate = *lo_it == *hi_it;
    const double lo = *lo_it - 4 * curve.bandwidth;
    const double hi = *hi_it + 4 * curve.bandwidth;
    curve.grid.resize(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k)
        curve.grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
    curve.density = kde_on_grid(x, curve.bandwidth, curve.grid);
    return curve;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
    if (grid.size() != values.size()) throw Error(ErrorKind::DimensionMismatch, "grid and values differ in length");
    double total = 0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        total += 0.5 * (values[k] + values[k - 1]) * (grid[k] - grid[k - 1]);
    return total;
}

DensityCurve density_curve(std::span<const double> hamilton_probs, std::span<const double> madison_probs,
                           std::span<const double> disputed_probs, int points) {
    if (points < 2) throw Error(ErrorKind::InvalidParam, "density grid needs at least two points");
    const double hh = silverman_bandwidth(hamilton_probs);
    const double hm = silverman_bandwidth(madison_probs);
    const auto [h_lo, h_hi] = std::minmax_element(hamilton_probs.begin(), hamilton_probs.end());
    const auto [m_lo, m_hi] = std::minmax_element(madison_probs.begin(), madison_probs.end());
    const double lo = std::min(*h_lo - 4 * hh, *m_lo - 4 * hm);
    const double hi = std::max(*h_hi + 4 * hh, *m_hi + 4 * hm);
    DensityCurve curve;
    curve.grid.resize(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k)
        curve.grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
    curve.hamilton = kde_on_grid(hamilton_probs, hh, curve.grid);
    curve.madison = kde_on_grid(madison_probs, hm, curve.grid);
    curve.disputed_marks.assign(disputed_probs.begin(), disputed_probs.end());
    return curve;
}

void write_density_csv(const DensityCurve& curve, std::ostream& out) {
    out << "series,x,density\n";
    const auto old_precision = out.precision(17);
    for (std::size_t k = 0; k < curve.grid.size(); ++k)
        out << "hamilton," << curve.grid[k] << ',' << curve.hamilton[k] << '\n';
    for (std::size_t k = 0; k < curve.grid.size(); ++k)
        out << "madison," << curve.grid[k] << ',' << curve.madison[k] << '\n';
    for (double p : curve.disputed_marks) out << "disputed," << p << ",0\n";
    out.precision(old_precision);
}

}  // namespace stylus
