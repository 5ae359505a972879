#include "stylus/bart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "stylus/error.hpp"

namespace stylus {
namespace {

using Tree = std::vector<TreeNode>;

enum class Move { Grow, Prune, Change };

struct Data {
    std::size_t n = 0;
    int p = 0;
    std::vector<int> rank;                 // n x p, row-major: index of x in the feature's cutpoints
    std::vector<int> last_cut;             // highest usable cut index per feature, -1 if none
    std::vector<int> splittable;           // features with at least one usable cut
    int at(std::size_t i, int v) const { return rank[i * static_cast<std::size_t>(p) + static_cast<std::size_t>(v)]; }
};

int depth(const Tree& t, int node) {
    int d = 0;
    while (t[static_cast<std::size_t>(node)].parent >= 0) {
        node = t[static_cast<std::size_t>(node)].parent;
        ++d;
    }
    return d;
}

/// Cut-index range still usable for feature v at a node, given its ancestors' rules.
std::pair<int, int> cut_range(const Tree& t, const Data& data, int node, int v) {
    int lo = 0;
    int hi = data.last_cut[static_cast<std::size_t>(v)];
    int cur = node;
    while (t[static_cast<std::size_t>(cur)].parent >= 0) {
        const auto& par = t[static_cast<std::size_t>(t[static_cast<std::size_t>(cur)].parent)];
        if (par.var == v) {
            if (par.left == cur) hi = std::min(hi, par.cut - 1);
            else lo = std::max(lo, par.cut + 1);
        }
        cur = t[static_cast<std::size_t>(cur)].parent;
    }
    return {lo, hi};
}

/// Number of features with a nonempty cut range at the node. Only ancestor
/// features can be exhausted, so the count starts from the splittable set.
int available_vars(const Tree& t, const Data& data, int node) {
    std::vector<int> seen;
    int exhausted = 0;
    int cur = node;
    while (t[static_cast<std::size_t>(cur)].parent >= 0) {
        const int v = t[static_cast<std::size_t>(t[static_cast<std::size_t>(cur)].parent)].var;
        if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
            seen.push_back(v);
            const auto [lo, hi] = cut_range(t, data, node, v);
            if (lo > hi) ++exhausted;
        }
        cur = t[static_cast<std::size_t>(cur)].parent;
    }
    return static_cast<int>(data.splittable.size()) - exhausted;
}

bool is_leaf(const TreeNode& n) { return n.var < 0; }

bool is_nog(const Tree& t, int node) {
    const auto& n = t[static_cast<std::size_t>(node)];
    return !is_leaf(n) && is_leaf(t[static_cast<std::size_t>(n.left)]) &&
           is_leaf(t[static_cast<std::size_t>(n.right)]);
}

std::vector<int> leaves(const Tree& t) {
    std::vector<int> out;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (is_leaf(t[i])) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> good_leaves(const Tree& t, const Data& data) {
    std::vector<int> out;
    for (int leaf : leaves(t))
        if (available_vars(t, data, leaf) > 0) out.push_back(leaf);
    return out;
}

std::vector<int> nogs(const Tree& t) {
    std::vector<int> out;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (is_nog(t, static_cast<int>(i))) out.push_back(static_cast<int>(i));
    return out;
}

/// Rebuilds the node array in depth-first order from the root; new_index maps
/// old positions to new ones (-1 for dropped nodes).
Tree compact(const Tree& t, std::vector<int>& new_index) {
    Tree out;
    new_index.assign(t.size(), -1);
    struct Item { int old; int parent; bool left; };
    std::vector<Item> todo{{0, -1, false}};
    while (!todo.empty()) {
        const Item it = todo.back();
        todo.pop_back();
        TreeNode node = t[static_cast<std::size_t>(it.old)];
        const int idx = static_cast<int>(out.size());
        new_index[static_cast<std::size_t>(it.old)] = idx;
        node.parent = it.parent;
        if (it.parent >= 0) {
            if (it.left) out[static_cast<std::size_t>(it.parent)].left = idx;
            else out[static_cast<std::size_t>(it.parent)].right = idx;
        }
        const int l = node.left, r = node.right;
        node.left = node.right = -1;
        out.push_back(node);
        if (!is_leaf(node)) {
            todo.push_back({r, idx, false});
            todo.push_back({l, idx, true});
        }
    }
    return out;
}

int leaf_of(const Tree& t, const Data& data, std::size_t i) {
    int node = 0;
    while (!is_leaf(t[static_cast<std::size_t>(node)])) {
        const auto& n = t[static_cast<std::size_t>(node)];
        node = data.at(i, n.var) <= n.cut ? n.left : n.right;
    }
    return node;
}

struct LeafStats {
    std::vector<int> count;
    std::vector<double> sum;
};

LeafStats leaf_stats(const Tree& t, const Data& data, const std::vector<double>& r,
                     std::vector<int>& assignment) {
    LeafStats s;
    s.count.assign(t.size(), 0);
    s.sum.assign(t.size(), 0.0);
    assignment.resize(data.n);
    for (std::size_t i = 0; i < data.n; ++i) {
        const int leaf = leaf_of(t, data, i);
        assignment[i] = leaf;
        ++s.count[static_cast<std::size_t>(leaf)];
        s.sum[static_cast<std::size_t>(leaf)] += r[i];
    }
    return s;
}

class Sampler {
public:
    Sampler(const Data& data, const BartParams& params, std::mt19937_64& rng)
        : data_(data), params_(params), rng_(rng),
          tau2_(std::pow(3.0 / (params.k * std::sqrt(static_cast<double>(params.trees))), 2)) {}

    double tau2() const { return tau2_; }

    /// One Metropolis-Hastings tree move followed by a draw of the leaf values.
    void update(Tree& t, const std::vector<double>& r) {
        std::vector<int> assign;
        LeafStats stats = leaf_stats(t, data_, r, assign);
        const bool stump = t.size() == 1;
        Move move = Move::Grow;
        if (!stump) {
            const double u = unif_(rng_);
            move = u < 0.4 ? Move::Grow : (u < 0.8 ? Move::Prune : Move::Change);
        }
        if (move == Move::Grow) grow(t, stats, assign, r);
        else if (move == Move::Prune) prune(t, stats, r);
        else change(t, stats, assign, r);

        stats = leaf_stats(t, data_, r, assign);
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (!is_leaf(t[k])) continue;
            const double var = 1.0 / (1.0 / tau2_ + stats.count[k]);
            t[k].value = var * stats.sum[k] + std::sqrt(var) * gauss_(rng_);
        }
    }

private:
    double split_prob(const Tree& t, int node) const {
        if (available_vars(t, data_, node) == 0) return 0.0;
        return params_.split_alpha * std::pow(1.0 + depth(t, node), -params_.split_beta);
    }

    double log_marginal(int count, double sum) const {
        const double a = 1.0 + count * tau2_;
        return -0.5 * std::log(a) + 0.5 * tau2_ * sum * sum / a;
    }

    /// Uniform draw of a feature usable at the node and a cut index in its range.
    std::pair<int, int> draw_rule(const Tree& t, int node, int& n_cuts) {
        std::uniform_int_distribution<std::size_t> pick(0, data_.splittable.size() - 1);
        for (;;) {
            const int v = data_.splittable[pick(rng_)];
            const auto [lo, hi] = cut_range(t, data_, node, v);
            if (lo > hi) continue;
            n_cuts = hi - lo + 1;
            std::uniform_int_distribution<int> cut(lo, hi);
            return {v, cut(rng_)};
        }
    }

    bool accept(double log_ratio) {
        return log_ratio >= 0 || std::log(unif_(rng_)) < log_ratio;
    }

    void grow(Tree& t, const LeafStats& stats, const std::vector<int>& assign,
              const std::vector<double>& r) {
        const auto good = good_leaves(t, data_);
        if (good.empty()) return;
        const int node = good[std::uniform_int_distribution<std::size_t>(0, good.size() - 1)(rng_)];
        const int n_vars = available_vars(t, data_, node);
        int n_cuts = 0;
        const auto [v, c] = draw_rule(t, node, n_cuts);

        int nl = 0, nr = 0;
        double sl = 0, sr = 0;
        for (std::size_t i = 0; i < data_.n; ++i) {
            if (assign[i] != node) continue;
            if (data_.at(i, v) <= c) { ++nl; sl += r[i]; }
            else { ++nr; sr += r[i]; }
        }
        if (nl < params_.min_leaf || nr < params_.min_leaf) return;

        Tree next = t;
        const int l = static_cast<int>(next.size());
        next.push_back(TreeNode{-1, 0, -1, -1, node, 0.0});
        next.push_back(TreeNode{-1, 0, -1, -1, node, 0.0});
        auto& n = next[static_cast<std::size_t>(node)];
        n.var = v;
        n.cut = c;
        n.left = l;
        n.right = l + 1;

        const double pg = split_prob(t, node);
        const double log_prior = std::log(pg) + std::log1p(-split_prob(next, l)) +
                                 std::log1p(-split_prob(next, l + 1)) - std::log1p(-pg);
        const double p_grow = t.size() == 1 ? 1.0 : 0.4;
        const double log_proposal = std::log(0.4) - std::log(p_grow) + std::log(good.size()) +
                                    std::log(n_vars) + std::log(n_cuts) -
                                    std::log(nogs(next).size());
        const double log_lik = log_marginal(nl, sl) + log_marginal(nr, sr) -
                               log_marginal(stats.count[static_cast<std::size_t>(node)],
                                            stats.sum[static_cast<std::size_t>(node)]);
        if (accept(log_prior + log_proposal + log_lik)) t = std::move(next);
    }

    void prune(Tree& t, const LeafStats& stats, const std::vector<double>&) {
        const auto candidates = nogs(t);
        const int node = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
        const auto& n = t[static_cast<std::size_t>(node)];
        const auto l = static_cast<std::size_t>(n.left), r = static_cast<std::size_t>(n.right);

        Tree next = t;
        auto& m = next[static_cast<std::size_t>(node)];
        m.var = -1;
        m.cut = 0;
        std::vector<int> new_index;
        Tree compacted = compact(next, new_index);
        const int merged = new_index[static_cast<std::size_t>(node)];

        const double pg = split_prob(compacted, merged);
        const double log_prior = -(std::log(pg) + std::log1p(-split_prob(t, n.left)) +
                                   std::log1p(-split_prob(t, n.right)) - std::log1p(-pg));
        const double p_grow = compacted.size() == 1 ? 1.0 : 0.4;
        int n_cuts = 0;
        {
            const auto [lo, hi] = cut_range(compacted, data_, merged, n.var);
            n_cuts = hi - lo + 1;
        }
        const double log_proposal = std::log(p_grow) - std::log(0.4) + std::log(candidates.size()) -
                                    std::log(good_leaves(compacted, data_).size()) -
                                    std::log(available_vars(compacted, data_, merged)) - std::log(n_cuts);
        const double log_lik = log_marginal(stats.count[l] + stats.count[r], stats.sum[l] + stats.sum[r]) -
                               log_marginal(stats.count[l], stats.sum[l]) -
                               log_marginal(stats.count[r], stats.sum[r]);
        if (accept(log_prior + log_proposal + log_lik)) t = std::move(compacted);
    }

    void change(Tree& t, const LeafStats& stats, const std::vector<int>& assign,
                const std::vector<double>& r) {
        const auto candidates = nogs(t);
        const int node = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
        int n_cuts = 0;
        const auto [v, c] = draw_rule(t, node, n_cuts);
        const auto& n = t[static_cast<std::size_t>(node)];
        const auto l = static_cast<std::size_t>(n.left), rr = static_cast<std::size_t>(n.right);

        int nl = 0, nr = 0;
        double sl = 0, sr = 0;
        for (std::size_t i = 0; i < data_.n; ++i) {
            if (assign[i] != n.left && assign[i] != n.right) continue;
            if (data_.at(i, v) <= c) { ++nl; sl += r[i]; }
            else { ++nr; sr += r[i]; }
        }
        if (nl < params_.min_leaf || nr < params_.min_leaf) return;

        Tree next = t;
        next[static_cast<std::size_t>(node)].var = v;
        next[static_cast<std::size_t>(node)].cut = c;
        const double log_prior = std::log1p(-split_prob(next, n.left)) + std::log1p(-split_prob(next, n.right)) -
                                 std::log1p(-split_prob(t, n.left)) - std::log1p(-split_prob(t, n.right));
        const double log_lik = log_marginal(nl, sl) + log_marginal(nr, sr) -
                               log_marginal(stats.count[l], stats.sum[l]) -
                               log_marginal(stats.count[rr], stats.sum[rr]);
        if (accept(log_prior + log_lik)) t = std::move(next);
    }

    const Data& data_;
    const BartParams& params_;
    std::mt19937_64& rng_;
    double tau2_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> gauss_;
};

/// Standard normal draw conditioned on exceeding a.
double truncated_normal_above(double a, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (a <= 0) {
        for (;;) {
            const double z = gauss(rng);
            if (z > a) return z;
        }
    }
    const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
    std::exponential_distribution<double> expo(rate);
    for (;;) {
        const double z = a + expo(rng);
        if (unif(rng) <= std::exp(-0.5 * (z - rate) * (z - rate))) return z;
    }
}

double clamp_probability(double p) {
    return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double quantile_sorted(const std::vector<double>& v, double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0 && p < 1)) throw Error(ErrorKind::InvalidParam, "normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double BartModel::latent(std::size_t draw, const double* x) const {
    const auto& forest = draws.at(draw);
    double total = offset;
    for (int root : forest.roots) {
        int node = root;
        while (forest.nodes[static_cast<std::size_t>(node)].var >= 0) {
            const auto& n = forest.nodes[static_cast<std::size_t>(node)];
            node = x[n.var] <= cutpoints[static_cast<std::size_t>(n.var)][static_cast<std::size_t>(n.cut)]
                       ? n.left
                       : n.right;
        }
        total += forest.nodes[static_cast<std::size_t>(node)].value;
    }
    return total;
}

BartModel bart_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BartParams& params) {
    if (X.rows() != y.size()) throw Error(ErrorKind::DimensionMismatch, "feature rows and labels differ in length");
    if (!X.allFinite()) throw Error(ErrorKind::NonFiniteFeature, "feature matrix has non-finite entries");
    if (params.trees < 1 || params.draws < 1 || params.burn_in < 0 || params.min_leaf < 1 || params.k <= 0 ||
        !(params.split_alpha > 0 && params.split_alpha < 1) || params.split_beta < 0)
        throw Error(ErrorKind::InvalidParam, "invalid BART parameters");
    bool zero = false, one = false;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) == 0) zero = true;
        else if (y(i) == 1) one = true;
        else throw Error(ErrorKind::InvalidParam, "labels must be 0 or 1");
    }
    if (!zero || !one) throw Error(ErrorKind::SingleClass, "labels contain a single class");

    BartModel model;
    model.params = params;
    model.features = static_cast<int>(X.cols());
    model.offset = normal_quantile(y.mean());

    Data data;
    data.n = static_cast<std::size_t>(X.rows());
    data.p = static_cast<int>(X.cols());
    data.rank.resize(data.n * static_cast<std::size_t>(data.p));
    for (int v = 0; v < data.p; ++v) {
        std::vector<double> values(X.col(v).data(), X.col(v).data() + X.rows());
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i < data.n; ++i) {
            const double x = X(static_cast<Eigen::Index>(i), v);
            data.rank[i * static_cast<std::size_t>(data.p) + static_cast<std::size_t>(v)] =
                static_cast<int>(std::lower_bound(values.begin(), values.end(), x) - values.begin());
        }
        data.last_cut.push_back(static_cast<int>(values.size()) - 2);
        if (values.size() >= 2) data.splittable.push_back(v);
        model.cutpoints.push_back(std::move(values));
    }

    std::mt19937_64 rng(params.seed);
    Sampler sampler(data, params, rng);
    const auto m = static_cast<std::size_t>(params.trees);
    std::vector<Tree> trees(m, Tree{TreeNode{}});
    std::vector<double> fit(data.n * m, 0.0);  // per-tree fitted values, tree-major
    std::vector<double> total(data.n, 0.0);
    std::vector<double> z(data.n, 0.0), r(data.n, 0.0);
    std::vector<int> assign;

    const int iterations = params.burn_in + params.draws;
    model.draws.reserve(static_cast<std::size_t>(params.draws));
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < data.n; ++i) {
            const double mean = model.offset + total[i];
            if (y(static_cast<Eigen::Index>(i)) == 1) z[i] = mean + truncated_normal_above(-mean, rng);
            else z[i] = mean - truncated_normal_above(mean, rng);
        }
        for (std::size_t j = 0; j < m; ++j) {
            double* g = fit.data() + j * data.n;
            for (std::size_t i = 0; i < data.n; ++i) r[i] = z[i] - model.offset - (total[i] - g[i]);
            sampler.update(trees[j], r);
            for (std::size_t i = 0; i < data.n; ++i) {
                const double value = trees[j][static_cast<std::size_t>(leaf_of(trees[j], data, i))].value;
                total[i] += value - g[i];
                g[i] = value;
            }
        }
        if (it < params.burn_in) continue;
        Forest forest;
        for (const auto& t : trees) {
            const int base = static_cast<int>(forest.nodes.size());
            forest.roots.push_back(base);
            for (TreeNode node : t) {
                if (node.left >= 0) node.left += base;
                if (node.right >= 0) node.right += base;
                if (node.parent >= 0) node.parent += base;
                forest.nodes.push_back(node);
            }
        }
        model.draws.push_back(std::move(forest));
    }
    return model;
}

BartPrediction bart_predict(const BartModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.features)
        throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(model.features) +
                                                      " features, got " + std::to_string(X.cols()));
    const auto D = static_cast<Eigen::Index>(model.draws.size());
    BartPrediction out;
    out.prob.resize(X.rows());
    out.lo95.resize(X.rows());
    out.hi95.resize(X.rows());
    out.draws.resize(X.rows(), D);
    std::vector<double> x(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index v = 0; v < X.cols(); ++v) x[static_cast<std::size_t>(v)] = X(i, v);
        std::vector<double> probs(static_cast<std::size_t>(D));
        for (Eigen::Index d = 0; d < D; ++d) {
            const double p = clamp_probability(normal_cdf(model.latent(static_cast<std::size_t>(d), x.data())));
            out.draws(i, d) = p;
            probs[static_cast<std::size_t>(d)] = p;
        }
        out.prob(i) = out.draws.row(i).mean();
        std::sort(probs.begin(), probs.end());
        out.lo95(i) = probs.empty() ? out.prob(i) : quantile_sorted(probs, 0.025);
        out.hi95(i) = probs.empty() ? out.prob(i) : quantile_sorted(probs, 0.975);
    }
    return out;
}

void write_bart_draws(const BartModel& model, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "offset " << model.offset << '\n';
    for (std::size_t d = 0; d < model.draws.size(); ++d) {
        const auto& f = model.draws[d];
        out << "draw " << d << ' ' << f.roots.size() << ' ' << f.nodes.size() << '\n';
        for (const auto& n : f.nodes)
            out << n.var << ' ' << n.cut << ' ' << n.left << ' ' << n.right << ' ' << n.value << '\n';
    }
    out.precision(old_precision);
}

}  // namespace stylus
