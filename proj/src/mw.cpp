#include "stylus/mw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "stylus/error.hpp"

namespace stylus {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_beta_density(double x, double a, double b) {
    if (x <= 0 || x >= 1) return kNegInf;
    return (a - 1) * std::log(x) + (b - 1) * std::log1p(-x) + std::lgamma(a + b) - std::lgamma(a) -
           std::lgamma(b);
}

double log_gamma_density(double x, double shape, double rate) {
    if (x <= 0) return kNegInf;
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1) * std::log(x) - rate * x;
}

void check_counts(const AuthorCounts& a, const char* who) {
    if (a.counts.size() != a.lengths.size())
        throw Error(ErrorKind::DimensionMismatch, std::string(who) + " counts and lengths differ in size");
    for (std::size_t i = 0; i < a.counts.size(); ++i) {
        if (a.counts[i] < 0) throw Error(ErrorKind::InvalidParam, "negative word count");
        if (!(a.lengths[i] > 0)) throw Error(ErrorKind::InvalidParam, "paper length must be positive");
    }
}

double author_log_lik(const AuthorCounts& a, double mu, double delta) {
    double total = 0;
    for (std::size_t i = 0; i < a.counts.size(); ++i)
        total += nb_log_pmf(a.counts[i], mu * a.lengths[i] / 1000.0, delta);
    return total;
}

/// Maximizer of f over [lo, hi] by golden-section search.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200; ++it) {
        if (b - a <= tol * std::max(std::abs(a) + std::abs(b), 1e-9) * 0.5) break;
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? c : d;
}

}  // namespace

double nb_log_pmf(std::int64_t x, double mu, double delta) {
    if (x < 0 || !(mu >= 0) || !std::isfinite(mu) || !(delta >= 0) || !std::isfinite(delta))
        throw Error(ErrorKind::InvalidParam, "negative binomial needs x >= 0, mu >= 0, delta >= 0");
    const auto xd = static_cast<double>(x);
    if (mu == 0) return x == 0 ? 0.0 : kNegInf;
    if (delta < 1e-8) return xd * std::log(mu) - mu - std::lgamma(xd + 1);
    double total = 0;
    for (std::int64_t t = 0; t < x; ++t) total += std::log(mu + static_cast<double>(t) * delta);
    const double l1 = std::log1p(delta);
    return total - std::lgamma(xd + 1) - xd * l1 - (mu / delta) * l1;
}

double nb_pmf(std::int64_t x, double mu, double delta) { return std::exp(nb_log_pmf(x, mu, delta)); }

double nb_log_posterior(const AuthorCounts& hamilton, const AuthorCounts& madison,
                        const NbPriorConstants& priors, double sigma, double tau, double xi, double eta,
                        double sigma_max) {
    if (!(sigma > 0) || sigma > sigma_max || !(tau > 0 && tau < 1) || !(xi > 0) || !(eta > 0 && eta < 1))
        return kNegInf;
    const double mu_h = sigma * tau;
    const double mu_m = sigma * (1 - tau);
    const double delta_h = std::expm1(xi * eta);
    const double delta_m = std::expm1(xi * (1 - eta));
    const double a = priors.beta1 + priors.beta2 * sigma;
    return author_log_lik(hamilton, mu_h, delta_h) + author_log_lik(madison, mu_m, delta_m) +
           log_beta_density(tau, a, a) + log_beta_density(eta, priors.beta3, priors.beta3) +
           log_gamma_density(xi, priors.beta5, priors.beta5 / priors.beta4);
}

NbWordModel fit_word_params(const std::string& word, const AuthorCounts& hamilton,
                            const AuthorCounts& madison, const NbPriorConstants& priors,
                            const NbFitOptions& options) {
    check_counts(hamilton, "Hamilton");
    check_counts(madison, "Madison");
    const auto sum = [](const std::vector<std::int64_t>& v) {
        return std::accumulate(v.begin(), v.end(), std::int64_t{0});
    };
    const auto len = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
    const auto xh = sum(hamilton.counts), xm = sum(madison.counts);
    if (xh + xm == 0) throw Error(ErrorKind::NoOccurrences, "word '" + word + "' never occurs");
    const double lh = len(hamilton.lengths), lm = len(madison.lengths);
    if (lh <= 0 || lm <= 0) throw Error(ErrorKind::EmptyInput, "an author has no papers");

    const double pooled = 1000.0 * static_cast<double>(xh + xm) / (lh + lm);
    const double sigma_max = 10.0 * pooled;
    const double rate_h = 1000.0 * static_cast<double>(xh) / lh;
    const double rate_m = 1000.0 * static_cast<double>(xm) / lm;
    constexpr double kEdge = 1e-9;
    constexpr double kXiMax = 20.0;

    double sigma = std::clamp(rate_h + rate_m, sigma_max * 1e-6, sigma_max);
    double tau = std::clamp(rate_h / (rate_h + rate_m), 0.01, 0.99);
    double xi = priors.beta4;
    double eta = 0.5;
    auto post = [&](double s, double t, double x, double e) {
        return nb_log_posterior(hamilton, madison, priors, s, t, x, e, sigma_max);
    };

    NbWordModel model;
    model.word = word;
    for (model.cycles = 1; model.cycles <= options.max_cycles; ++model.cycles) {
        const double old[4] = {sigma, tau, xi, eta};
        sigma = golden_max([&](double v) { return post(v, tau, xi, eta); }, sigma_max * kEdge, sigma_max, options.tol);
        tau = golden_max([&](double v) { return post(sigma, v, xi, eta); }, kEdge, 1 - kEdge, options.tol);
        xi = golden_max([&](double v) { return post(sigma, tau, v, eta); }, kEdge, kXiMax, options.tol);
        eta = golden_max([&](double v) { return post(sigma, tau, xi, v); }, kEdge, 1 - kEdge, options.tol);
        const double now[4] = {sigma, tau, xi, eta};
        double change = 0;
        for (int k = 0; k < 4; ++k)
            change = std::max(change, std::abs(now[k] - old[k]) / std::max(std::abs(old[k]), 1e-12));
        if (change <= options.tol) break;
    }
    model.cycles = std::min(model.cycles, options.max_cycles);
    model.mu_h = sigma * tau;
    model.mu_m = sigma * (1 - tau);
    model.delta_h = std::expm1(xi * eta);
    model.delta_m = std::expm1(xi * (1 - eta));
    model.log_posterior = post(sigma, tau, xi, eta);
    return model;
}

OddsReport document_log_odds(int doc_id, std::span<const std::int64_t> doc_counts,
                             const std::vector<std::string>& vocab, double doc_length_words,
                             const std::vector<NbWordModel>& models, double prior_odds, bool strict) {
    if (doc_counts.size() != vocab.size())
        throw Error(ErrorKind::DimensionMismatch, "document counts are not aligned to the vocabulary");
    if (!(doc_length_words >= 1)) throw Error(ErrorKind::InvalidParam, "document length must be >= 1");
    if (!(prior_odds > 0)) throw Error(ErrorKind::InvalidParam, "prior odds must be positive");

    std::map<std::string, std::size_t> column;
    for (std::size_t j = 0; j < vocab.size(); ++j) column.emplace(vocab[j], j);
    std::map<std::string, const NbWordModel*> by_word;
    for (const auto& m : models) by_word.emplace(m.word, &m);
    if (strict)
        for (std::size_t j = 0; j < vocab.size(); ++j)
            if (doc_counts[j] > 0 && !by_word.count(vocab[j]))
                throw Error(ErrorKind::UncoveredWord, "no model for '" + vocab[j] + "'");

    OddsReport report;
    report.doc_id = doc_id;
    report.prior_log_odds = std::log(prior_odds);
    const double L = doc_length_words / 1000.0;
    double total = report.prior_log_odds;
    for (const auto& [word, m] : by_word) {
        const auto it = column.find(word);
        const std::int64_t x = it == column.end() ? 0 : doc_counts[it->second];
        const double c = nb_log_pmf(x, m->mu_h * L, m->delta_h) - nb_log_pmf(x, m->mu_m * L, m->delta_m);
        report.words.push_back(word);
        report.contributions.push_back(c);
        total += c;
    }
    report.total = total;
    return report;
}

void write_mw_models_csv(const std::vector<NbWordModel>& models, std::ostream& out) {
    out << "word,mu_H,mu_M,delta_H,delta_M\n";
    const auto old_precision = out.precision(17);
    for (const auto& m : models)
        out << m.word << ',' << m.mu_h << ',' << m.mu_m << ',' << m.delta_h << ',' << m.delta_m << '\n';
    out.precision(old_precision);
}

void write_odds_report_json(const std::vector<OddsReport>& reports, std::ostream& out) {
    using nlohmann::ordered_json;
    ordered_json docs = ordered_json::array();
    for (const auto& r : reports) {
        std::vector<std::size_t> order(r.words.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(r.contributions[a]) > std::abs(r.contributions[b]);
        });
        ordered_json top = ordered_json::array();
        for (std::size_t k = 0; k < std::min<std::size_t>(10, order.size()); ++k)
            top.push_back({{"word", r.words[order[k]]}, {"contribution", r.contributions[order[k]]}});
        docs.push_back({{"doc_id", r.doc_id},
                        {"prior_log_odds", r.prior_log_odds},
                        {"total", r.total},
                        {"favors", r.total < 0 ? "Madison" : "Hamilton"},
                        {"top_words", std::move(top)}});
    }
    out << ordered_json{{"documents", std::move(docs)}}.dump(2) << '\n';
}

}  // namespace stylus
