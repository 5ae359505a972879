#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stylus {

/// Negative binomial with mean mu and variance mu(1 + delta). delta below
/// 1e-8 falls back to Poisson(mu).
double nb_log_pmf(std::int64_t x, double mu, double delta);
double nb_pmf(std::int64_t x, double mu, double delta);

struct NbPriorConstants {
    double beta1 = 10;
    double beta2 = 0;
    double beta3 = 12;
    double beta4 = 0.83;
    double beta5 = 1.2;
};

/// Per-paper counts of one word and paper lengths in words.
struct AuthorCounts {
    std::vector<std::int64_t> counts;
    std::vector<double> lengths;
};

struct NbWordModel {
    std::string word;
    double mu_h = 0;  // per 1000 words
    double mu_m = 0;
    double delta_h = 0;
    double delta_m = 0;
    double log_posterior = 0;
    int cycles = 0;

    double kappa_h() const { return delta_h > 0 ? mu_h / delta_h : INFINITY; }
    double kappa_m() const { return delta_m > 0 ? mu_m / delta_m : INFINITY; }
};

struct NbFitOptions {
    double tol = 1e-6;
    int max_cycles = 200;
};

/// Posterior mode of (sigma, tau, xi, eta) under the word-rate prior, found by
/// cyclic golden-section search, mapped back to rates and non-Poissonness.
NbWordModel fit_word_params(const std::string& word, const AuthorCounts& hamilton,
                            const AuthorCounts& madison, const NbPriorConstants& priors = {},
                            const NbFitOptions& options = {});

/// Log posterior of the reparametrized model (exposed for tests).
double nb_log_posterior(const AuthorCounts& hamilton, const AuthorCounts& madison,
                        const NbPriorConstants& priors, double sigma, double tau, double xi,
                        double eta, double sigma_max);

struct OddsReport {
    int doc_id = 0;
    std::vector<std::string> words;       // sorted
    std::vector<double> contributions;    // aligned with words
    double prior_log_odds = 0;
    double total = 0;  // Hamilton : Madison; negative favors Madison
};

/// Log-odds of Hamilton to Madison for one document. Counts are aligned with
/// vocab; models for words outside vocab score a count of zero. In strict mode
/// an occurring vocab word without a model raises UncoveredWord.
OddsReport document_log_odds(int doc_id, std::span<const std::int64_t> doc_counts,
                             const std::vector<std::string>& vocab, double doc_length_words,
                             const std::vector<NbWordModel>& models, double prior_odds = 1.0,
                             bool strict = false);

/// mw_models.csv: word, mu_H, mu_M, delta_H, delta_M
void write_mw_models_csv(const std::vector<NbWordModel>& models, std::ostream& out);
/// odds_report.json: per-document totals and the ten largest contributions.
void write_odds_report_json(const std::vector<OddsReport>& reports, std::ostream& out);

}  // namespace stylus
