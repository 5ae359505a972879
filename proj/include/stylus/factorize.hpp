#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

namespace stylus {

enum class FactorMethod { LSA, NMF };

std::string_view to_string(FactorMethod m) noexcept;

/// X ~ S H with S n x p (document side) and H p x N (word side).
struct FactorModel {
    FactorMethod method = FactorMethod::LSA;
    Eigen::MatrixXd S;
    Eigen::MatrixXd H;
    int rank = 0;
    /// LSA: ||X - SH||_F. NMF: ||X - SH||_F^2.
    double objective = 0;
    std::vector<double> singular_values;  // LSA only
    std::vector<double> objective_trace;  // NMF only, one entry per iteration plus the initial value
};

struct LsaParams {
    int rank = 10;
    int oversample = 10;
    int max_iters = 300;
    double tol = 1e-13;
    std::uint64_t seed = 7;
};

/// Rank-p truncated SVD by randomized subspace iteration. S = U Sigma,
/// H = V^T; each singular vector pair is sign-normalized so the largest
/// entry of U's column is positive.
FactorModel lsa_fit(const Eigen::MatrixXd& X, const LsaParams& params);
inline FactorModel lsa_fit(const Eigen::MatrixXd& X, int rank) {
    LsaParams p;
    p.rank = rank;
    return lsa_fit(X, p);
}

struct NmfParams {
    int rank = 10;
    int iters = 500;
    std::uint64_t seed = 1;
};

/// Lee-Seung multiplicative updates for ||X - SH||_F^2.
FactorModel nmf_fit(const Eigen::MatrixXd& X, const NmfParams& params);

}  // namespace stylus
