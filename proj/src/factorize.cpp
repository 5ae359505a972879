#include "stylus/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "stylus/error.hpp"

namespace stylus {
namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& Y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
}

}  // namespace

std::string_view to_string(FactorMethod m) noexcept {
    return m == FactorMethod::LSA ? "lsa" : "nmf";
}

FactorModel lsa_fit(const Eigen::MatrixXd& X, const LsaParams& params) {
    const auto n = X.rows();
    const auto vocab = X.cols();
    const auto full = std::min(n, vocab);
    if (params.rank < 1 || params.rank > full)
        throw Error(ErrorKind::RankTooLarge, "rank " + std::to_string(params.rank) +
                                                 " exceeds min(n, N) = " + std::to_string(full));
    const Eigen::Index p = params.rank;
    const Eigen::Index width = std::min<Eigen::Index>(p + std::max(0, params.oversample), full);

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd omega(vocab, width);
    for (Eigen::Index j = 0; j < width; ++j)
        for (Eigen::Index i = 0; i < vocab; ++i) omega(i, j) = gauss(rng);

    Eigen::MatrixXd Q = orthonormal_basis(X * omega);
    Eigen::VectorXd previous = Eigen::VectorXd::Constant(p, -1.0);
    Eigen::MatrixXd U, V;
    Eigen::VectorXd sv;
    for (int iter = 0; iter < std::max(1, params.max_iters); ++iter) {
        const Eigen::MatrixXd B = Q.transpose() * X;  // width x N
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
        sv = svd.singularValues();
        U = Q * svd.matrixU();
        V = svd.matrixV();
        if (width == full) break;  // the sketch spans the whole row or column space
        const Eigen::VectorXd top = sv.head(p);
        const double scale = std::max(top(0), 1e-300);
        if ((top - previous).cwiseAbs().maxCoeff() <= params.tol * scale) break;
        previous = top;
        const Eigen::MatrixXd Z = orthonormal_basis(X.transpose() * Q);
        Q = orthonormal_basis(X * Z);
    }

    FactorModel model;
    model.method = FactorMethod::LSA;
    model.rank = static_cast<int>(p);
    model.S.resize(n, p);
    model.H.resize(p, vocab);
    for (Eigen::Index k = 0; k < p; ++k) {
        Eigen::VectorXd u = U.col(k);
        Eigen::VectorXd v = V.col(k);
        Eigen::Index arg = 0;
        u.cwiseAbs().maxCoeff(&arg);
        if (u(arg) < 0) {
            u = -u;
            v = -v;
        }
        model.S.col(k) = u * sv(k);
        model.H.row(k) = v.transpose();
        model.singular_values.push_back(sv(k));
    }
    model.objective = (X - model.S * model.H).norm();
    return model;
}

FactorModel nmf_fit(const Eigen::MatrixXd& X, const NmfParams& params) {
    if (params.rank < 1) throw Error(ErrorKind::InvalidParam, "NMF rank must be >= 1");
    if (params.iters < 0) throw Error(ErrorKind::InvalidParam, "NMF iters must be >= 0");
    if ((X.array() < 0).any()) throw Error(ErrorKind::InvalidParam, "NMF input must be nonnegative");
    const auto n = X.rows();
    const auto vocab = X.cols();
    const Eigen::Index p = params.rank;

    const double mean = X.size() > 0 ? X.mean() : 0.0;
    const double scale = std::sqrt(mean / static_cast<double>(p));
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    FactorModel model;
    model.method = FactorMethod::NMF;
    model.rank = static_cast<int>(p);
    model.S.resize(n, p);
    model.H.resize(p, vocab);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < p; ++k) model.S(i, k) = unif(rng) * scale;
    for (Eigen::Index k = 0; k < p; ++k)
        for (Eigen::Index j = 0; j < vocab; ++j) model.H(k, j) = unif(rng) * scale;

    auto objective = [&] { return (X - model.S * model.H).squaredNorm(); };
    model.objective_trace.push_back(objective());
    for (int it = 0; it < params.iters; ++it) {
        {
            const Eigen::MatrixXd num = model.S.transpose() * X;
            const Eigen::MatrixXd den = (model.S.transpose() * model.S) * model.H;
            for (Eigen::Index k = 0; k < p; ++k)
                for (Eigen::Index j = 0; j < vocab; ++j)
                    if (den(k, j) > 0) model.H(k, j) *= num(k, j) / den(k, j);
        }
        {
            const Eigen::MatrixXd num = X * model.H.transpose();
            const Eigen::MatrixXd den = model.S * (model.H * model.H.transpose());
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index k = 0; k < p; ++k)
                    if (den(i, k) > 0) model.S(i, k) *= num(i, k) / den(i, k);
        }
        model.objective_trace.push_back(objective());
    }
    model.objective = model.objective_trace.back();
    return model;
}

}  // namespace stylus
