#include "stylus/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "stylus/error.hpp"

namespace stylus {
namespace {

double softplus(double eta) { return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta))); }

double sigmoid(double eta) {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double soft_threshold(double z, double g) {
    if (z > g) return z - g;
    if (z < -g) return z + g;
    return 0.0;
}

double penalized(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double b0,
                 const Eigen::VectorXd& beta, double lambda) {
    return lasso_detail::negative_log_likelihood(X, y, b0, beta) + lambda * beta.lpNorm<1>();
}

/// Largest violation of the lasso optimality conditions.
double kkt_violation(const Eigen::VectorXd& grad, const Eigen::VectorXd& beta, double lambda) {
    double worst = std::abs(grad(0));
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double g = grad(j + 1);
        const double v = beta(j) == 0 ? std::max(0.0, std::abs(g) - lambda)
                                      : std::abs(g + lambda * (beta(j) > 0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

void validate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size())
        throw Error(ErrorKind::DimensionMismatch, "feature rows and labels differ in length");
    if (X.rows() < 2) throw Error(ErrorKind::SingleClass, "need at least two observations");
    if (!X.allFinite()) throw Error(ErrorKind::NonFiniteFeature, "feature matrix has non-finite entries");
    bool zero = false, one = false;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) == 0) zero = true;
        else if (y(i) == 1) one = true;
        else throw Error(ErrorKind::InvalidParam, "labels must be 0 or 1");
    }
    if (!zero || !one) throw Error(ErrorKind::SingleClass, "labels contain a single class");
}

}  // namespace

namespace lasso_detail {

double negative_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double intercept,
                               const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = (X * beta).array() + intercept;
    double total = 0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) total += softplus(eta(i)) - y(i) * eta(i);
    return total;
}

Eigen::VectorXd gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double intercept,
                         const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = (X * beta).array() + intercept;
    Eigen::VectorXd r(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) r(i) = sigmoid(eta(i)) - y(i);
    Eigen::VectorXd g(X.cols() + 1);
    g(0) = r.sum();
    g.tail(X.cols()) = X.transpose() * r;
    return g;
}

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const double ybar = y.mean();
    const Eigen::VectorXd r = Eigen::VectorXd::Constant(y.size(), ybar) - y;
    return X.cols() == 0 ? 0.0 : (X.transpose() * r).cwiseAbs().maxCoeff();
}

Solution solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
               const Solution& start, const LassoParams& params) {
    const auto n = X.rows();
    const auto p = X.cols();
    Solution cur = start;
    if (cur.beta.size() != p) cur.beta = Eigen::VectorXd::Zero(p);
    cur.sweeps = 0;

    Eigen::VectorXd grad = gradient(X, y, cur.intercept, cur.beta);
    std::vector<char> active(static_cast<std::size_t>(p), 0);
    for (Eigen::Index j = 0; j < p; ++j)
        if (cur.beta(j) != 0 || std::abs(grad(j + 1)) > lambda) active[static_cast<std::size_t>(j)] = 1;

    double objective = penalized(X, y, cur.intercept, cur.beta, lambda);
    for (int outer = 0; outer < 500 && cur.sweeps < params.max_sweeps; ++outer) {
        if (kkt_violation(grad, cur.beta, lambda) <= params.kkt_tol) break;

        // Quadratic model of the loss at the current point.
        const Eigen::VectorXd eta = (X * cur.beta).array() + cur.intercept;
        Eigen::VectorXd w(n), res(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double pi = sigmoid(eta(i));
            w(i) = std::max(pi * (1 - pi), 1e-12);
            res(i) = y(i) - pi;
        }
        const double wsum = w.sum();
        double b0 = cur.intercept;
        Eigen::VectorXd beta = cur.beta;
        std::vector<Eigen::Index> set;
        for (Eigen::Index j = 0; j < p; ++j)
            if (active[static_cast<std::size_t>(j)]) set.push_back(j);
        std::vector<double> curvature(set.size());
        for (std::size_t s = 0; s < set.size(); ++s)
            curvature[s] = (X.col(set[s]).array().square() * w.array()).sum();

        for (int inner = 0; inner < 10000 && cur.sweeps < params.max_sweeps; ++inner) {
            ++cur.sweeps;
            double change = 0;
            const double d0 = res.sum() / wsum;
            b0 += d0;
            res -= w * d0;
            change = std::max(change, std::abs(d0) * wsum);
            for (std::size_t s = 0; s < set.size(); ++s) {
                const auto j = set[s];
                const double a = curvature[s];
                if (a <= 0) continue;
                const double old = beta(j);
                const double updated = soft_threshold(X.col(j).dot(res) + a * old, lambda) / a;
                const double d = updated - old;
                if (d == 0) continue;
                beta(j) = updated;
                res -= (w.array() * X.col(j).array() * d).matrix();
                change = std::max(change, std::abs(d) * a);
            }
            if (change <= params.kkt_tol * 1e-2) break;
        }

        // Backtrack until the penalized objective does not increase.
        double step = 1.0;
        double b_try = b0;
        Eigen::VectorXd beta_try = beta;
        double f_try = penalized(X, y, b_try, beta_try, lambda);
        const double slack = 1e-13 * std::max(1.0, std::abs(objective));
        int halvings = 0;
        while (f_try > objective + slack && halvings < 60) {
            step *= 0.5;
            ++halvings;
            b_try = cur.intercept + step * (b0 - cur.intercept);
            beta_try = cur.beta + step * (beta - cur.beta);
            f_try = penalized(X, y, b_try, beta_try, lambda);
        }
        if (f_try > objective + slack) break;
        const bool moved = b_try != cur.intercept || beta_try != cur.beta;
        cur.intercept = b_try;
        cur.beta = beta_try;
        objective = std::min(objective, f_try);
        grad = gradient(X, y, cur.intercept, cur.beta);
        for (Eigen::Index j = 0; j < p; ++j)
            if (cur.beta(j) != 0 || std::abs(grad(j + 1)) > lambda) active[static_cast<std::size_t>(j)] = 1;
        if (!moved) break;
    }
    return cur;
}

}  // namespace lasso_detail

std::map<std::string, double> LassoModel::coefficients() const {
    std::map<std::string, double> out;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta(j) == 0) continue;
        const auto k = static_cast<std::size_t>(j);
        out[k < feature_names.size() ? feature_names[k] : std::to_string(j)] = beta(j);
    }
    return out;
}

LassoModel lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoParams& params,
                     std::vector<std::string> feature_names) {
    validate(X, y);
    if (params.path_size < 1) throw Error(ErrorKind::InvalidParam, "path size must be >= 1");
    if (!feature_names.empty() && feature_names.size() != static_cast<std::size_t>(X.cols()))
        throw Error(ErrorKind::DimensionMismatch, "feature names do not match feature count");
    const auto n = X.rows();
    const auto p = X.cols();

    LassoModel model;
    model.feature_names = std::move(feature_names);
    model.center = X.colwise().mean().transpose();
    model.scale.resize(p);
    Eigen::MatrixXd Z = X.rowwise() - model.center.transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double sd = std::sqrt(Z.col(j).squaredNorm() / static_cast<double>(n));
        model.scale(j) = sd > 0 ? sd : 1.0;
        Z.col(j) /= model.scale(j);
    }

    const double ybar = y.mean();
    lasso_detail::Solution sol;
    sol.intercept = std::log(ybar / (1 - ybar));
    sol.beta = Eigen::VectorXd::Zero(p);
    const double null_deviance = 2 * lasso_detail::negative_log_likelihood(Z, y, sol.intercept, sol.beta);
    const double lmax = lasso_detail::lambda_max(Z, y);

    double best_aicc = std::numeric_limits<double>::infinity();
    lasso_detail::Solution best = sol;
    double best_lambda = lmax;
    const auto nd = static_cast<double>(n);
    for (int k = 0; k < params.path_size; ++k) {
        const double frac = params.path_size == 1 ? 0.0 : static_cast<double>(k) / (params.path_size - 1);
        const double lambda = lmax * std::pow(params.lambda_min_ratio, frac);
        sol = lasso_detail::solve(Z, y, lambda, sol, params);
        LassoPathPoint point;
        point.lambda = lambda;
        point.nonzero = static_cast<int>((sol.beta.array() != 0).count());
        point.deviance = 2 * lasso_detail::negative_log_likelihood(Z, y, sol.intercept, sol.beta);
        const double kk = point.nonzero + 1.0;
        point.aicc = nd - kk - 1 > 0 ? point.deviance + 2 * kk * nd / (nd - kk - 1)
                                     : std::numeric_limits<double>::infinity();
        model.path.push_back(point);
        if (point.aicc < best_aicc) {
            best_aicc = point.aicc;
            best = sol;
            best_lambda = lambda;
        }
        if (null_deviance > 0 && 1 - point.deviance / null_deviance >= params.max_deviance_ratio) break;
    }
    model.intercept = best.intercept;
    model.beta = best.beta;
    model.lambda = best_lambda;
    return model;
}

Eigen::VectorXd lasso_predict(const LassoModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.beta.size())
        throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(model.beta.size()) +
                                                      " features, got " + std::to_string(X.cols()));
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double eta = model.intercept;
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            if (model.beta(j) != 0) eta += model.beta(j) * (X(i, j) - model.center(j)) / model.scale(j);
        out(i) = sigmoid(eta);
    }
    return out;
}

void write_lasso_model_json(const LassoModel& model, std::ostream& out) {
    nlohmann::ordered_json j;
    j["intercept"] = model.intercept;
    nlohmann::ordered_json coefs = nlohmann::ordered_json::object();
    for (const auto& [name, value] : model.coefficients()) coefs[name] = value;
    j["coefficients"] = std::move(coefs);
    j["lambda"] = model.lambda;
    nlohmann::ordered_json path = nlohmann::ordered_json::array();
    for (const auto& pt : model.path)
        path.push_back({{"lambda", pt.lambda}, {"nonzero", pt.nonzero}, {"deviance", pt.deviance},
                        {"aicc", std::isfinite(pt.aicc) ? nlohmann::ordered_json(pt.aicc) : nlohmann::ordered_json()}});
    j["path"] = std::move(path);
    out << j.dump(2) << '\n';
}

}  // namespace stylus
