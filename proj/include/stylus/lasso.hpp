#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace stylus {

struct LassoParams {
    int path_size = 100;
    /// Smallest lambda on the path relative to lambda_max (four decades).
    double lambda_min_ratio = 1e-4;
    /// Path stops early once this fraction of the null deviance is explained.
    double max_deviance_ratio = 0.999;
    double kkt_tol = 1e-9;
    int max_sweeps = 100000;
};

struct LassoPathPoint {
    double lambda = 0;
    int nonzero = 0;
    double deviance = 0;
    double aicc = 0;
};

/// l1-penalized logistic regression on standardized features. The loss is
/// the summed negative log-likelihood; the intercept is unpenalized and
/// coefficients live on the standardized scale.
struct LassoModel {
    double intercept = 0;
    Eigen::VectorXd beta;
    double lambda = 0;
    std::vector<LassoPathPoint> path;
    Eigen::VectorXd center;
    Eigen::VectorXd scale;
    std::vector<std::string> feature_names;

    /// Nonzero coefficients keyed by feature name (or index).
    std::map<std::string, double> coefficients() const;
};

LassoModel lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const LassoParams& params = {},
                     std::vector<std::string> feature_names = {});

Eigen::VectorXd lasso_predict(const LassoModel& model, const Eigen::MatrixXd& X);

/// model.json: {intercept, coefficients, lambda}
void write_lasso_model_json(const LassoModel& model, std::ostream& out);

namespace lasso_detail {

struct Solution {
    double intercept = 0;
    Eigen::VectorXd beta;
    int sweeps = 0;
};

/// Columns of X are used as given (no standardization).
double negative_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               double intercept, const Eigen::VectorXd& beta);
/// Gradient of the unpenalized loss: entry 0 is the intercept, entry j+1 is beta_j.
Eigen::VectorXd gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double intercept,
                         const Eigen::VectorXd& beta);
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
/// Coordinate descent to the KKT tolerance, warm-started from `start`.
Solution solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
               const Solution& start, const LassoParams& params);

}  // namespace lasso_detail
}  // namespace stylus
