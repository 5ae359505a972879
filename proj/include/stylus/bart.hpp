#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace stylus {

struct BartParams {
    int trees = 200;
    int burn_in = 1000;
    int draws = 1000;
    double split_alpha = 0.95;  // P(split) = alpha (1 + depth)^-beta
    double split_beta = 2.0;
    double k = 2.0;             // leaf prior sd = 3 / (k sqrt(trees))
    int min_leaf = 5;
    std::uint64_t seed = 1;
};

struct TreeNode {
    int var = -1;  // -1 marks a leaf
    int cut = 0;   // index into the feature's cutpoints; x <= cut goes left
    int left = -1;
    int right = -1;
    int parent = -1;
    double value = 0;
};

/// Flattened forest of one posterior draw.
struct Forest {
    std::vector<TreeNode> nodes;
    std::vector<int> roots;
};

/// Probit sum-of-trees classifier. P(y = 1 | x) = Phi(offset + sum_j g_j(x)).
struct BartModel {
    BartParams params;
    double offset = 0;
    int features = 0;
    std::vector<std::vector<double>> cutpoints;  // observed values per feature
    std::vector<Forest> draws;

    double latent(std::size_t draw, const double* x) const;
};

BartModel bart_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BartParams& params);

struct BartPrediction {
    Eigen::VectorXd prob;   // posterior mean of Phi(...)
    Eigen::VectorXd lo95;
    Eigen::VectorXd hi95;
    Eigen::MatrixXd draws;  // documents x draws
};

BartPrediction bart_predict(const BartModel& model, const Eigen::MatrixXd& X);

/// Text dump of every retained draw; two chains are identical iff the dumps are.
void write_bart_draws(const BartModel& model, std::ostream& out);

double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace stylus
