#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stylus {

/// Fits on (X_train, y_train) and returns P(Madison) for x_test.
using FoldPredictor = std::function<double(const Eigen::MatrixXd& x_train,
                                           const Eigen::VectorXd& y_train,
                                           const Eigen::RowVectorXd& x_test,
                                           std::uint64_t seed)>;

struct LoocvResult {
    std::string method;
    std::vector<int> doc_ids;
    Eigen::VectorXd probs;
    Eigen::VectorXd labels;
    double l2_loss = 0;
};

/// Fold i trains without row i and uses seed base_seed + i.
LoocvResult loocv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const std::vector<int>& doc_ids, const FoldPredictor& predictor,
                  std::uint64_t base_seed, unsigned jobs = 1, std::string method = {});

/// Mean of (p - y)^2.
double l2_loss(std::span<const double> probs, std::span<const double> labels);

struct Confusion {
    int tp = 0;
    int fp = 0;
    int tn = 0;
    int fn = 0;
};

/// Madison (label 1) is the positive class; p > t predicts Madison.
Confusion confusion(std::span<const double> probs, std::span<const double> labels, double t);
double classification_error(std::span<const double> probs, std::span<const double> labels,
                            double t);

/// Candidates are {0, 1} plus midpoints of consecutive distinct sorted probs;
/// ties resolve to the smallest threshold.
std::vector<double> threshold_candidates(std::span<const double> probs);
double youden_threshold(std::span<const double> probs, std::span<const double> labels);
double f1_threshold(std::span<const double> probs, std::span<const double> labels);

struct ThresholdReport {
    double roc = 0;
    double f1 = 0;
    double fixed = 0.3;
    double error_roc = 0;
    double error_f1 = 0;
    double error_fixed = 0;
    Confusion confusion_roc;
    Confusion confusion_f1;
    Confusion confusion_fixed;
};

ThresholdReport threshold_report(std::span<const double> probs, std::span<const double> labels,
                                 double fixed = 0.3);

/// 0.9 min(sd, IQR/1.34) n^(-1/5), falling back like R's bw.nrd0 when that is 0.
double silverman_bandwidth(std::span<const double> x);

struct KdeCurve {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0;
    bool degenerate = false;  // all points identical; curve is a narrow spike
};

/// Gaussian KDE on `points` grid nodes spanning [min - 4h, max + 4h].
KdeCurve kde(std::span<const double> x, int points = 512);
/// Same, evaluated on a caller-supplied grid.
std::vector<double> kde_on_grid(std::span<const double> x, double bandwidth,
                                std::span<const double> grid);

double trapezoid(std::span<const double> grid, std::span<const double> values);

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> hamilton;
    std::vector<double> madison;
    std::vector<double> disputed_marks;
};

DensityCurve density_curve(std::span<const double> hamilton_probs,
                           std::span<const double> madison_probs,
                           std::span<const double> disputed_probs, int points = 512);

void write_density_csv(const DensityCurve& curve, std::ostream& out);

}  // namespace stylus
