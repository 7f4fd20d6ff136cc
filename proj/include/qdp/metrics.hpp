// Binary-classification metrics with 1 = buggy as the positive class.
// Zero-denominator cases yield 0 rather than errors so degenerate models
// still produce a full report row.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace qdp {

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
};

struct MetricSet {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::optional<double> roc_auc;  // absent when labels are single-class
    double mcc = 0.0;
};

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions);

double accuracy(const ConfusionMatrix& cm);
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double f1(const ConfusionMatrix& cm);

// Matthews correlation; 0 when any marginal is empty. Factors are multiplied
// in double precision (the products overflow 32-bit and can overflow 64-bit
// counts on large datasets).
double mcc(const ConfusionMatrix& cm);

// Mann-Whitney formulation: probability that a random positive outscores a
// random negative, ties counted 1/2. Throws std::invalid_argument when only
// one class is present.
double roc_auc(const Eigen::Ref<const Eigen::VectorXd>& scores, const std::vector<int>& labels);

struct PrPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// One point per distinct score, thresholds ascending, prediction = 1 iff
// score >= threshold. Throws when no positive labels exist.
std::vector<PrPoint> pr_curve(const Eigen::Ref<const Eigen::VectorXd>& scores,
                              const std::vector<int>& labels);

// All six metrics at once; roc_auc left empty when labels are single-class.
MetricSet metric_set(const ConfusionMatrix& cm, const Eigen::Ref<const Eigen::VectorXd>& scores,
                     const std::vector<int>& labels);

}  // namespace qdp
