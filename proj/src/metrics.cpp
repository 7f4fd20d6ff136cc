#include "qdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qdp {

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions) {
    if (labels.size() != predictions.size())
        throw std::invalid_argument("confusion: label/prediction length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        const int p = predictions[i];
        if ((y != 0 && y != 1) || (p != 0 && p != 1))
            throw std::invalid_argument("confusion: values must be 0 or 1 (index " +
                                        std::to_string(i) + ")");
        if (y == 1)
            (p == 1 ? cm.tp : cm.fn)++;
        else
            (p == 1 ? cm.fp : cm.tn)++;
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const std::int64_t n = cm.total();
    if (n == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(n);
}

double precision(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("precision: empty confusion matrix");
    const std::int64_t denom = cm.tp + cm.fp;
    return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double recall(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("recall: empty confusion matrix");
    const std::int64_t denom = cm.tp + cm.fn;
    return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double f1(const ConfusionMatrix& cm) {
    const double p = precision(cm);
    const double r = recall(cm);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double mcc(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("mcc: empty confusion matrix");
    const double tp = static_cast<double>(cm.tp);
    const double fp = static_cast<double>(cm.fp);
    const double fn = static_cast<double>(cm.fn);
    const double tn = static_cast<double>(cm.tn);
    const double denom_sq = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom_sq == 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(denom_sq);
}

double roc_auc(const Eigen::Ref<const Eigen::VectorXd>& scores, const std::vector<int>& labels) {
    if (static_cast<std::size_t>(scores.size()) != labels.size())
        throw std::invalid_argument("roc_auc: score/label length mismatch");
    const std::size_t n = labels.size();
    std::int64_t n_pos = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw std::invalid_argument("roc_auc: labels must be 0 or 1");
        n_pos += y;
    }
    const std::int64_t n_neg = static_cast<std::int64_t>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_auc: needs both classes present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Mid-ranks for tied scores, 1-based.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]] == 1) pos_rank_sum += mid_rank;
        i = j + 1;
    }
    const double u = pos_rank_sum - static_cast<double>(n_pos) *
                                        (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<PrPoint> pr_curve(const Eigen::Ref<const Eigen::VectorXd>& scores,
                              const std::vector<int>& labels) {
    if (static_cast<std::size_t>(scores.size()) != labels.size())
        throw std::invalid_argument("pr_curve: score/label length mismatch");
    if (labels.empty()) throw std::invalid_argument("pr_curve: empty input");
    if (std::count(labels.begin(), labels.end(), 1) == 0)
        throw std::invalid_argument("pr_curve: needs at least one positive label");

    std::vector<double> thresholds(scores.data(), scores.data() + scores.size());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    std::vector<PrPoint> curve;
    curve.reserve(thresholds.size());
    std::vector<int> preds(labels.size());
    for (double t : thresholds) {
        for (std::size_t k = 0; k < labels.size(); ++k) preds[k] = scores[k] >= t ? 1 : 0;
        const ConfusionMatrix cm = confusion(labels, preds);
        curve.push_back({t, precision(cm), recall(cm), f1(cm)});
    }
    return curve;
}

MetricSet metric_set(const ConfusionMatrix& cm, const Eigen::Ref<const Eigen::VectorXd>& scores,
                     const std::vector<int>& labels) {
    MetricSet m;
    m.accuracy = accuracy(cm);
    m.precision = precision(cm);
    m.recall = recall(cm);
    m.f1 = f1(cm);
    m.mcc = mcc(cm);
    try {
        m.roc_auc = roc_auc(scores, labels);
    } catch (const std::invalid_argument&) {
        m.roc_auc.reset();  // single-class test sets report n/a
    }
    return m;
}

}  // namespace qdp
