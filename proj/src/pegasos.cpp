#include "qdp/pegasos.hpp"

#include <map>
#include <stdexcept>

#include "qdp/rng.hpp"

namespace qdp {

PegasosModel train_pegasos(const Eigen::Ref<const Eigen::MatrixXd>& scaled_features,
                           const std::vector<int>& labels01, const KernelBinding& kernel,
                           double C, std::int64_t steps, std::uint64_t seed,
                           const ScalingParams& scaling) {
    const auto n = scaled_features.rows();
    if (n < 1) throw std::invalid_argument("train_pegasos: empty training set");
    if (static_cast<std::size_t>(n) != labels01.size())
        throw std::invalid_argument("train_pegasos: feature/label size mismatch");
    if (steps < 1) throw std::invalid_argument("train_pegasos: steps must be >= 1");
    if (!(C > 0.0)) throw std::invalid_argument("train_pegasos: C must be positive");

    std::vector<int> y(labels01.size());
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < labels01.size(); ++i) {
        if (labels01[i] != 0 && labels01[i] != 1)
            throw std::invalid_argument("train_pegasos: labels must be 0 or 1");
        y[i] = labels01[i] == 1 ? 1 : -1;
        (y[i] == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw std::invalid_argument("train_pegasos: both classes required");

    const double lambda = 1.0 / (C * static_cast<double>(n));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> support_order;  // first-hit order, for stable output

    // Kernel columns are computed on first touch only; sampling visits at
    // most min(steps, n) distinct columns.
    std::map<Eigen::Index, Eigen::VectorXd> column_cache;
    auto column = [&](Eigen::Index i) -> const Eigen::VectorXd& {
        auto it = column_cache.find(i);
        if (it == column_cache.end()) {
            Eigen::VectorXd col =
                kernel_gram(kernel, scaled_features, scaled_features.row(i));
            it = column_cache.emplace(i, std::move(col)).first;
        }
        return it->second;
    };

    Rng rng(derive_seed(seed, "pegasos"));
    for (std::int64_t t = 1; t <= steps; ++t) {
        const auto i = static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(n)));
        double weighted = 0.0;
        if (!support_order.empty()) {
            const Eigen::VectorXd& col = column(i);
            for (Eigen::Index j : support_order)
                weighted += static_cast<double>(counts[static_cast<std::size_t>(j)]) * y[j] * col[j];
        }
        const double margin =
            y[static_cast<std::size_t>(i)] * weighted / (lambda * static_cast<double>(t));
        if (margin < 1.0) {
            if (counts[static_cast<std::size_t>(i)] == 0) support_order.push_back(i);
            ++counts[static_cast<std::size_t>(i)];
        }
    }

    PegasosModel model;
    model.support_vectors.resize(static_cast<Eigen::Index>(support_order.size()),
                                 scaled_features.cols());
    model.counts.reserve(support_order.size());
    model.support_labels.reserve(support_order.size());
    for (std::size_t s = 0; s < support_order.size(); ++s) {
        const Eigen::Index j = support_order[s];
        model.support_vectors.row(static_cast<Eigen::Index>(s)) = scaled_features.row(j);
        model.counts.push_back(counts[static_cast<std::size_t>(j)]);
        model.support_labels.push_back(y[static_cast<std::size_t>(j)]);
    }
    model.steps = steps;
    model.train_size = n;
    model.C = C;
    model.kernel = kernel;
    model.seed = seed;
    model.scaling = scaling;
    return model;
}

Eigen::VectorXd decision_values(const PegasosModel& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples) {
    if (scaled_samples.rows() == 0) return Eigen::VectorXd();
    if (model.support_vectors.rows() == 0)
        return Eigen::VectorXd::Constant(scaled_samples.rows(), model.bias);

    Eigen::VectorXd weights(model.support_vectors.rows());
    for (Eigen::Index j = 0; j < weights.size(); ++j)
        weights[j] = static_cast<double>(model.counts[static_cast<std::size_t>(j)]) *
                     model.support_labels[static_cast<std::size_t>(j)];
    const double lambda = 1.0 / (model.C * static_cast<double>(model.train_size));
    const double scale = 1.0 / (lambda * static_cast<double>(model.steps));
    const Eigen::MatrixXd rows =
        kernel_gram(model.kernel, scaled_samples, model.support_vectors);
    return (scale * (rows * weights)).array() + model.bias;
}

std::vector<int> predict(const PegasosModel& model,
                         const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples) {
    const Eigen::VectorXd f = decision_values(model, scaled_samples);
    std::vector<int> labels(static_cast<std::size_t>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) labels[static_cast<std::size_t>(i)] = f[i] >= 0.0;
    return labels;
}

}  // namespace qdp
