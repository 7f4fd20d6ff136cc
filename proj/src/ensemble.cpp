#include "qdp/ensemble.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <stdexcept>

#include "qdp/metrics.hpp"
#include "qdp/model_io.hpp"
#include "qdp/rng.hpp"
#include "qdp/timing.hpp"

namespace qdp {

ChunkPlan make_chunks(Eigen::Index train_size, int chunk_size, int min_tail, std::uint64_t seed) {
    if (train_size < 1) throw std::invalid_argument("make_chunks: empty training set");
    if (chunk_size < 2) throw std::invalid_argument("make_chunks: chunk_size must be >= 2");
    if (min_tail < 1) throw std::invalid_argument("make_chunks: min_tail must be >= 1");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(train_size));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(derive_seed(seed, "chunks"));
    rng.shuffle(order);

    ChunkPlan plan;
    plan.chunk_size = chunk_size;
    plan.min_tail = min_tail;
    plan.seed = seed;
    for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(chunk_size)) {
        const std::size_t end = std::min(at + static_cast<std::size_t>(chunk_size), order.size());
        plan.chunks.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    // A short tail distorts its model's class balance; fold it into the
    // previous chunk instead of training on it alone.
    if (plan.chunks.size() > 1 &&
        plan.chunks.back().size() < static_cast<std::size_t>(min_tail)) {
        auto tail = std::move(plan.chunks.back());
        plan.chunks.pop_back();
        plan.chunks.back().insert(plan.chunks.back().end(), tail.begin(), tail.end());
    }
    return plan;
}

ChunkEnsemble train_chunks(const Eigen::Ref<const Eigen::MatrixXd>& scaled_train,
                           const std::vector<int>& labels01, const ChunkPlan& plan,
                           const KernelBinding& kernel, double C, double tol,
                           const ScalingParams& scaling, const std::string& model_dir,
                           std::uint64_t seed, std::uint64_t config_digest,
                           const ChunkTimingObserver& observer) {
    if (static_cast<std::size_t>(scaled_train.rows()) != labels01.size())
        throw std::invalid_argument("train_chunks: feature/label size mismatch");
    std::size_t covered = 0;
    for (const auto& chunk : plan.chunks) covered += chunk.size();
    if (covered != labels01.size())
        throw std::invalid_argument("train_chunks: plan does not cover the training set");

    std::filesystem::create_directories(model_dir);

    ChunkEnsemble ensemble;
    ensemble.seed = seed;
    ensemble.config_digest = config_digest;
    for (std::size_t ci = 0; ci < plan.chunks.size(); ++ci) {
        const auto& chunk = plan.chunks[ci];
        Eigen::MatrixXd rows(static_cast<Eigen::Index>(chunk.size()), scaled_train.cols());
        std::vector<int> labels;
        labels.reserve(chunk.size());
        for (std::size_t r = 0; r < chunk.size(); ++r) {
            rows.row(static_cast<Eigen::Index>(r)) = scaled_train.row(chunk[r]);
            labels.push_back(labels01[static_cast<std::size_t>(chunk[r])]);
        }
        const auto positives = std::count(labels.begin(), labels.end(), 1);
        if (positives == 0 || static_cast<std::size_t>(positives) == labels.size()) {
            ensemble.warnings.push_back("chunk " + std::to_string(ci) +
                                        " skipped: single-class (" + std::to_string(chunk.size()) +
                                        " rows)");
            continue;
        }

        Stopwatch watch;
        const KernelGram g = kernel_gram(kernel, rows);
        TrainedSvm model = train_svc(g, rows, labels, C, tol, kernel, scaling);
        const double elapsed = watch.seconds();
        model.chunk_id = static_cast<std::int32_t>(ci);
        model.seed = seed;
        model.config_digest = config_digest;

        char name[32];
        std::snprintf(name, sizeof name, "chunk_%03zu.model", ci);
        const std::string path = (std::filesystem::path(model_dir) / name).string();
        save_model(model, path);

        ensemble.models.push_back(std::move(model));
        ensemble.model_paths.push_back(path);
        ensemble.checksums.push_back(file_checksum(path));
        if (observer) observer(static_cast<int>(ci), elapsed,
                               static_cast<std::int64_t>(chunk.size()));
    }
    if (ensemble.models.empty())
        throw std::runtime_error("train_chunks: every chunk was single-class; nothing to train");
    ensemble.n = static_cast<int>(ensemble.models.size());
    return ensemble;
}

Eigen::VectorXd vote_fractions(const std::vector<std::vector<int>>& votes_per_member) {
    if (votes_per_member.empty())
        throw std::invalid_argument("vote_fractions: no members");
    const std::size_t n_samples = votes_per_member.front().size();
    std::vector<std::int64_t> counts(n_samples, 0);
    for (const auto& votes : votes_per_member) {
        if (votes.size() != n_samples)
            throw std::invalid_argument("vote_fractions: vote vector length mismatch");
        for (std::size_t i = 0; i < n_samples; ++i) counts[i] += votes[i];
    }
    // Integer tally then a single division keeps each fraction exactly k/n.
    Eigen::VectorXd fractions(static_cast<Eigen::Index>(n_samples));
    const double n = static_cast<double>(votes_per_member.size());
    for (std::size_t i = 0; i < n_samples; ++i)
        fractions[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / n;
    return fractions;
}

Eigen::VectorXd aggregate(const ChunkEnsemble& ensemble,
                          const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples) {
    if (ensemble.models.empty()) throw std::logic_error("aggregate: ensemble has no members");
    std::vector<std::vector<int>> votes;
    votes.reserve(ensemble.models.size());
    for (const TrainedSvm& model : ensemble.models)
        votes.push_back(predict(model, scaled_samples));
    return vote_fractions(votes);
}

TuneMetric tune_metric_from_string(const std::string& s) {
    if (s == "precision") return TuneMetric::precision;
    if (s == "recall") return TuneMetric::recall;
    if (s == "f1") return TuneMetric::f1;
    throw std::invalid_argument("unknown tuning metric: " + s);
}

TieBreak tie_break_from_string(const std::string& s) {
    if (s == "smallest") return TieBreak::smallest;
    if (s == "largest") return TieBreak::largest;
    throw std::invalid_argument("unknown tie break: " + s);
}

std::string to_string(TuneMetric m) {
    switch (m) {
        case TuneMetric::precision: return "precision";
        case TuneMetric::recall: return "recall";
        case TuneMetric::f1: return "f1";
    }
    return "?";
}

std::string to_string(TieBreak t) { return t == TieBreak::smallest ? "smallest" : "largest"; }

ThresholdChoice choose_threshold(const Eigen::Ref<const Eigen::VectorXd>& fractions,
                                 const std::vector<int>& labels, TuneMetric metric,
                                 TieBreak tie) {
    if (static_cast<std::size_t>(fractions.size()) != labels.size())
        throw std::invalid_argument("choose_threshold: fraction/label length mismatch");
    if (labels.empty()) throw std::invalid_argument("choose_threshold: empty input");
    if (std::count(labels.begin(), labels.end(), 1) == 0)
        throw std::invalid_argument(
            "choose_threshold: tuning labels contain no positives, the target metric is "
            "undefined at every threshold");

    std::vector<double> candidates(fractions.data(), fractions.data() + fractions.size());
    candidates.push_back(0.0);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    ThresholdChoice choice;
    choice.curve.reserve(candidates.size());
    bool first = true;
    for (double tau : candidates) {
        const std::vector<int> preds = labels_from_fractions(fractions, tau);
        const ConfusionMatrix cm = confusion(labels, preds);
        const TuningPoint point{tau, precision(cm), recall(cm), f1(cm)};
        choice.curve.push_back(point);

        const double value = metric == TuneMetric::precision ? point.precision
                             : metric == TuneMetric::recall  ? point.recall
                                                             : point.f1;
        const bool better =
            first || (tie == TieBreak::smallest ? value > choice.best_metric
                                                : value >= choice.best_metric);
        if (better) {
            choice.best_metric = value;
            choice.threshold = tau;
            first = false;
        }
    }
    return choice;
}

double tune_threshold(ChunkEnsemble& ensemble, const Eigen::Ref<const Eigen::MatrixXd>& scaled_tune,
                      const std::vector<int>& tune_labels, TuneMetric metric, TieBreak tie) {
    const Eigen::VectorXd fractions = aggregate(ensemble, scaled_tune);
    ThresholdChoice choice = choose_threshold(fractions, tune_labels, metric, tie);
    ensemble.threshold = choice.threshold;
    ensemble.tuning_curve = std::move(choice.curve);
    return choice.threshold;
}

std::vector<int> labels_from_fractions(const Eigen::Ref<const Eigen::VectorXd>& fractions,
                                       double threshold) {
    std::vector<int> labels(static_cast<std::size_t>(fractions.size()));
    for (Eigen::Index i = 0; i < fractions.size(); ++i)
        labels[static_cast<std::size_t>(i)] = fractions[i] >= threshold ? 1 : 0;
    return labels;
}

std::vector<int> global_predict(const ChunkEnsemble& ensemble,
                                const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples) {
    if (!ensemble.threshold)
        throw std::logic_error("global_predict: aggregation threshold unset; tune it first");
    return labels_from_fractions(aggregate(ensemble, scaled_samples), *ensemble.threshold);
}

}  // namespace qdp
