// Chunked training and vote aggregation: split the shuffled training set into
// fixed-size chunks, train one dual-form model per chunk, persist each, then
// average the binary votes (integer count, one division) and threshold the
// fraction at a value tuned on held-out data.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdp/kernel.hpp"
#include "qdp/svm.hpp"

namespace qdp {

struct ChunkPlan {
    std::vector<std::vector<Eigen::Index>> chunks;  // disjoint, cover all rows
    int chunk_size = 500;
    int min_tail = 50;
    std::uint64_t seed = 0;
};

// Seeded shuffle sliced into consecutive blocks of chunk_size; a remainder
// smaller than min_tail is merged into the previous block.
ChunkPlan make_chunks(Eigen::Index train_size, int chunk_size, int min_tail, std::uint64_t seed);

struct TuningPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ChunkEnsemble {
    std::vector<TrainedSvm> models;          // one per trainable chunk
    std::vector<std::string> model_paths;    // where each member is persisted
    std::vector<std::uint64_t> checksums;    // whole-file checksum per member
    int n = 0;                               // member count (Eq.-style averaging denominator)
    std::optional<double> threshold;         // tau, unset until tuned
    std::vector<TuningPoint> tuning_curve;   // thresholds strictly increasing
    std::vector<std::string> warnings;       // e.g. skipped single-class chunks
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;
};

// Observer invoked after each chunk trains: (chunk_id, wall_seconds, rows).
using ChunkTimingObserver = std::function<void(int, double, std::int64_t)>;

// Trains one model per chunk on the already-scaled training matrix and writes
// each to model_dir/chunk_<id>.model. Single-class chunks are skipped with a
// warning and excluded from n; throws when no chunk is trainable.
ChunkEnsemble train_chunks(const Eigen::Ref<const Eigen::MatrixXd>& scaled_train,
                           const std::vector<int>& labels01, const ChunkPlan& plan,
                           const KernelBinding& kernel, double C, double tol,
                           const ScalingParams& scaling, const std::string& model_dir,
                           std::uint64_t seed, std::uint64_t config_digest,
                           const ChunkTimingObserver& observer = nullptr);

// Per-instance fraction of members voting buggy: exactly k/n.
Eigen::VectorXd aggregate(const ChunkEnsemble& ensemble,
                          const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples);

// Eq.-style average of already-computed binary votes (one row per member).
Eigen::VectorXd vote_fractions(const std::vector<std::vector<int>>& votes_per_member);

enum class TuneMetric { precision, recall, f1 };
enum class TieBreak { smallest, largest };

TuneMetric tune_metric_from_string(const std::string& s);
TieBreak tie_break_from_string(const std::string& s);
std::string to_string(TuneMetric m);
std::string to_string(TieBreak t);

struct ThresholdChoice {
    double threshold = 0.0;
    double best_metric = 0.0;
    std::vector<TuningPoint> curve;
};

// Candidate thresholds are 0 plus every distinct fraction present; prediction
// = 1 iff fraction >= tau. Returns the candidate maximizing the chosen metric
// (F1 by default), ties broken toward the smallest tau unless configured
// otherwise. Throws when no positive labels exist.
ThresholdChoice choose_threshold(const Eigen::Ref<const Eigen::VectorXd>& fractions,
                                 const std::vector<int>& labels,
                                 TuneMetric metric = TuneMetric::f1,
                                 TieBreak tie = TieBreak::smallest);

// choose_threshold over the ensemble's votes on the tuning set; stores tau
// and the curve in the ensemble and returns tau.
double tune_threshold(ChunkEnsemble& ensemble, const Eigen::Ref<const Eigen::MatrixXd>& scaled_tune,
                      const std::vector<int>& tune_labels, TuneMetric metric = TuneMetric::f1,
                      TieBreak tie = TieBreak::smallest);

std::vector<int> labels_from_fractions(const Eigen::Ref<const Eigen::VectorXd>& fractions,
                                       double threshold);

// 1 iff vote fraction >= tau; throws when the threshold is unset.
std::vector<int> global_predict(const ChunkEnsemble& ensemble,
                                const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples);

}  // namespace qdp
