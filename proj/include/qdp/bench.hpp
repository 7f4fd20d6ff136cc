// Runtime study harness: batch prediction over the whole test set (test1)
// versus one instance at a time (test2), plus per-chunk training timings.
// The two prediction modes must agree element-wise — enforced, not observed.
#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qdp/ensemble.hpp"
#include "qdp/pegasos.hpp"
#include "qdp/svm.hpp"
#include "qdp/timing.hpp"

namespace qdp {

struct BenchResult {
    TimingRecord test1;
    TimingRecord test2;
    bool equal = true;  // always true on return; a mismatch throws instead
    std::vector<int> predictions;
};

using BatchPredictor = std::function<std::vector<int>(const Eigen::Ref<const Eigen::MatrixXd>&)>;

// Times one whole-matrix call against a loop of single-row calls of the same
// predictor (minimum over `repeats`), then verifies the outputs are
// identical; a difference throws std::logic_error.
BenchResult bench_predict(const BatchPredictor& predict_fn,
                          const Eigen::Ref<const Eigen::MatrixXd>& scaled_test, int repeats,
                          int chunk_id = -1);

BenchResult bench_predict(const TrainedSvm& model,
                          const Eigen::Ref<const Eigen::MatrixXd>& scaled_test, int repeats);

BenchResult bench_predict(const PegasosModel& model,
                          const Eigen::Ref<const Eigen::MatrixXd>& scaled_test, int repeats);

// train_chunks wrapped with per-chunk wall timing; trained models are
// discarded (the persisted ones from the training stage stay authoritative).
std::vector<TimingRecord> bench_train(const Eigen::Ref<const Eigen::MatrixXd>& scaled_train,
                                      const std::vector<int>& labels01, const ChunkPlan& plan,
                                      const KernelBinding& kernel, double C, double tol,
                                      const ScalingParams& scaling,
                                      const std::string& scratch_dir);

}  // namespace qdp
