// Kernelized Pegasos: stochastic solver that accumulates hit counts on
// sampled training points instead of solving the dual exactly.
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qdp/dataio.hpp"
#include "qdp/kernel.hpp"

namespace qdp {

struct PegasosModel {
    Eigen::MatrixXd support_vectors;     // sampled points with count >= 1, scaled space
    std::vector<std::int64_t> counts;    // hit count per support
    std::vector<int> support_labels;     // +/-1 per support
    std::int64_t steps = 0;
    std::int64_t train_size = 0;  // N fixes lambda = 1/(C*N) at prediction time
    double C = 1.0;
    KernelBinding kernel;
    double bias = 0.0;  // kernelized updates never move it; kept for the file format
    std::uint64_t seed = 0;
    ScalingParams scaling;

    std::int32_t chunk_id = -1;
    std::uint64_t config_digest = 0;
};

// At step t, sample index i_t from the seeded generator; with lambda =
// 1/(C*N), a margin y_{i_t} * (1/(lambda*t)) * sum_j count_j y_j K(x_j, x_{i_t})
// below 1 increments count_{i_t}. Deterministic given the seed.
PegasosModel train_pegasos(const Eigen::Ref<const Eigen::MatrixXd>& scaled_features,
                           const std::vector<int>& labels01, const KernelBinding& kernel,
                           double C, std::int64_t steps, std::uint64_t seed,
                           const ScalingParams& scaling);

// f(x) = (1/(lambda*T)) * sum_j count_j y_j K(x_j, x) + bias.
Eigen::VectorXd decision_values(const PegasosModel& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples);

// 1 iff f(x) >= 0 — ties go to buggy, matching the dual-form classifier.
std::vector<int> predict(const PegasosModel& model,
                         const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples);

}  // namespace qdp
