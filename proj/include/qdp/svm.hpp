// Dual-form kernel SVM trained by sequential minimal optimization over a
// precomputed Gram matrix. One solver backs both the quantum-kernel and the
// classical RBF classifiers.
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qdp/dataio.hpp"
#include "qdp/kernel.hpp"

namespace qdp {

struct TrainedSvm {
    Eigen::MatrixXd support_vectors;  // rows in scaled feature space
    Eigen::VectorXd dual_coefs;       // alpha_i * y_i per support vector
    double bias = 0.0;
    double C = 1.0;
    KernelBinding kernel;
    ScalingParams scaling;
    bool converged = true;

    // Training provenance, persisted with the model.
    std::int32_t chunk_id = -1;  // -1 when trained without chunking
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;
};

struct SmoResult {
    Eigen::VectorXd alpha;
    double bias = 0.0;
    bool converged = true;
};

// Maximizes sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij subject to
// 0 <= alpha <= C and sum(alpha_i y_i) = 0. labels are +/-1. On hitting
// max_passes the best iterate is returned flagged non-converged, not thrown.
SmoResult smo_solve(const Eigen::Ref<const Eigen::MatrixXd>& gram, const std::vector<int>& labels,
                    double C, double tol, int max_passes = 200);

double dual_objective(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                      const std::vector<int>& labels,
                      const Eigen::Ref<const Eigen::VectorXd>& alpha);

// labels01 use the 0 = clean / 1 = buggy convention; internally -1/+1.
TrainedSvm train_svc(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                     const Eigen::Ref<const Eigen::MatrixXd>& scaled_features,
                     const std::vector<int>& labels01, double C, double tol,
                     const KernelBinding& kernel, const ScalingParams& scaling,
                     int max_passes = 200);

// f(x) from one precomputed kernel row against the support vectors.
double decision_function(const TrainedSvm& model,
                         const Eigen::Ref<const Eigen::VectorXd>& kernel_row);

// Decision values for already-scaled samples (kernel rows computed here).
Eigen::VectorXd decision_values(const TrainedSvm& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples);

// 1 iff f(x) >= 0 — ties go to buggy.
std::vector<int> predict(const TrainedSvm& model,
                         const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples);

}  // namespace qdp
