// Kernel binding shared by every classifier: either a quantum feature map
// (fidelity kernel) or a classical RBF. Solvers consume precomputed Gram
// matrices only and never inspect the kind.
#pragma once

#include <Eigen/Dense>

#include "qdp/feature_map.hpp"

namespace qdp {

using KernelGram = Eigen::MatrixXd;

struct KernelBinding {
    enum class Kind { quantum, rbf };

    Kind kind = Kind::quantum;
    FeatureMapSpec map;  // meaningful when kind == quantum
    double gamma = 1.0;  // meaningful when kind == rbf

    static KernelBinding quantum(FeatureMapSpec spec) {
        KernelBinding b;
        b.kind = Kind::quantum;
        b.map = spec;
        return b;
    }

    static KernelBinding rbf(double gamma);
};

double kernel_value(const KernelBinding& k, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y);

KernelGram kernel_gram(const KernelBinding& k, const Eigen::Ref<const Eigen::MatrixXd>& left,
                       const Eigen::Ref<const Eigen::MatrixXd>& right);

KernelGram kernel_gram(const KernelBinding& k, const Eigen::Ref<const Eigen::MatrixXd>& left);

// Library-style default: 1 / (d * mean per-feature variance of the training
// set); falls back to 1.0 when the variance vanishes.
double default_rbf_gamma(const Eigen::Ref<const Eigen::MatrixXd>& train);

}  // namespace qdp
