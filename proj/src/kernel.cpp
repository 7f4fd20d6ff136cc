#include "qdp/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace qdp {

KernelBinding KernelBinding::rbf(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("rbf kernel needs gamma > 0");
    KernelBinding b;
    b.kind = Kind::rbf;
    b.gamma = gamma;
    return b;
}

double kernel_value(const KernelBinding& k, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (k.kind == KernelBinding::Kind::quantum) return fidelity(k.map, x, y);
    if (x.size() != y.size()) throw std::invalid_argument("kernel_value: length mismatch");
    return std::exp(-k.gamma * (x - y).squaredNorm());
}

KernelGram kernel_gram(const KernelBinding& k, const Eigen::Ref<const Eigen::MatrixXd>& left,
                       const Eigen::Ref<const Eigen::MatrixXd>& right) {
    if (k.kind == KernelBinding::Kind::quantum) return gram(k.map, left, right);
    if (left.cols() != right.cols()) throw std::invalid_argument("kernel_gram: width mismatch");
    if (left.rows() == 0 || right.rows() == 0)
        throw std::invalid_argument("kernel_gram: empty input");
    KernelGram values(left.rows(), right.rows());
    for (Eigen::Index i = 0; i < left.rows(); ++i)
        for (Eigen::Index j = 0; j < right.rows(); ++j)
            values(i, j) = std::exp(-k.gamma * (left.row(i) - right.row(j)).squaredNorm());
    return values;
}

KernelGram kernel_gram(const KernelBinding& k, const Eigen::Ref<const Eigen::MatrixXd>& left) {
    if (k.kind == KernelBinding::Kind::quantum) return gram(k.map, left);
    if (left.rows() == 0) throw std::invalid_argument("kernel_gram: empty input");
    KernelGram values(left.rows(), left.rows());
    for (Eigen::Index i = 0; i < left.rows(); ++i) {
        values(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < left.rows(); ++j) {
            const double v = std::exp(-k.gamma * (left.row(i) - left.row(j)).squaredNorm());
            values(i, j) = v;
            values(j, i) = v;
        }
    }
    return values;
}

double default_rbf_gamma(const Eigen::Ref<const Eigen::MatrixXd>& train) {
    if (train.rows() == 0 || train.cols() == 0) return 1.0;
    const Eigen::RowVectorXd mean = train.colwise().mean();
    const double mean_var =
        (train.rowwise() - mean).array().square().colwise().mean().mean();
    const double denom = static_cast<double>(train.cols()) * mean_var;
    return denom > 0.0 ? 1.0 / denom : 1.0;
}

}  // namespace qdp
