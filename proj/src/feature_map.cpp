#include "qdp/feature_map.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qdp {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_input(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const char* who) {
    validate(spec);
    if (x.size() != spec.num_features)
        throw std::invalid_argument(std::string(who) + ": input length " +
                                    std::to_string(x.size()) + " does not match feature count " +
                                    std::to_string(spec.num_features));
    if (!x.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

}  // namespace

std::string to_string(MapKind k) { return k == MapKind::z ? "z" : "zz"; }

std::string to_string(Entanglement e) { return e == Entanglement::linear ? "linear" : "full"; }

MapKind map_kind_from_string(const std::string& s) {
    if (s == "z" || s == "Z") return MapKind::z;
    if (s == "zz" || s == "ZZ") return MapKind::zz;
    throw std::invalid_argument("unknown feature-map kind: " + s);
}

Entanglement entanglement_from_string(const std::string& s) {
    if (s == "linear") return Entanglement::linear;
    if (s == "full") return Entanglement::full;
    throw std::invalid_argument("unknown entanglement: " + s);
}

void validate(const FeatureMapSpec& spec) {
    if (spec.num_features < 1) throw std::invalid_argument("feature map needs num_features >= 1");
    if (spec.reps < 1) throw std::invalid_argument("feature map needs reps >= 1");
}

std::vector<std::pair<int, int>> entangled_pairs(int num_qubits, Entanglement e) {
    std::vector<std::pair<int, int>> pairs;
    if (e == Entanglement::linear) {
        for (int k = 0; k + 1 < num_qubits; ++k) pairs.emplace_back(k, k + 1);
    } else {
        for (int i = 0; i < num_qubits; ++i)
            for (int j = i + 1; j < num_qubits; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
}

Statevector encode(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
    check_input(spec, x, "encode");
    const int n = spec.num_features;
    Statevector state(n);  // throws above the dense cap
    const auto pairs =
        spec.kind == MapKind::zz ? entangled_pairs(n, spec.entanglement)
                                 : std::vector<std::pair<int, int>>{};
    for (int rep = 0; rep < spec.reps; ++rep) {
        for (int q = 0; q < n; ++q) state.h(q);
        for (int q = 0; q < n; ++q) state.p(q, 2.0 * x[q]);
        for (const auto& [i, j] : pairs) {
            state.cx(i, j);
            state.p(j, 2.0 * (kPi - x[i]) * (kPi - x[j]));
            state.cx(i, j);
        }
    }
    return state;
}

double fidelity_dense(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y) {
    const Statevector sx = encode(spec, x);
    const Statevector sy = encode(spec, y);
    return std::norm(sy.inner_product(sx));
}

double fidelity_fast_z(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (spec.kind != MapKind::z)
        throw std::invalid_argument("fast path only applies to z maps (no entangling gates)");
    check_input(spec, x, "fidelity_fast_z");
    check_input(spec, y, "fidelity_fast_z");

    using cd = std::complex<double>;
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    auto qubit_state = [&](double angle) {
        cd a{1.0, 0.0}, b{0.0, 0.0};
        const cd phase = std::polar(1.0, 2.0 * angle);
        for (int rep = 0; rep < spec.reps; ++rep) {
            const cd a2 = (a + b) * inv_sqrt2;
            const cd b2 = (a - b) * inv_sqrt2;
            a = a2;
            b = b2 * phase;
        }
        return std::pair<cd, cd>{a, b};
    };

    double result = 1.0;
    for (int q = 0; q < spec.num_features; ++q) {
        const auto [ax, bx] = qubit_state(x[q]);
        const auto [ay, by] = qubit_state(y[q]);
        result *= std::norm(std::conj(ay) * ax + std::conj(by) * bx);
    }
    return result;
}

double fidelity(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
    return spec.kind == MapKind::z ? fidelity_fast_z(spec, x, y) : fidelity_dense(spec, x, y);
}

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace

Eigen::MatrixXd gram(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& left,
                     const Eigen::Ref<const Eigen::MatrixXd>& right) {
    validate(spec);
    if (left.rows() == 0 || right.rows() == 0) throw std::invalid_argument("gram: empty input");
    if (left.cols() != spec.num_features || right.cols() != spec.num_features)
        throw std::invalid_argument("gram: column count does not match feature count");
    Eigen::MatrixXd values(left.rows(), right.rows());
    for (Eigen::Index i = 0; i < left.rows(); ++i)
        for (Eigen::Index j = 0; j < right.rows(); ++j)
            values(i, j) = clamp01(fidelity(spec, left.row(i), right.row(j)));
    return values;
}

Eigen::MatrixXd gram(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& left) {
    validate(spec);
    if (left.rows() == 0) throw std::invalid_argument("gram: empty input");
    if (left.cols() != spec.num_features)
        throw std::invalid_argument("gram: column count does not match feature count");
    Eigen::MatrixXd values(left.rows(), left.rows());
    for (Eigen::Index i = 0; i < left.rows(); ++i) {
        values(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < left.rows(); ++j) {
            const double v = clamp01(fidelity(spec, left.row(i), left.row(j)));
            values(i, j) = v;
            values(j, i) = v;
        }
    }
    return values;
}

double min_gram_eigenvalue(const Eigen::Ref<const Eigen::MatrixXd>& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace qdp
