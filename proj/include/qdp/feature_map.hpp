// Quantum feature-map circuits and fidelity kernel entries.
//
// Circuit family: per repetition, a Hadamard on every qubit followed by a
// single-qubit phase of 2*x_i on qubit i. The ZZ variant additionally applies,
// per entangled pair (i,j), the CX(i,j) - P(j, 2*(pi-x_i)*(pi-x_j)) - CX(i,j)
// sandwich. Kernel entry: K(x,y) = |<encode(y)|encode(x)>|^2.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "qdp/statevector.hpp"

namespace qdp {

enum class MapKind { z, zz };
enum class Entanglement { linear, full };

std::string to_string(MapKind k);
std::string to_string(Entanglement e);
MapKind map_kind_from_string(const std::string& s);
Entanglement entanglement_from_string(const std::string& s);

struct FeatureMapSpec {
    MapKind kind = MapKind::z;
    int num_features = 1;  // one qubit per feature
    int reps = 2;
    Entanglement entanglement = Entanglement::linear;  // ignored for kind=z
};

// Throws std::invalid_argument when num_features or reps is < 1.
void validate(const FeatureMapSpec& spec);

// Qubit pairs touched by the ZZ entangling layer, in application order.
std::vector<std::pair<int, int>> entangled_pairs(int num_qubits, Entanglement e);

// Full dense simulation of the encoding circuit on |0...0>.
// Refuses specs wider than kMaxDenseQubits.
Statevector encode(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

// |<encode(y)|encode(x)>|^2 via dense statevectors.
double fidelity_dense(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y);

// Z maps have no entangling gates, so the encoded state factorizes per qubit;
// each qubit is simulated with two amplitudes and the overlaps multiplied.
// No qubit cap. Throws when spec.kind != z.
double fidelity_fast_z(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y);

// Dispatch: z -> fast path, zz -> dense simulation.
double fidelity(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y);

// KernelGram values for left rows against right rows:
// values(i, j) = fidelity(spec, left.row(i), right.row(j)), clamped into [0,1].
Eigen::MatrixXd gram(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& left,
                     const Eigen::Ref<const Eigen::MatrixXd>& right);

// Self-Gram: upper triangle computed, mirrored; unit diagonal by construction.
Eigen::MatrixXd gram(const FeatureMapSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& left);

// Diagnostic (O(n^3)), not asserted on every Gram.
double min_gram_eigenvalue(const Eigen::Ref<const Eigen::MatrixXd>& g);

}  // namespace qdp
