// Dense statevector simulator, little-endian qubit order: qubit k addresses
// bit k of the amplitude index. Only the gates needed by the feature maps are
// provided.
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qdp {

constexpr int kMaxDenseQubits = 20;

class Statevector {
public:
    using cd = std::complex<double>;

    explicit Statevector(int num_qubits) : n_(num_qubits) {
        if (n_ < 1) throw std::invalid_argument("statevector needs at least one qubit");
        if (n_ > kMaxDenseQubits)
            throw std::invalid_argument(
                "dense simulation capped at 20 qubits; use the product-form fast path");
        amps_.assign(std::size_t{1} << n_, cd{0.0, 0.0});
        amps_[0] = cd{1.0, 0.0};
    }

    int num_qubits() const { return n_; }
    const std::vector<cd>& amplitudes() const { return amps_; }

    void h(int q) {
        check(q);
        const std::size_t bit = std::size_t{1} << q;
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) continue;
            const cd a = amps_[i];
            const cd b = amps_[i | bit];
            amps_[i] = (a + b) * inv_sqrt2;
            amps_[i | bit] = (a - b) * inv_sqrt2;
        }
    }

    // Phase gate: |1> picks up e^{i*theta}.
    void p(int q, double theta) {
        check(q);
        const std::size_t bit = std::size_t{1} << q;
        const cd phase = std::polar(1.0, theta);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) amps_[i] *= phase;
        }
    }

    void cx(int control, int target) {
        check(control);
        check(target);
        if (control == target) throw std::invalid_argument("cx needs distinct qubits");
        const std::size_t cbit = std::size_t{1} << control;
        const std::size_t tbit = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
        }
    }

    cd inner_product(const Statevector& other) const {
        if (other.n_ != n_) throw std::invalid_argument("qubit counts differ");
        cd acc{0.0, 0.0};
        for (std::size_t i = 0; i < amps_.size(); ++i)
            acc += std::conj(amps_[i]) * other.amps_[i];
        return acc;
    }

private:
    void check(int q) const {
        if (q < 0 || q >= n_) throw std::out_of_range("qubit index out of range");
    }

    int n_;
    std::vector<cd> amps_;
};

}  // namespace qdp
