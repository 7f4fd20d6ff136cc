#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace oracle {

namespace {

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

MatrixCircuit::MatrixCircuit(int num_qubits) : n_(num_qubits) {
    if (num_qubits < 1 || num_qubits > 10)
        throw std::invalid_argument("oracle circuit supports 1..10 qubits");
    state_ = CVec::Zero(std::int64_t{1} << n_);
    state_[0] = 1.0;
}

void MatrixCircuit::apply(const CMat& op) { state_ = op * state_; }

// Little-endian lift: operator = I_(high) kron gate kron I_(low), where the
// low identity covers qubits below q.
void MatrixCircuit::apply_single(int q, const CMat& gate) {
    const Eigen::Index lo = Eigen::Index{1} << q;
    const Eigen::Index hi = Eigen::Index{1} << (n_ - 1 - q);
    apply(kron(CMat::Identity(hi, hi), kron(gate, CMat::Identity(lo, lo))));
}

void MatrixCircuit::h(int q) {
    CMat gate(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    gate << s, s, s, -s;
    apply_single(q, gate);
}

void MatrixCircuit::p(int q, double theta) {
    CMat gate = CMat::Identity(2, 2);
    gate(1, 1) = std::polar(1.0, theta);
    apply_single(q, gate);
}

void MatrixCircuit::cx(int control, int target) {
    const Eigen::Index dim = Eigen::Index{1} << n_;
    CMat op = CMat::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        const Eigen::Index image =
            (b >> control) & 1 ? b ^ (Eigen::Index{1} << target) : b;
        op(image, b) = 1.0;
    }
    apply(op);
}

CVec map_state(const Eigen::VectorXd& x, int reps, bool zz, bool full_entanglement) {
    const int n = static_cast<int>(x.size());
    MatrixCircuit circuit(n);
    constexpr double pi = std::numbers::pi;
    for (int r = 0; r < reps; ++r) {
        for (int q = 0; q < n; ++q) circuit.h(q);
        for (int q = 0; q < n; ++q) circuit.p(q, 2.0 * x[q]);
        if (zz) {
            if (full_entanglement) {
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) {
                        circuit.cx(i, j);
                        circuit.p(j, 2.0 * (pi - x[i]) * (pi - x[j]));
                        circuit.cx(i, j);
                    }
            } else {
                for (int i = 0; i + 1 < n; ++i) {
                    circuit.cx(i, i + 1);
                    circuit.p(i + 1, 2.0 * (pi - x[i]) * (pi - x[i + 1]));
                    circuit.cx(i, i + 1);
                }
            }
        }
    }
    return circuit.state();
}

double fidelity(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int reps, bool zz,
                bool full_entanglement) {
    const CVec sx = map_state(x, reps, zz, full_entanglement);
    const CVec sy = map_state(y, reps, zz, full_entanglement);
    return std::norm(sy.dot(sx));  // Eigen's dot conjugates the left operand
}

namespace {

// Projection of v onto {0 <= a <= C, y.a = 0} by bisection on the multiplier
// nu in a(nu)_i = clip(v_i - nu*y_i, 0, C); h(nu) = y.a(nu) is nonincreasing.
Eigen::VectorXd project_box_hyperplane(const Eigen::VectorXd& v, const std::vector<int>& y,
                                       double C) {
    const auto h = [&](double nu) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            s += y[static_cast<std::size_t>(i)] *
                 std::clamp(v[i] - nu * y[static_cast<std::size_t>(i)], 0.0, C);
        return s;
    };
    double lo = -(v.cwiseAbs().maxCoeff() + C + 1.0);
    double hi = -lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double nu = 0.5 * (lo + hi);
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out[i] = std::clamp(v[i] - nu * y[static_cast<std::size_t>(i)], 0.0, C);
    return out;
}

double dual_objective_of(const Eigen::MatrixXd& q, const Eigen::VectorXd& alpha) {
    return alpha.sum() - 0.5 * alpha.dot(q * alpha);
}

// Bias from the KKT conditions: free points pin it exactly; otherwise the
// bound points bracket it and the midpoint is taken.
double bias_of(const Eigen::MatrixXd& k, const std::vector<int>& y, double C,
               const Eigen::VectorXd& alpha) {
    const Eigen::Index n = alpha.size();
    Eigen::VectorXd coef(n);
    for (Eigen::Index i = 0; i < n; ++i) coef[i] = alpha[i] * y[static_cast<std::size_t>(i)];
    const Eigen::VectorXd g = k * coef;
    const double at_bound = 1e-8 * std::max(1.0, C);
    double sum = 0.0;
    int free_count = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const int yi = y[static_cast<std::size_t>(i)];
        const double e = yi - g[i];
        if (alpha[i] > at_bound && alpha[i] < C - at_bound) {
            sum += e;
            ++free_count;
        } else if ((alpha[i] <= at_bound && yi > 0) || (alpha[i] >= C - at_bound && yi < 0)) {
            lower = std::max(lower, e);
        } else {
            upper = std::min(upper, e);
        }
    }
    if (free_count > 0) return sum / free_count;
    if (std::isfinite(lower) && std::isfinite(upper)) return 0.5 * (lower + upper);
    return std::isfinite(lower) ? lower : (std::isfinite(upper) ? upper : 0.0);
}

double kkt_violation_of(const Eigen::MatrixXd& k, const std::vector<int>& y, double C,
                        const Eigen::VectorXd& alpha, double bias) {
    const Eigen::Index n = alpha.size();
    Eigen::VectorXd coef(n);
    for (Eigen::Index i = 0; i < n; ++i) coef[i] = alpha[i] * y[static_cast<std::size_t>(i)];
    const Eigen::VectorXd f = (k * coef).array() + bias;
    const double at_bound = 1e-8 * std::max(1.0, C);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double yf = y[static_cast<std::size_t>(i)] * f[i];
        double v = 0.0;
        if (alpha[i] <= at_bound)
            v = std::max(0.0, 1.0 - yf);
        else if (alpha[i] >= C - at_bound)
            v = std::max(0.0, yf - 1.0);
        else
            v = std::abs(yf - 1.0);
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

QpSolution solve_dual_qp(const Eigen::MatrixXd& k, const std::vector<int>& labels_pm, double C,
                         int max_iters) {
    const Eigen::Index n = k.rows();
    Eigen::MatrixXd q(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            q(i, j) = labels_pm[static_cast<std::size_t>(i)] *
                      labels_pm[static_cast<std::size_t>(j)] * k(i, j);

    const double step = 1.0 / (q.norm() + 1.0);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    const double at_bound = 1e-9 * std::max(1.0, C);

    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - q * alpha;
        const Eigen::VectorXd next = project_box_hyperplane(alpha + step * grad, labels_pm, C);
        const double moved = (next - alpha).lpNorm<Eigen::Infinity>();
        alpha = next;

        // Every few thousand steps, try an exact solve restricted to the
        // currently-free variables; accept it only when it stays feasible
        // and does not lose objective.
        if ((it + 1) % 4000 == 0 || moved < 1e-15) {
            std::vector<Eigen::Index> free_idx;
            for (Eigen::Index i = 0; i < n; ++i)
                if (alpha[i] > at_bound && alpha[i] < C - at_bound) free_idx.push_back(i);
            if (!free_idx.empty()) {
                const Eigen::Index m = static_cast<Eigen::Index>(free_idx.size());
                Eigen::MatrixXd sys(m + 1, m + 1);
                Eigen::VectorXd rhs(m + 1);
                double fixed_balance = 0.0;
                for (Eigen::Index i = 0; i < n; ++i)
                    if (alpha[i] <= at_bound || alpha[i] >= C - at_bound)
                        fixed_balance += labels_pm[static_cast<std::size_t>(i)] * alpha[i];
                for (Eigen::Index a = 0; a < m; ++a) {
                    const Eigen::Index ia = free_idx[static_cast<std::size_t>(a)];
                    double coupling = 0.0;
                    for (Eigen::Index i = 0; i < n; ++i)
                        if (alpha[i] <= at_bound || alpha[i] >= C - at_bound)
                            coupling += q(ia, i) * alpha[i];
                    rhs[a] = 1.0 - coupling;
                    sys(a, m) = labels_pm[static_cast<std::size_t>(ia)];
                    sys(m, a) = labels_pm[static_cast<std::size_t>(ia)];
                    for (Eigen::Index b = 0; b < m; ++b)
                        sys(a, b) = q(ia, free_idx[static_cast<std::size_t>(b)]);
                }
                sys(m, m) = 0.0;
                rhs[m] = -fixed_balance;
                const Eigen::VectorXd sol =
                    sys.completeOrthogonalDecomposition().solve(rhs);
                Eigen::VectorXd candidate = alpha;
                bool feasible = true;
                for (Eigen::Index a = 0; a < m; ++a) {
                    const double v = sol[a];
                    if (v < -1e-12 || v > C + 1e-12) {
                        feasible = false;
                        break;
                    }
                    candidate[free_idx[static_cast<std::size_t>(a)]] = std::clamp(v, 0.0, C);
                }
                if (feasible) {
                    double balance = 0.0;
                    for (Eigen::Index i = 0; i < n; ++i)
                        balance += labels_pm[static_cast<std::size_t>(i)] * candidate[i];
                    if (std::abs(balance) < 1e-10 &&
                        dual_objective_of(q, candidate) >= dual_objective_of(q, alpha) - 1e-12) {
                        alpha = candidate;
                        const double b = bias_of(k, labels_pm, C, alpha);
                        if (kkt_violation_of(k, labels_pm, C, alpha, b) < 1e-9) break;
                    }
                }
            }
            if (moved < 1e-15 && it > 2000) break;
        }
    }

    QpSolution out;
    out.alpha = alpha;
    out.bias = bias_of(k, labels_pm, C, alpha);
    out.objective = dual_objective_of(q, alpha);
    out.max_kkt_violation = kkt_violation_of(k, labels_pm, C, alpha, out.bias);
    return out;
}

double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    long long pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    if (pairs == 0) throw std::invalid_argument("pairwise_auc: need both classes");
    return wins / static_cast<double>(pairs);
}

ScanResult scan_threshold(const std::vector<double>& fractions, const std::vector<int>& labels,
                          const std::string& metric, bool prefer_smallest) {
    std::vector<double> candidates{0.0};
    for (double f : fractions) candidates.push_back(f);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    ScanResult best;
    bool first = true;
    for (double tau : candidates) {
        long long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < fractions.size(); ++i) {
            const int pred = fractions[i] >= tau ? 1 : 0;
            if (pred == 1 && labels[i] == 1) ++tp;
            if (pred == 1 && labels[i] == 0) ++fp;
            if (pred == 0 && labels[i] == 1) ++fn;
        }
        const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        double value = 0.0;
        if (metric == "precision")
            value = precision;
        else if (metric == "recall")
            value = recall;
        else
            value = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall)
                                             : 0.0;
        const bool better =
            first || (prefer_smallest ? value > best.metric : value >= best.metric);
        if (better) {
            best.threshold = tau;
            best.metric = value;
            first = false;
        }
    }
    return best;
}

Counts count_confusion(const std::vector<int>& labels, const std::vector<int>& preds) {
    Counts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1 && preds[i] == 1) ++c.tp;
        if (labels[i] == 0 && preds[i] == 1) ++c.fp;
        if (labels[i] == 1 && preds[i] == 0) ++c.fn;
        if (labels[i] == 0 && preds[i] == 0) ++c.tn;
    }
    return c;
}

namespace {

// Sweep every threshold along one projection direction in a single sorted
// pass; both label orientations are covered by also scoring the mirrored
// prediction.
void sweep_direction(const Eigen::VectorXd& projection, const std::vector<int>& labels,
                     HyperplaneFit& fit) {
    const Eigen::Index m = projection.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return projection[a] < projection[b]; });

    long long total_pos = 0;
    for (int v : labels) total_pos += v;
    const long long total = m;

    // Start with threshold below every point: everything predicted 1.
    long long tp = total_pos, fp = total - total_pos;
    auto score = [&](long long tp_, long long fp_, long long fn_, long long tn_) {
        const double acc = static_cast<double>(tp_ + tn_) / static_cast<double>(total);
        const double denom = static_cast<double>(2 * tp_ + fp_ + fn_);
        const double f1 = denom > 0.0 ? 2.0 * static_cast<double>(tp_) / denom : 0.0;
        fit.best_accuracy = std::max(fit.best_accuracy, acc);
        fit.best_f1 = std::max(fit.best_f1, f1);
        // Mirrored orientation: prediction flipped.
        const long long mtp = total_pos - tp_, mfp = tn_;
        const long long mfn = tp_, mtn = fp_;
        const double macc = static_cast<double>(mtp + mtn) / static_cast<double>(total);
        const double mdenom = static_cast<double>(2 * mtp + mfp + mfn);
        const double mf1 = mdenom > 0.0 ? 2.0 * static_cast<double>(mtp) / mdenom : 0.0;
        fit.best_accuracy = std::max(fit.best_accuracy, macc);
        fit.best_f1 = std::max(fit.best_f1, mf1);
    };
    score(tp, fp, total_pos - tp, (total - total_pos) - fp);
    for (Eigen::Index s = 0; s < m; ++s) {
        // Raise the threshold just past point `order[s]`; skip while the next
        // point shares the same projection value.
        const Eigen::Index i = order[static_cast<std::size_t>(s)];
        if (labels[static_cast<std::size_t>(i)] == 1)
            --tp;
        else
            --fp;
        if (s + 1 < m &&
            projection[order[static_cast<std::size_t>(s + 1)]] ==
                projection[order[static_cast<std::size_t>(s)]])
            continue;
        score(tp, fp, total_pos - tp, (total - total_pos) - fp);
    }
}

}  // namespace

HyperplaneFit best_hyperplane(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                              int attempts, std::uint64_t seed) {
    HyperplaneFit fit;
    const Eigen::Index d = x.cols();

    Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(d), mean1 = Eigen::VectorXd::Zero(d);
    long long n0 = 0, n1 = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (labels[static_cast<std::size_t>(i)] == 1) {
            mean1 += x.row(i).transpose();
            ++n1;
        } else {
            mean0 += x.row(i).transpose();
            ++n0;
        }
    }
    if (n0 > 0 && n1 > 0) {
        const Eigen::VectorXd w = mean1 / static_cast<double>(n1) - mean0 / static_cast<double>(n0);
        if (w.norm() > 0.0) sweep_direction(x * w, labels, fit);
    }

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int a = 0; a < attempts; ++a) {
        Eigen::VectorXd w(d);
        for (Eigen::Index k = 0; k < d; ++k) w[k] = normal(gen);
        if (w.norm() == 0.0) continue;
        sweep_direction(x * w, labels, fit);
    }
    return fit;
}

}  // namespace oracle
