#include "qdp/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qdp/rng.hpp"

namespace qdp {

namespace {

// Working state of the two-variable decomposition. The error cache holds
// E_i = f(x_i) - y_i for the current alpha/bias iterate.
struct SmoState {
    Eigen::Ref<const Eigen::MatrixXd> k;  // view into the caller's Gram
    const std::vector<int>& y;
    double c;
    double tol;  // violation tolerance the inner loop enforces
    Eigen::VectorXd alpha;
    Eigen::VectorXd errors;
    double bias = 0.0;
    Rng rng;

    SmoState(const Eigen::Ref<const Eigen::MatrixXd>& gram, const std::vector<int>& labels,
             double C, double tolerance)
        : k(gram),
          y(labels),
          c(C),
          tol(tolerance),
          alpha(Eigen::VectorXd::Zero(gram.rows())),
          errors(gram.rows()),
          rng(derive_seed(0x514450u, "two-variable-working-set")) {
        for (Eigen::Index i = 0; i < errors.size(); ++i) errors[i] = -labels[i];
    }

    bool non_bound(Eigen::Index i) const { return alpha[i] > 0.0 && alpha[i] < c; }

    bool take_step(Eigen::Index i1, Eigen::Index i2) {
        if (i1 == i2) return false;
        const double alph1 = alpha[i1];
        const double alph2 = alpha[i2];
        const double y1 = y[i1];
        const double y2 = y[i2];
        const double e1 = errors[i1];
        const double e2 = errors[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, alph2 - alph1);
            hi = std::min(c, c + alph2 - alph1);
        } else {
            lo = std::max(0.0, alph2 + alph1 - c);
            hi = std::min(c, alph2 + alph1);
        }
        if (lo >= hi) return false;

        const double k11 = k(i1, i1);
        const double k12 = k(i1, i2);
        const double k22 = k(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2;
        if (eta > 0.0) {
            a2 = std::clamp(alph2 + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // Flat or concave direction (round-off on a PSD Gram): the
            // objective gain is exactly quadratic in a2, so compare endpoints.
            auto gain = [&](double a) {
                const double d = a - alph2;
                return y2 * (e1 - e2) * d - 0.5 * eta * d * d;
            };
            const double lo_gain = gain(lo);
            const double hi_gain = gain(hi);
            if (lo_gain > hi_gain + 1e-12)
                a2 = lo;
            else if (hi_gain > lo_gain + 1e-12)
                a2 = hi;
            else
                return false;
        }
        if (std::abs(a2 - alph2) < 1e-12 * (a2 + alph2 + 1e-12)) return false;

        double a1 = alph1 + s * (alph2 - a2);
        // Snap round-off excursions and push the residue back through the
        // equality constraint so sum(alpha_i y_i) stays exactly zero.
        if (a1 < 0.0) {
            a1 = 0.0;
            a2 = alph2 + s * alph1;
        } else if (a1 > c) {
            a1 = c;
            a2 = alph2 + s * (alph1 - c);
        }

        const double delta1 = y1 * (a1 - alph1);
        const double delta2 = y2 * (a2 - alph2);
        const double b1 = bias - e1 - delta1 * k11 - delta2 * k12;
        const double b2 = bias - e2 - delta1 * k12 - delta2 * k22;
        double new_bias;
        if (a1 > 0.0 && a1 < c)
            new_bias = b1;
        else if (a2 > 0.0 && a2 < c)
            new_bias = b2;
        else
            new_bias = 0.5 * (b1 + b2);

        errors += delta1 * k.col(i1) + delta2 * k.col(i2);
        errors.array() += new_bias - bias;
        alpha[i1] = a1;
        alpha[i2] = a2;
        bias = new_bias;
        return true;
    }

    bool examine(Eigen::Index i2) {
        const double y2 = y[i2];
        const double alph2 = alpha[i2];
        const double r2 = errors[i2] * y2;
        const bool violates = (r2 < -tol && alph2 < c) || (r2 > tol && alph2 > 0.0);
        if (!violates) return false;

        // Second-choice heuristic: largest |E1 - E2| among non-bound points.
        Eigen::Index best = -1;
        double best_gap = -1.0;
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            if (!non_bound(i)) continue;
            const double gap = std::abs(errors[i] - errors[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return true;

        const auto n = alpha.size();
        const auto offset = static_cast<Eigen::Index>(
            rng.uniform_below(static_cast<std::uint64_t>(n)));
        for (Eigen::Index step = 0; step < n; ++step) {
            const Eigen::Index i1 = (offset + step) % n;
            if (non_bound(i1) && take_step(i1, i2)) return true;
        }
        for (Eigen::Index step = 0; step < n; ++step) {
            const Eigen::Index i1 = (offset + step) % n;
            if (take_step(i1, i2)) return true;
        }
        return false;
    }
};

}  // namespace

SmoResult smo_solve(const Eigen::Ref<const Eigen::MatrixXd>& gram, const std::vector<int>& labels,
                    double C, double tol, int max_passes) {
    if (gram.rows() != gram.cols()) throw std::invalid_argument("smo_solve: gram must be square");
    if (static_cast<std::size_t>(gram.rows()) != labels.size())
        throw std::invalid_argument("smo_solve: gram/label size mismatch");
    if (!(C > 0.0)) throw std::invalid_argument("smo_solve: C must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("smo_solve: tol must be positive");
    bool has_pos = false, has_neg = false;
    for (int l : labels) {
        if (l == 1)
            has_pos = true;
        else if (l == -1)
            has_neg = true;
        else
            throw std::invalid_argument("smo_solve: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw std::invalid_argument("smo_solve: both classes required");

    // The loop enforces half the requested tolerance so the final bias
    // recomputation below cannot push any point's violation past tol.
    SmoState state(gram, labels, C, tol / 2.0);
    const auto n = gram.rows();

    bool examine_all = true;
    bool converged = false;
    for (int pass = 0; pass < max_passes; ++pass) {
        int num_changed = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (examine_all || state.non_bound(i))
                num_changed += state.examine(i) ? 1 : 0;
        }
        if (examine_all) {
            if (num_changed == 0) {
                converged = true;
                break;
            }
            examine_all = false;
        } else if (num_changed == 0) {
            examine_all = true;
        }
    }

    // Final bias: average the per-point requirement y_i - g_i over free
    // support vectors; with none free, take the midpoint of the bracket the
    // bound points impose.
    Eigen::VectorXd coef(n);
    for (Eigen::Index i = 0; i < n; ++i) coef[i] = state.alpha[i] * labels[i];
    const Eigen::VectorXd g = gram * coef;

    // Round-off can leave an alpha a few ulps inside a box bound; such a point
    // is a bound SV in every meaningful sense, and averaging its bias
    // requirement into the free-SV mean would corrupt the bias badly. Classify
    // boundedness with a tolerance band instead of exact comparison.
    const double edge = 1e-8 * std::max(1.0, C);
    double free_sum = 0.0;
    int free_count = 0;
    double bracket_lo = -std::numeric_limits<double>::infinity();
    double bracket_hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double required = labels[i] - g[i];
        const bool at_lower = state.alpha[i] <= edge;
        const bool at_upper = state.alpha[i] >= C - edge;
        if (!at_lower && !at_upper) {
            free_sum += required;
            ++free_count;
            continue;
        }
        // alpha at 0 with y=+1 (or at C with y=-1) demands bias >= required;
        // the mirrored cases demand bias <= required.
        if ((at_lower && labels[i] == 1) || (at_upper && labels[i] == -1))
            bracket_lo = std::max(bracket_lo, required);
        if ((at_lower && labels[i] == -1) || (at_upper && labels[i] == 1))
            bracket_hi = std::min(bracket_hi, required);
    }

    SmoResult result;
    result.alpha = state.alpha;
    result.converged = converged;
    if (free_count > 0) {
        result.bias = free_sum / free_count;
    } else if (std::isfinite(bracket_lo) && std::isfinite(bracket_hi)) {
        result.bias = 0.5 * (bracket_lo + bracket_hi);
    } else if (std::isfinite(bracket_lo)) {
        result.bias = bracket_lo;
    } else if (std::isfinite(bracket_hi)) {
        result.bias = bracket_hi;
    } else {
        result.bias = 0.0;
    }
    return result;
}

double dual_objective(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                      const std::vector<int>& labels,
                      const Eigen::Ref<const Eigen::VectorXd>& alpha) {
    Eigen::VectorXd coef(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) coef[i] = alpha[i] * labels[i];
    return alpha.sum() - 0.5 * coef.dot(gram * coef);
}

TrainedSvm train_svc(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                     const Eigen::Ref<const Eigen::MatrixXd>& scaled_features,
                     const std::vector<int>& labels01, double C, double tol,
                     const KernelBinding& kernel, const ScalingParams& scaling,
                     int max_passes) {
    if (gram.rows() != scaled_features.rows())
        throw std::invalid_argument("train_svc: gram/feature row mismatch");
    if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("train_svc: gram must be symmetric");

    std::vector<int> y(labels01.size());
    for (std::size_t i = 0; i < labels01.size(); ++i) {
        if (labels01[i] != 0 && labels01[i] != 1)
            throw std::invalid_argument("train_svc: labels must be 0 or 1");
        y[i] = labels01[i] == 1 ? 1 : -1;
    }

    const SmoResult sol = smo_solve(gram, y, C, tol, max_passes);

    const double cutoff = 1e-14 * std::max(1.0, C);
    std::vector<Eigen::Index> supports;
    for (Eigen::Index i = 0; i < sol.alpha.size(); ++i)
        if (sol.alpha[i] > cutoff) supports.push_back(i);

    TrainedSvm model;
    model.support_vectors.resize(static_cast<Eigen::Index>(supports.size()),
                                 scaled_features.cols());
    model.dual_coefs.resize(static_cast<Eigen::Index>(supports.size()));
    for (std::size_t s = 0; s < supports.size(); ++s) {
        model.support_vectors.row(static_cast<Eigen::Index>(s)) =
            scaled_features.row(supports[s]);
        model.dual_coefs[static_cast<Eigen::Index>(s)] =
            sol.alpha[supports[s]] * y[static_cast<std::size_t>(supports[s])];
    }
    model.bias = sol.bias;
    model.C = C;
    model.kernel = kernel;
    model.scaling = scaling;
    model.converged = sol.converged;
    return model;
}

double decision_function(const TrainedSvm& model,
                         const Eigen::Ref<const Eigen::VectorXd>& kernel_row) {
    if (kernel_row.size() != model.dual_coefs.size())
        throw std::invalid_argument("decision_function: kernel row length mismatch");
    return model.dual_coefs.dot(kernel_row) + model.bias;
}

Eigen::VectorXd decision_values(const TrainedSvm& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples) {
    if (scaled_samples.rows() == 0) return Eigen::VectorXd();
    if (model.support_vectors.rows() == 0)
        return Eigen::VectorXd::Constant(scaled_samples.rows(), model.bias);
    const Eigen::MatrixXd rows = kernel_gram(model.kernel, scaled_samples, model.support_vectors);
    return (rows * model.dual_coefs).array() + model.bias;
}

std::vector<int> predict(const TrainedSvm& model,
                         const Eigen::Ref<const Eigen::MatrixXd>& scaled_samples) {
    const Eigen::VectorXd f = decision_values(model, scaled_samples);
    std::vector<int> labels(static_cast<std::size_t>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) labels[static_cast<std::size_t>(i)] = f[i] >= 0.0;
    return labels;
}

}  // namespace qdp
