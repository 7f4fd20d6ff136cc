// Dataset loading, deterministic splits, feature scaling, synthetic data.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdp {

struct LabeledDataset {
    Eigen::MatrixXd features;  // rows = commits, cols = metrics
    std::vector<int> labels;   // 0 = clean, 1 = buggy
    std::vector<std::string> feature_names;
    std::string source;

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index cols() const { return features.cols(); }
};

struct SplitSpec {
    double test_fraction = 0.2;
    double tune_fraction_of_train = 0.10;
    std::uint64_t seed = 0;
};

struct Split {
    LabeledDataset train;
    LabeledDataset tune;  // subset of train rows
    LabeledDataset test;
    std::vector<Eigen::Index> train_indices;  // into the original dataset
    std::vector<Eigen::Index> tune_indices;
    std::vector<Eigen::Index> test_indices;
};

// Per-feature affine map of the fitted [min, max] onto [0, pi].
struct ScalingParams {
    Eigen::VectorXd min;
    Eigen::VectorXd max;
};

// CSV with a header row; one column must be named "label" with 0/1 values,
// every other column is a numeric feature. Lines starting with '#' skipped.
LabeledDataset load_csv(const std::string& path);

// Round-trip-exact CSV writer (%.17g); comment lines are emitted verbatim
// after a '# ' prefix, before the header.
void save_csv(const LabeledDataset& ds, const std::string& path,
              const std::vector<std::string>& comments = {});

// Seeded shuffle; the shuffle's tail becomes the test set, the head the
// training set, and the tuning set is a random subset drawn from train.
// Sizing matches the source study's published split tables: the test count
// rounds up, the tune count rounds to nearest.
Split split(const LabeledDataset& ds, const SplitSpec& spec);

LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<Eigen::Index>& indices);

ScalingParams fit_scaler(const Eigen::Ref<const Eigen::MatrixXd>& train_features);

// Maps each feature into [0, pi]; constant features go to pi/2; out-of-range
// values clamp. Never throws on range excursions.
Eigen::MatrixXd apply_scaler(const ScalingParams& params,
                             const Eigen::Ref<const Eigen::MatrixXd>& features);

// Two seeded unit-variance Gaussian blobs: class 0 at the origin, class 1 at
// the given distance along the all-ones diagonal. Balanced labels.
LabeledDataset gen_synthetic(int n, int d, double separation, std::uint64_t seed);

// Shortest decimal form that parses back to the same binary64 value.
std::string format_double(double v);

}  // namespace qdp
