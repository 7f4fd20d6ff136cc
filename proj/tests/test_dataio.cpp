#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "qdp/dataio.hpp"
#include "test_util.hpp"

using namespace qdp;
using testutil::TempDir;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("csv loading: happy path, comments, and precise errors") {
    TempDir dir("dataio");
    const std::string path = dir.file("tiny.csv");
    testutil::write_text(path,
                         "# a comment line\n"
                         "f_a,f_b,label,f_c\n"
                         "1.5,2.5,1,3.5\n"
                         "\n"
                         "-0.5,0.25,0,1e-3\n");
    const LabeledDataset ds = load_csv(path);
    REQUIRE(ds.rows() == 2);
    REQUIRE(ds.cols() == 3);
    CHECK(ds.features(0, 0) == 1.5);
    CHECK(ds.features(1, 2) == 1e-3);
    CHECK(ds.labels == std::vector<int>{1, 0});
    CHECK(ds.feature_names == std::vector<std::string>{"f_a", "f_b", "f_c"});

    testutil::write_text(dir.file("bad_label.csv"), "x,label\n1.0,2\n");
    CHECK_THROWS_WITH_AS(load_csv(dir.file("bad_label.csv")),
                         doctest::Contains("row 1"), std::runtime_error);

    testutil::write_text(dir.file("no_label.csv"), "x,y\n1.0,2.0\n");
    CHECK_THROWS_AS(load_csv(dir.file("no_label.csv")), std::runtime_error);

    testutil::write_text(dir.file("empty.csv"), "");
    CHECK_THROWS_AS(load_csv(dir.file("empty.csv")), std::runtime_error);

    testutil::write_text(dir.file("bad_cell.csv"), "x,label\noops,1\n");
    CHECK_THROWS_AS(load_csv(dir.file("bad_cell.csv")), std::runtime_error);

    testutil::write_text(dir.file("ragged.csv"), "x,label\n1.0,1,9\n");
    CHECK_THROWS_AS(load_csv(dir.file("ragged.csv")), std::runtime_error);
}

TEST_CASE("save then load reproduces every double bit-for-bit") {
    TempDir dir("roundtrip");
    LabeledDataset ds;
    ds.features.resize(4, 3);
    ds.features << 0.1, 1e-300, kPi,
        -0.0, 1.0 / 3.0, 6.02214076e23,
        -17.25, 5e-324, 0.30000000000000004,
        2.0, -1e308, 1e16;
    ds.labels = {0, 1, 1, 0};
    ds.feature_names = {"a", "b", "c"};
    save_csv(ds, dir.file("out.csv"), {"config_digest=deadbeef seed=1"});
    const LabeledDataset back = load_csv(dir.file("out.csv"));
    REQUIRE(back.rows() == 4);
    CHECK((back.features.array() == ds.features.array()).all());
    CHECK(back.labels == ds.labels);
    CHECK(back.feature_names == ds.feature_names);
}

TEST_CASE("split reproduces the published size arithmetic") {
    const LabeledDataset ds = gen_synthetic(8604, 2, 1.0, 99);
    SplitSpec spec;
    spec.test_fraction = 0.2;
    spec.tune_fraction_of_train = 0.10;
    spec.seed = 4242;
    const Split sp = split(ds, spec);
    CHECK(sp.train.rows() == 6883);
    CHECK(sp.tune.rows() == 688);
    CHECK(sp.test.rows() == 1721);
}

TEST_CASE("split partitions cleanly and deterministically") {
    const LabeledDataset ds = gen_synthetic(10, 2, 3.0, 1);
    SplitSpec spec;
    spec.test_fraction = 0.5;
    spec.tune_fraction_of_train = 0.2;
    spec.seed = 7;
    const Split a = split(ds, spec);
    CHECK(a.train.rows() == 5);
    CHECK(a.test.rows() == 5);
    CHECK(a.tune.rows() == 1);

    std::set<Eigen::Index> train_set(a.train_indices.begin(), a.train_indices.end());
    std::set<Eigen::Index> test_set(a.test_indices.begin(), a.test_indices.end());
    CHECK(train_set.size() == 5);
    CHECK(test_set.size() == 5);
    for (Eigen::Index i : test_set) CHECK(train_set.count(i) == 0);
    // tune is a subset of train.
    for (Eigen::Index i : a.tune_indices) CHECK(train_set.count(i) == 1);

    const Split b = split(ds, spec);
    CHECK(a.train_indices == b.train_indices);
    CHECK(a.tune_indices == b.tune_indices);
    CHECK(a.test_indices == b.test_indices);

    SplitSpec other = spec;
    other.seed = 8;
    const Split c = split(ds, other);
    CHECK(a.train_indices != c.train_indices);
}

TEST_CASE("split rejects degenerate outcomes and bad fractions") {
    const LabeledDataset ds = gen_synthetic(4, 2, 3.0, 1);
    SplitSpec spec;
    spec.test_fraction = 0.9;  // test would swallow every row
    spec.tune_fraction_of_train = 0.10;
    CHECK_THROWS_AS(split(ds, spec), std::invalid_argument);

    spec.test_fraction = 1.2;
    CHECK_THROWS_AS(split(ds, spec), std::invalid_argument);
    spec.test_fraction = 0.2;
    spec.tune_fraction_of_train = 0.0;
    CHECK_THROWS_AS(split(ds, spec), std::invalid_argument);

    LabeledDataset single = gen_synthetic(8, 2, 1.0, 2);
    std::fill(single.labels.begin(), single.labels.end(), 1);
    spec.tune_fraction_of_train = 0.3;
    CHECK_THROWS_AS(split(single, spec), std::invalid_argument);
}

TEST_CASE("scaler maps the fitted range onto [0, pi] with clamping") {
    Eigen::MatrixXd train(3, 2);
    train << 0.0, 7.0,
        5.0, 7.0,
        10.0, 7.0;
    const ScalingParams params = fit_scaler(train);
    const Eigen::MatrixXd scaled = apply_scaler(params, train);
    CHECK(scaled(0, 0) == doctest::Approx(0.0));
    CHECK(scaled(1, 0) == doctest::Approx(kPi / 2.0));
    CHECK(scaled(2, 0) == doctest::Approx(kPi));
    // Constant feature pins to the middle of the interval.
    for (int i = 0; i < 3; ++i) CHECK(scaled(i, 1) == doctest::Approx(kPi / 2.0));

    Eigen::MatrixXd probe(2, 2);
    probe << -3.0, 7.0, 25.0, 7.0;
    const Eigen::MatrixXd clamped = apply_scaler(params, probe);
    CHECK(clamped(0, 0) == 0.0);
    CHECK(clamped(1, 0) == doctest::Approx(kPi));

    CHECK_THROWS_AS(apply_scaler(params, Eigen::MatrixXd::Zero(1, 3)), std::invalid_argument);
}

TEST_CASE("synthetic blobs are balanced and separable when far apart") {
    const LabeledDataset ds = gen_synthetic(100, 3, 2.0, 5);
    REQUIRE(ds.rows() == 100);
    const long long positives = std::count(ds.labels.begin(), ds.labels.end(), 1);
    CHECK(positives == 50);
    CHECK(ds.features.allFinite());

    const LabeledDataset far = gen_synthetic(120, 2, 6.0, 6);
    const oracle::HyperplaneFit fit = oracle::best_hyperplane(far.features, far.labels, 10000, 3);
    CHECK(fit.best_accuracy >= 0.99);

    const LabeledDataset same1 = gen_synthetic(50, 2, 1.5, 77);
    const LabeledDataset same2 = gen_synthetic(50, 2, 1.5, 77);
    CHECK((same1.features.array() == same2.features.array()).all());

    CHECK_THROWS_AS(gen_synthetic(3, 2, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_synthetic(10, 0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_synthetic(10, 2, -1.0, 1), std::invalid_argument);
}

TEST_CASE("take_rows picks exactly the requested rows in order") {
    LabeledDataset ds;
    ds.features.resize(4, 1);
    ds.features << 10, 11, 12, 13;
    ds.labels = {0, 1, 0, 1};
    ds.feature_names = {"v"};
    const LabeledDataset out = take_rows(ds, {3, 0});
    REQUIRE(out.rows() == 2);
    CHECK(out.features(0, 0) == 13);
    CHECK(out.features(1, 0) == 10);
    CHECK(out.labels == std::vector<int>{1, 0});
    CHECK_THROWS_AS(take_rows(ds, {4}), std::out_of_range);
}

TEST_CASE("format_double emits shortest exact decimal representations") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.30000000000000004) == "0.30000000000000004");
    for (double v : {5e-324, -1e308, 1.0 / 3.0, 6.02214076e23, -0.0, kPi}) {
        const std::string text = format_double(v);
        const double back = std::strtod(text.c_str(), nullptr);
        CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
}
