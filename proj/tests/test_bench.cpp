#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "qdp/bench.hpp"
#include "qdp/rng.hpp"
#include "test_util.hpp"

using namespace qdp;
using testutil::TempDir;

namespace {

constexpr double kPi = std::numbers::pi;

ScalingParams unit_scaling(int d) {
    ScalingParams s;
    s.min = Eigen::VectorXd::Zero(d);
    s.max = Eigen::VectorXd::Constant(d, kPi);
    return s;
}

void blob_data(int n, std::uint64_t seed, Eigen::MatrixXd& x, std::vector<int>& labels01) {
    Rng rng(seed);
    x.resize(n, 2);
    labels01.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const int label = i % 2;
        const double cx = label == 0 ? 0.8 : 2.3;
        for (int j = 0; j < 2; ++j)
            x(i, j) = std::clamp(cx + 0.3 * rng.normal(), 0.0, kPi);
        labels01[static_cast<std::size_t>(i)] = label;
    }
}

}  // namespace

TEST_CASE("batch and incremental prediction are timed over the same outputs") {
    Eigen::MatrixXd x;
    std::vector<int> labels;
    blob_data(30, 21, x, labels);
    const KernelBinding kernel = KernelBinding::quantum({MapKind::z, 2, 2});
    const TrainedSvm model =
        train_svc(kernel_gram(kernel, x), x, labels, 10.0, 1e-3, kernel, unit_scaling(2));

    const BenchResult r = bench_predict(model, x, 2);
    CHECK(r.test1.phase == Phase::test1);
    CHECK(r.test2.phase == Phase::test2);
    CHECK(r.test1.chunk_id == -1);
    CHECK(r.test1.instances == 30);
    CHECK(r.test2.instances == 30);
    CHECK(r.test1.wall_seconds >= 0.0);
    CHECK(r.test2.wall_seconds >= 0.0);
    CHECK(r.equal);
    CHECK(r.predictions == predict(model, x));

    SUBCASE("the model's chunk id flows into the records") {
        TrainedSvm tagged = model;
        tagged.chunk_id = 7;
        const BenchResult rt = bench_predict(tagged, x, 1);
        CHECK(rt.test1.chunk_id == 7);
        CHECK(rt.test2.chunk_id == 7);
    }
    SUBCASE("repeats must be positive") {
        CHECK_THROWS_AS(bench_predict(model, x, 0), std::invalid_argument);
    }
}

TEST_CASE("an empty test set benches trivially") {
    Eigen::MatrixXd x;
    std::vector<int> labels;
    blob_data(20, 23, x, labels);
    const KernelBinding kernel = KernelBinding::quantum({MapKind::z, 2, 1});
    const TrainedSvm model =
        train_svc(kernel_gram(kernel, x), x, labels, 1.0, 1e-3, kernel, unit_scaling(2));
    const Eigen::MatrixXd empty(0, 2);
    const BenchResult r = bench_predict(model, empty, 1);
    CHECK(r.test1.instances == 0);
    CHECK(r.predictions.empty());
}

TEST_CASE("a predictor that answers differently per call is rejected") {
    // Batch call: all zeros. Row-at-a-time calls: all ones. The harness must
    // refuse to report timings for a function that is not instance-wise
    // deterministic.
    const BatchPredictor flaky = [](const Eigen::Ref<const Eigen::MatrixXd>& rows) {
        return std::vector<int>(static_cast<std::size_t>(rows.rows()), rows.rows() > 1 ? 0 : 1);
    };
    const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
    CHECK_THROWS_WITH_AS(bench_predict(flaky, x, 1),
                         doctest::Contains("instance-wise deterministic"), std::logic_error);
}

TEST_CASE("custom predictors carry an explicit chunk id") {
    const BatchPredictor constant = [](const Eigen::Ref<const Eigen::MatrixXd>& rows) {
        return std::vector<int>(static_cast<std::size_t>(rows.rows()), 1);
    };
    const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(5, 3);
    const BenchResult r = bench_predict(constant, x, 3, 9);
    CHECK(r.test1.chunk_id == 9);
    CHECK(r.predictions == std::vector<int>(5, 1));
}

TEST_CASE("count-model prediction benches like the dual-form model") {
    Eigen::MatrixXd x;
    std::vector<int> labels;
    blob_data(24, 29, x, labels);
    const KernelBinding kernel = KernelBinding::rbf(0.8);
    const PegasosModel model = train_pegasos(x, labels, kernel, 100.0, 200, 5, unit_scaling(2));
    const BenchResult r = bench_predict(model, x, 2);
    CHECK(r.test1.instances == 24);
    CHECK(r.predictions == predict(model, x));
}

TEST_CASE("training timings cover every trained chunk") {
    TempDir dir("bench");
    Eigen::MatrixXd x;
    std::vector<int> labels;
    blob_data(90, 31, x, labels);
    const KernelBinding kernel = KernelBinding::quantum({MapKind::z, 2, 2});
    const ChunkPlan plan = make_chunks(90, 40, 5, 17);
    REQUIRE(plan.chunks.size() == 3);  // 40 + 40 + 10

    const std::vector<TimingRecord> records =
        bench_train(x, labels, plan, kernel, 10.0, 1e-3, unit_scaling(2), dir.path());
    REQUIRE(records.size() == 3);
    std::vector<std::int64_t> sizes;
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].phase == Phase::train);
        CHECK(records[i].chunk_id == static_cast<int>(i));
        CHECK(records[i].wall_seconds >= 0.0);
        sizes.push_back(records[i].instances);
    }
    CHECK(sizes == std::vector<std::int64_t>{40, 40, 10});
}
