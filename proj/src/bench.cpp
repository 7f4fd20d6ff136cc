#include "qdp/bench.hpp"

#include <stdexcept>

namespace qdp {

BenchResult bench_predict(const BatchPredictor& predict_fn,
                          const Eigen::Ref<const Eigen::MatrixXd>& scaled_test, int repeats,
                          int chunk_id) {
    const auto n = scaled_test.rows();

    std::vector<int> batch;
    const double t1 = min_wall_seconds([&] { batch = predict_fn(scaled_test); }, repeats);

    std::vector<int> incremental;
    const double t2 = min_wall_seconds(
        [&] {
            incremental.clear();
            incremental.reserve(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) {
                const std::vector<int> one = predict_fn(scaled_test.row(i));
                incremental.insert(incremental.end(), one.begin(), one.end());
            }
        },
        repeats);

    if (batch != incremental)
        throw std::logic_error(
            "bench_predict: batch and one-at-a-time predictions differ — prediction must be "
            "instance-wise deterministic");

    BenchResult result;
    result.test1 = {Phase::test1, chunk_id, t1, static_cast<std::int64_t>(n)};
    result.test2 = {Phase::test2, chunk_id, t2, static_cast<std::int64_t>(n)};
    result.equal = true;
    result.predictions = std::move(batch);
    return result;
}

BenchResult bench_predict(const TrainedSvm& model,
                          const Eigen::Ref<const Eigen::MatrixXd>& scaled_test, int repeats) {
    return bench_predict(
        [&](const Eigen::Ref<const Eigen::MatrixXd>& rows) { return predict(model, rows); },
        scaled_test, repeats, model.chunk_id);
}

BenchResult bench_predict(const PegasosModel& model,
                          const Eigen::Ref<const Eigen::MatrixXd>& scaled_test, int repeats) {
    return bench_predict(
        [&](const Eigen::Ref<const Eigen::MatrixXd>& rows) { return predict(model, rows); },
        scaled_test, repeats, model.chunk_id);
}

std::vector<TimingRecord> bench_train(const Eigen::Ref<const Eigen::MatrixXd>& scaled_train,
                                      const std::vector<int>& labels01, const ChunkPlan& plan,
                                      const KernelBinding& kernel, double C, double tol,
                                      const ScalingParams& scaling,
                                      const std::string& scratch_dir) {
    std::vector<TimingRecord> records;
    train_chunks(scaled_train, labels01, plan, kernel, C, tol, scaling, scratch_dir,
                 /*seed=*/0, /*config_digest=*/0,
                 [&](int chunk_id, double seconds, std::int64_t instances) {
                     records.push_back({Phase::train, chunk_id, seconds, instances});
                 });
    return records;
}

}  // namespace qdp
