// Evaluation reports: one row per algorithm with the six headline metrics,
// serialized as CSV (fixed column order) and as structured JSON.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdp/metrics.hpp"
#include "qdp/timing.hpp"

namespace qdp {

struct EvalReport {
    std::string algorithm;  // e.g. "SVC", "PQSVC", "QSVC", "Global QSVC", "QSVC chunk 3"
    ConfusionMatrix cm;
    MetricSet metrics;
    std::string score_kind;  // "decision_function" or "vote_fraction"
};

// columns: algorithm,accuracy,precision,recall,f1,roc_auc,mcc — with
// include_accuracy=false the accuracy column is dropped (the small-data
// report shape). roc_auc prints empty when not applicable.
void write_report_csv(const std::vector<EvalReport>& rows, const std::string& path,
                      std::uint64_t config_digest, std::uint64_t seed, bool include_accuracy);

// Full structured report: metrics, confusion counts, and score kinds. No
// wall-clock values — timing lives in its own CSV so reruns stay
// byte-identical.
void write_report_json(const std::vector<EvalReport>& rows, const std::string& path,
                       std::uint64_t config_digest, std::uint64_t seed,
                       const std::vector<std::string>& warnings);

void write_timings_csv(const std::vector<TimingRecord>& records, const std::string& path,
                       std::uint64_t config_digest, std::uint64_t seed);

std::string digest_hex(std::uint64_t digest);

}  // namespace qdp
