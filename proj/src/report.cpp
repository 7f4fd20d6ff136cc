#include "qdp/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "qdp/dataio.hpp"

namespace qdp {

std::string digest_hex(std::uint64_t digest) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report file: " + path);
    return out;
}

}  // namespace

void write_report_csv(const std::vector<EvalReport>& rows, const std::string& path,
                      std::uint64_t config_digest, std::uint64_t seed, bool include_accuracy) {
    std::ofstream out = open_out(path);
    out << "# config_digest=" << digest_hex(config_digest) << " seed=" << seed << "\n";
    out << "algorithm," << (include_accuracy ? "accuracy," : "")
        << "precision,recall,f1,roc_auc,mcc\n";
    for (const EvalReport& r : rows) {
        out << r.algorithm << ",";
        if (include_accuracy) out << format_double(r.metrics.accuracy) << ",";
        out << format_double(r.metrics.precision) << "," << format_double(r.metrics.recall) << ","
            << format_double(r.metrics.f1) << ",";
        if (r.metrics.roc_auc) out << format_double(*r.metrics.roc_auc);
        out << "," << format_double(r.metrics.mcc) << "\n";
    }
    if (!out) throw std::runtime_error("report write failed: " + path);
}

void write_report_json(const std::vector<EvalReport>& rows, const std::string& path,
                       std::uint64_t config_digest, std::uint64_t seed,
                       const std::vector<std::string>& warnings) {
    nlohmann::json doc;
    doc["config_digest"] = digest_hex(config_digest);
    doc["seed"] = seed;
    doc["warnings"] = warnings;
    nlohmann::json algos = nlohmann::json::array();
    for (const EvalReport& r : rows) {
        nlohmann::json row;
        row["algorithm"] = r.algorithm;
        row["score_kind"] = r.score_kind;
        row["confusion"] = {{"tp", r.cm.tp}, {"fp", r.cm.fp}, {"fn", r.cm.fn}, {"tn", r.cm.tn}};
        row["accuracy"] = r.metrics.accuracy;
        row["precision"] = r.metrics.precision;
        row["recall"] = r.metrics.recall;
        row["f1"] = r.metrics.f1;
        if (r.metrics.roc_auc)
            row["roc_auc"] = *r.metrics.roc_auc;
        else
            row["roc_auc"] = nullptr;
        row["mcc"] = r.metrics.mcc;
        algos.push_back(row);
    }
    doc["results"] = algos;

    std::ofstream out = open_out(path);
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("report write failed: " + path);
}

void write_timings_csv(const std::vector<TimingRecord>& records, const std::string& path,
                       std::uint64_t config_digest, std::uint64_t seed) {
    std::ofstream out = open_out(path);
    out << "# config_digest=" << digest_hex(config_digest) << " seed=" << seed << "\n";
    out << "phase,chunk_id,instances,wall_seconds\n";
    for (const TimingRecord& r : records)
        out << to_string(r.phase) << "," << r.chunk_id << "," << r.instances << ","
            << format_double(r.wall_seconds) << "\n";
    if (!out) throw std::runtime_error("timings write failed: " + path);
}

}  // namespace qdp
