// Experiment orchestration: a single defaulted config drives staged commands
// (gen, split, train, tune, predict, evaluate, bench) whose composition is,
// by construction, exactly what `run` executes. Every output file embeds the
// config digest and seed.
#pragma once

#include <cstdint>
#include <string>

namespace qdp {

struct ExperimentConfig {
    // Data.
    std::string dataset;         // CSV path; empty lets `run` generate one
    double test_fraction = 0.2;
    double tune_fraction = 0.10;
    bool tune_disjoint = false;  // drop tuning rows from model training

    // Synthetic generator (cmd_gen and dataset-less runs).
    int gen_n = 600;
    int gen_d = 4;
    double gen_separation = 4.0;

    // Feature map.
    std::string map_kind = "z";
    int reps = 2;
    std::string entanglement = "linear";

    // Dual-form solver.
    double svc_c = 1.0;      // classical RBF baseline
    double qsvc_c = 1.0;     // quantum-kernel models
    double tol = 1e-3;
    int max_passes = 200;
    double rbf_gamma = 0.0;  // 0 = derive from training variance

    // Stochastic solver.
    std::int64_t pegasos_steps = 1000;
    double pegasos_c = 1000.0;

    // Chunking and aggregation.
    int chunk_size = 500;
    int min_tail = 50;
    std::string tune_metric = "f1";
    std::string tie_break = "smallest";

    // Mode selection.
    std::string mode = "auto";  // auto | staf | chunked
    int staf_cap = 500;         // direct quantum training refuses above this

    // Benchmark.
    int bench_repeats = 3;

    // Run identity.
    std::uint64_t seed = 42;
    std::string out_dir = "out";
};

// JSON object with exactly these keys; unknown keys are rejected, missing
// keys keep their defaults.
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// Canonical (sorted-key) JSON of everything except out_dir — the digest
// names the experiment, not where its files land.
std::string config_canonical_json(const ExperimentConfig& cfg);
std::uint64_t config_digest(const ExperimentConfig& cfg);

// Throws std::invalid_argument naming the offending field.
void validate(const ExperimentConfig& cfg);

// Stage commands. All files live under cfg.out_dir; each stage reads only
// what earlier stages wrote, so the sequence gen(optional) -> split -> train
// -> tune -> predict -> evaluate -> bench IS cmd_run.
std::string cmd_gen(const ExperimentConfig& cfg);  // returns the dataset path written
void cmd_split(const ExperimentConfig& cfg);
void cmd_train(const ExperimentConfig& cfg);
void cmd_tune(const ExperimentConfig& cfg);
void cmd_predict(const ExperimentConfig& cfg, const std::string& input_csv = "");
void cmd_evaluate(const ExperimentConfig& cfg);
void cmd_bench(const ExperimentConfig& cfg);
void cmd_run(const ExperimentConfig& cfg);

}  // namespace qdp
