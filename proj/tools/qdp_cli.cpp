// Command-line front end: each subcommand is a thin wrapper around one
// pipeline stage, and `run` is their composition. Exit code 1 on any error,
// with the failing stage named on stderr.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qdp/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"quantum-kernel defect prediction pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string input_csv;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "RNG seed (overrides the config)");
        return sub;
    };

    add_common(app.add_subcommand("gen", "generate a synthetic dataset"));
    add_common(app.add_subcommand("split", "split the dataset into train/tune/test"));
    add_common(app.add_subcommand("train", "train baselines and the quantum models"));
    add_common(app.add_subcommand("tune", "pick the aggregation threshold on the tuning split"));
    CLI::App* predict = add_common(
        app.add_subcommand("predict", "write per-instance scores, vote fractions, and labels"));
    predict->add_option("--input", input_csv,
                        "CSV to predict on (default: the held-out test split)");
    add_common(app.add_subcommand("evaluate", "score predictions against the test labels"));
    add_common(app.add_subcommand("bench", "time training and batch vs one-at-a-time prediction"));
    add_common(app.add_subcommand("run", "all stages in order"));

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    const std::string stage = sub->get_name();

    try {
        qdp::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = qdp::load_config(config_path);
        if (sub->count("--out") > 0) cfg.out_dir = out_dir;
        if (sub->count("--seed") > 0) cfg.seed = seed;

        if (stage == "gen") {
            std::cout << qdp::cmd_gen(cfg) << "\n";
        } else if (stage == "split") {
            qdp::cmd_split(cfg);
        } else if (stage == "train") {
            qdp::cmd_train(cfg);
        } else if (stage == "tune") {
            qdp::cmd_tune(cfg);
        } else if (stage == "predict") {
            qdp::cmd_predict(cfg, input_csv);
        } else if (stage == "evaluate") {
            qdp::cmd_evaluate(cfg);
        } else if (stage == "bench") {
            qdp::cmd_bench(cfg);
        } else {
            qdp::cmd_run(cfg);
        }
    } catch (const std::exception& e) {
        // cmd_run already prefixes the inner stage; single-stage commands get
        // their own name here.
        const std::string what = e.what();
        if (stage == "run" && what.rfind("stage ", 0) == 0)
            std::cerr << "error: " << what << "\n";
        else
            std::cerr << "error: stage " << stage << ": " << what << "\n";
        return 1;
    }
    return 0;
}
