#include "qdp/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qdp/bench.hpp"
#include "qdp/dataio.hpp"
#include "qdp/ensemble.hpp"
#include "qdp/kernel.hpp"
#include "qdp/metrics.hpp"
#include "qdp/model_io.hpp"
#include "qdp/pegasos.hpp"
#include "qdp/report.hpp"
#include "qdp/rng.hpp"
#include "qdp/svm.hpp"

namespace qdp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- config ----------------------------------------------------------------

json config_to_json(const ExperimentConfig& c, bool include_out_dir) {
    json j;
    j["dataset"] = c.dataset;
    j["test_fraction"] = c.test_fraction;
    j["tune_fraction"] = c.tune_fraction;
    j["tune_disjoint"] = c.tune_disjoint;
    j["gen_n"] = c.gen_n;
    j["gen_d"] = c.gen_d;
    j["gen_separation"] = c.gen_separation;
    j["map_kind"] = c.map_kind;
    j["reps"] = c.reps;
    j["entanglement"] = c.entanglement;
    j["svc_c"] = c.svc_c;
    j["qsvc_c"] = c.qsvc_c;
    j["tol"] = c.tol;
    j["max_passes"] = c.max_passes;
    j["rbf_gamma"] = c.rbf_gamma;
    j["pegasos_steps"] = c.pegasos_steps;
    j["pegasos_c"] = c.pegasos_c;
    j["chunk_size"] = c.chunk_size;
    j["min_tail"] = c.min_tail;
    j["tune_metric"] = c.tune_metric;
    j["tie_break"] = c.tie_break;
    j["mode"] = c.mode;
    j["staf_cap"] = c.staf_cap;
    j["bench_repeats"] = c.bench_repeats;
    j["seed"] = c.seed;
    if (include_out_dir) j["out_dir"] = c.out_dir;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    static const std::set<std::string> known = {
        "dataset",      "test_fraction", "tune_fraction", "tune_disjoint", "gen_n",
        "gen_d",        "gen_separation", "map_kind",     "reps",          "entanglement",
        "svc_c",        "qsvc_c",        "tol",           "max_passes",    "rbf_gamma",
        "pegasos_steps", "pegasos_c",    "chunk_size",    "min_tail",      "tune_metric",
        "tie_break",    "mode",          "staf_cap",      "bench_repeats", "seed",
        "out_dir"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw std::invalid_argument("unknown config key: " + key);

    ExperimentConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("dataset", c.dataset);
    get("test_fraction", c.test_fraction);
    get("tune_fraction", c.tune_fraction);
    get("tune_disjoint", c.tune_disjoint);
    get("gen_n", c.gen_n);
    get("gen_d", c.gen_d);
    get("gen_separation", c.gen_separation);
    get("map_kind", c.map_kind);
    get("reps", c.reps);
    get("entanglement", c.entanglement);
    get("svc_c", c.svc_c);
    get("qsvc_c", c.qsvc_c);
    get("tol", c.tol);
    get("max_passes", c.max_passes);
    get("rbf_gamma", c.rbf_gamma);
    get("pegasos_steps", c.pegasos_steps);
    get("pegasos_c", c.pegasos_c);
    get("chunk_size", c.chunk_size);
    get("min_tail", c.min_tail);
    get("tune_metric", c.tune_metric);
    get("tie_break", c.tie_break);
    get("mode", c.mode);
    get("staf_cap", c.staf_cap);
    get("bench_repeats", c.bench_repeats);
    get("seed", c.seed);
    get("out_dir", c.out_dir);
    return c;
}

fs::path path_in(const ExperimentConfig& cfg, const std::string& name) {
    return fs::path(cfg.out_dir) / name;
}

std::vector<std::string> stamp(const ExperimentConfig& cfg) {
    return {"config_digest=" + digest_hex(config_digest(cfg)) +
            " seed=" + std::to_string(cfg.seed)};
}

// ---- split artifacts ---------------------------------------------------------

struct StageData {
    LabeledDataset train;
    LabeledDataset tune;
    LabeledDataset test;
    std::vector<Eigen::Index> tune_positions;  // rows of train.csv that are tuning rows
};

LabeledDataset load_required(const fs::path& p, const char* stage_hint) {
    if (!fs::exists(p))
        throw std::runtime_error("missing input " + p.string() + "; run the " +
                                 std::string(stage_hint) + " stage first");
    return load_csv(p.string());
}

void write_split_manifest(const ExperimentConfig& cfg, const Split& sp) {
    std::ofstream out(path_in(cfg, "split_manifest.csv"));
    if (!out) throw std::runtime_error("cannot write split manifest");
    for (const std::string& c : stamp(cfg)) out << "# " << c << "\n";
    out << "original_index,part\n";
    for (Eigen::Index i : sp.train_indices) out << i << ",train\n";
    for (Eigen::Index i : sp.tune_indices) out << i << ",tune\n";
    for (Eigen::Index i : sp.test_indices) out << i << ",test\n";
}

StageData load_split_artifacts(const ExperimentConfig& cfg) {
    StageData data;
    data.train = load_required(path_in(cfg, "train.csv"), "split");
    data.tune = load_required(path_in(cfg, "tune.csv"), "split");
    data.test = load_required(path_in(cfg, "test.csv"), "split");

    // Recover each tuning row's position inside train.csv from the audit file.
    const fs::path mpath = path_in(cfg, "split_manifest.csv");
    if (!fs::exists(mpath))
        throw std::runtime_error("missing input " + mpath.string() + "; run the split stage first");
    std::ifstream in(mpath);
    std::string line;
    std::vector<Eigen::Index> train_order, tune_order;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed split manifest line: " + line);
        const Eigen::Index idx = std::stoll(line.substr(0, comma));
        const std::string part = line.substr(comma + 1);
        if (part == "train")
            train_order.push_back(idx);
        else if (part == "tune")
            tune_order.push_back(idx);
        else if (part != "test")
            throw std::runtime_error("unknown split part: " + part);
    }
    std::map<Eigen::Index, Eigen::Index> position;
    for (std::size_t p = 0; p < train_order.size(); ++p)
        position[train_order[p]] = static_cast<Eigen::Index>(p);
    for (Eigen::Index idx : tune_order) {
        const auto it = position.find(idx);
        if (it == position.end())
            throw std::runtime_error("split manifest lists a tuning row outside the training set");
        data.tune_positions.push_back(it->second);
    }
    return data;
}

// ---- training setup shared by train and bench -------------------------------

struct TrainSetup {
    Eigen::MatrixXd features;  // effective (possibly tune-excluded) raw rows
    std::vector<int> labels;
    ScalingParams scaling;
    Eigen::MatrixXd scaled;
    KernelBinding quantum;
    KernelBinding rbf;
    std::string resolved_mode;  // "staf" or "chunked"
};

TrainSetup build_train_setup(const ExperimentConfig& cfg, const StageData& data) {
    TrainSetup setup;
    if (cfg.tune_disjoint) {
        std::set<Eigen::Index> drop(data.tune_positions.begin(), data.tune_positions.end());
        std::vector<Eigen::Index> keep;
        for (Eigen::Index r = 0; r < data.train.rows(); ++r)
            if (!drop.count(r)) keep.push_back(r);
        const LabeledDataset effective = take_rows(data.train, keep);
        setup.features = effective.features;
        setup.labels = effective.labels;
    } else {
        setup.features = data.train.features;
        setup.labels = data.train.labels;
    }

    setup.scaling = fit_scaler(setup.features);
    setup.scaled = apply_scaler(setup.scaling, setup.features);

    FeatureMapSpec map;
    map.kind = map_kind_from_string(cfg.map_kind);
    map.num_features = static_cast<int>(setup.features.cols());
    map.reps = cfg.reps;
    map.entanglement = entanglement_from_string(cfg.entanglement);
    setup.quantum = KernelBinding::quantum(map);

    const double gamma = cfg.rbf_gamma > 0.0 ? cfg.rbf_gamma : default_rbf_gamma(setup.scaled);
    setup.rbf = KernelBinding::rbf(gamma);

    if (cfg.mode == "staf" || cfg.mode == "chunked")
        setup.resolved_mode = cfg.mode;
    else if (cfg.mode == "auto")
        setup.resolved_mode = setup.features.rows() <= cfg.staf_cap ? "staf" : "chunked";
    else
        throw std::invalid_argument("mode must be auto, staf, or chunked: " + cfg.mode);
    return setup;
}

// ---- run manifest ------------------------------------------------------------

struct ManifestEntry {
    std::string path;  // relative to out_dir
    std::uint64_t checksum = 0;
    int chunk_id = -1;
};

struct RunManifest {
    int version = 1;
    std::string kind;  // "chunked" or "staf"
    std::uint64_t config_digest = 0;
    std::uint64_t seed = 0;
    std::string tune_metric = "f1";
    std::string tie_break = "smallest";
    int n = 0;
    std::optional<double> threshold;
    std::vector<TuningPoint> tuning_curve;
    std::vector<ManifestEntry> chunk_members;
    std::map<std::string, ManifestEntry> baselines;  // svc / pqsvc / qsvc
    std::vector<std::pair<int, double>> chunk_tune_f1;
    std::vector<std::string> warnings;
};

std::uint64_t hex_to_u64(const std::string& hex) {
    return std::stoull(hex, nullptr, 16);
}

void save_manifest(const RunManifest& m, const fs::path& path) {
    json j;
    j["version"] = m.version;
    j["kind"] = m.kind;
    j["config_digest"] = digest_hex(m.config_digest);
    j["seed"] = m.seed;
    j["tune_metric"] = m.tune_metric;
    j["tie_break"] = m.tie_break;
    j["n"] = m.n;
    if (m.threshold)
        j["threshold"] = *m.threshold;
    else
        j["threshold"] = nullptr;
    json curve = json::array();
    for (const TuningPoint& p : m.tuning_curve)
        curve.push_back({{"threshold", p.threshold},
                         {"precision", p.precision},
                         {"recall", p.recall},
                         {"f1", p.f1}});
    j["tuning_curve"] = curve;
    json members = json::array();
    for (const ManifestEntry& e : m.chunk_members)
        members.push_back({{"path", e.path},
                           {"checksum", digest_hex(e.checksum)},
                           {"chunk_id", e.chunk_id}});
    j["chunk_members"] = members;
    json baselines;
    for (const auto& [name, e] : m.baselines)
        baselines[name] = {{"path", e.path}, {"checksum", digest_hex(e.checksum)}};
    j["baselines"] = baselines;
    json ranks = json::array();
    for (const auto& [id, f1score] : m.chunk_tune_f1) ranks.push_back({id, f1score});
    j["chunk_tune_f1"] = ranks;
    j["warnings"] = m.warnings;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("manifest write failed: " + path.string());
}

RunManifest load_manifest(const ExperimentConfig& cfg) {
    const fs::path path = path_in(cfg, "manifest.json");
    if (!fs::exists(path))
        throw std::runtime_error("missing input " + path.string() + "; run the train stage first");
    std::ifstream in(path);
    json j;
    in >> j;
    RunManifest m;
    m.version = j.at("version").get<int>();
    if (m.version != 1)
        throw std::runtime_error("unsupported manifest version " + std::to_string(m.version));
    m.kind = j.at("kind").get<std::string>();
    m.config_digest = hex_to_u64(j.at("config_digest").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tune_metric = j.at("tune_metric").get<std::string>();
    m.tie_break = j.at("tie_break").get<std::string>();
    m.n = j.at("n").get<int>();
    if (!j.at("threshold").is_null()) m.threshold = j.at("threshold").get<double>();
    for (const json& p : j.at("tuning_curve"))
        m.tuning_curve.push_back({p.at("threshold").get<double>(), p.at("precision").get<double>(),
                                  p.at("recall").get<double>(), p.at("f1").get<double>()});
    for (const json& e : j.at("chunk_members"))
        m.chunk_members.push_back({e.at("path").get<std::string>(),
                                   hex_to_u64(e.at("checksum").get<std::string>()),
                                   e.at("chunk_id").get<int>()});
    for (const auto& [name, e] : j.at("baselines").items())
        m.baselines[name] = {e.at("path").get<std::string>(),
                             hex_to_u64(e.at("checksum").get<std::string>()), -1};
    for (const json& r : j.at("chunk_tune_f1"))
        m.chunk_tune_f1.emplace_back(r.at(0).get<int>(), r.at(1).get<double>());
    for (const json& w : j.at("warnings")) m.warnings.push_back(w.get<std::string>());
    return m;
}

template <typename ModelT>
ModelT load_checked(const ExperimentConfig& cfg, const ManifestEntry& entry,
                    const std::string& what) {
    const fs::path full = fs::path(cfg.out_dir) / entry.path;
    if (file_checksum(full.string()) != entry.checksum)
        throw corrupt_error(what + " model file fails its manifest checksum: " + full.string());
    AnyModel any = load_model(full.string());
    if (!std::holds_alternative<ModelT>(any))
        throw corrupt_error(what + " model file holds the wrong model kind: " + full.string());
    return std::get<ModelT>(std::move(any));
}

ChunkEnsemble ensemble_from_manifest(const ExperimentConfig& cfg, const RunManifest& m) {
    ChunkEnsemble e;
    for (const ManifestEntry& entry : m.chunk_members) {
        e.models.push_back(load_checked<TrainedSvm>(cfg, entry,
                                                    "chunk " + std::to_string(entry.chunk_id)));
        e.model_paths.push_back(entry.path);
        e.checksums.push_back(entry.checksum);
    }
    if (e.models.empty()) throw std::runtime_error("manifest lists no chunk models");
    e.n = static_cast<int>(e.models.size());
    e.threshold = m.threshold;
    e.tuning_curve = m.tuning_curve;
    e.warnings = m.warnings;
    e.seed = m.seed;
    e.config_digest = m.config_digest;
    return e;
}

// ---- small CSV table reader (predictions etc.) -------------------------------

struct Table {
    std::vector<std::string> header;
    Eigen::MatrixXd values;

    Eigen::Index column(const std::string& name) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return static_cast<Eigen::Index>(c);
        throw std::runtime_error("table has no column named " + name);
    }
};

Table read_table(const fs::path& path, const char* stage_hint) {
    if (!fs::exists(path))
        throw std::runtime_error("missing input " + path.string() + "; run the " +
                                 std::string(stage_hint) + " stage first");
    std::ifstream in(path);
    std::string line;
    Table t;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (t.header.empty()) {
            t.header = fields;
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) row.push_back(std::stod(f));
        rows.push_back(std::move(row));
    }
    t.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(t.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != t.header.size())
            throw std::runtime_error("ragged row in " + path.string());
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return t;
}

void write_pr_curve(const ExperimentConfig& cfg, const std::vector<TuningPoint>& curve) {
    std::ofstream out(path_in(cfg, "pr_curve.csv"));
    if (!out) throw std::runtime_error("cannot write pr_curve.csv");
    for (const std::string& c : stamp(cfg)) out << "# " << c << "\n";
    out << "threshold,precision,recall,f1\n";
    for (const TuningPoint& p : curve)
        out << format_double(p.threshold) << "," << format_double(p.precision) << ","
            << format_double(p.recall) << "," << format_double(p.f1) << "\n";
}

std::vector<int> column_as_labels(const Table& t, const std::string& name) {
    const Eigen::Index c = t.column(name);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(t.values.rows()));
    for (Eigen::Index r = 0; r < t.values.rows(); ++r)
        out.push_back(t.values(r, c) >= 0.5 ? 1 : 0);
    return out;
}

EvalReport make_report(const std::string& algorithm, const std::string& score_kind,
                       const std::vector<int>& labels, const std::vector<int>& preds,
                       const Eigen::VectorXd& scores) {
    EvalReport r;
    r.algorithm = algorithm;
    r.score_kind = score_kind;
    r.cm = confusion(labels, preds);
    r.metrics = metric_set(r.cm, scores, labels);
    return r;
}

}  // namespace

// ---- config API ---------------------------------------------------------------

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config is not valid JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << config_to_json(cfg, /*include_out_dir=*/true).dump(2) << "\n";
}

std::string config_canonical_json(const ExperimentConfig& cfg) {
    return config_to_json(cfg, /*include_out_dir=*/false).dump();
}

std::uint64_t config_digest(const ExperimentConfig& cfg) {
    return fnv1a(config_canonical_json(cfg));
}

void validate(const ExperimentConfig& cfg) {
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must lie in (0, 1)");
    if (!(cfg.tune_fraction > 0.0 && cfg.tune_fraction < 1.0))
        throw std::invalid_argument("tune_fraction must lie in (0, 1)");
    if (cfg.gen_n < 4) throw std::invalid_argument("gen_n must be >= 4");
    if (cfg.gen_d < 1) throw std::invalid_argument("gen_d must be >= 1");
    map_kind_from_string(cfg.map_kind);
    entanglement_from_string(cfg.entanglement);
    if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (!(cfg.svc_c > 0.0) || !(cfg.qsvc_c > 0.0) || !(cfg.pegasos_c > 0.0))
        throw std::invalid_argument("every C must be positive");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (cfg.max_passes < 1) throw std::invalid_argument("max_passes must be >= 1");
    if (cfg.rbf_gamma < 0.0) throw std::invalid_argument("rbf_gamma must be >= 0 (0 = auto)");
    if (cfg.pegasos_steps < 1) throw std::invalid_argument("pegasos_steps must be >= 1");
    if (cfg.chunk_size < 2) throw std::invalid_argument("chunk_size must be >= 2");
    if (cfg.min_tail < 1) throw std::invalid_argument("min_tail must be >= 1");
    tune_metric_from_string(cfg.tune_metric);
    tie_break_from_string(cfg.tie_break);
    if (cfg.mode != "auto" && cfg.mode != "staf" && cfg.mode != "chunked")
        throw std::invalid_argument("mode must be auto, staf, or chunked");
    if (cfg.staf_cap < 1) throw std::invalid_argument("staf_cap must be >= 1");
    if (cfg.bench_repeats < 1) throw std::invalid_argument("bench_repeats must be >= 1");
    if (cfg.out_dir.empty()) throw std::invalid_argument("out_dir must not be empty");
}

// ---- stages ---------------------------------------------------------------------

std::string cmd_gen(const ExperimentConfig& cfg) {
    validate(cfg);
    fs::create_directories(cfg.out_dir);
    const std::string path =
        cfg.dataset.empty() ? path_in(cfg, "dataset.csv").string() : cfg.dataset;
    const LabeledDataset ds = gen_synthetic(cfg.gen_n, cfg.gen_d, cfg.gen_separation, cfg.seed);
    save_csv(ds, path, stamp(cfg));
    return path;
}

void cmd_split(const ExperimentConfig& cfg) {
    validate(cfg);
    std::string dataset = cfg.dataset;
    if (dataset.empty()) {
        dataset = path_in(cfg, "dataset.csv").string();
        if (!fs::exists(dataset))
            throw std::runtime_error("no dataset configured and " + dataset +
                                     " does not exist; set `dataset` or run gen first");
    }
    fs::create_directories(cfg.out_dir);
    const LabeledDataset ds = load_csv(dataset);
    SplitSpec spec{cfg.test_fraction, cfg.tune_fraction, cfg.seed};
    const Split sp = split(ds, spec);
    save_csv(sp.train, path_in(cfg, "train.csv").string(), stamp(cfg));
    save_csv(sp.tune, path_in(cfg, "tune.csv").string(), stamp(cfg));
    save_csv(sp.test, path_in(cfg, "test.csv").string(), stamp(cfg));
    write_split_manifest(cfg, sp);
}

void cmd_train(const ExperimentConfig& cfg) {
    validate(cfg);
    const StageData data = load_split_artifacts(cfg);
    const TrainSetup setup = build_train_setup(cfg, data);
    const std::uint64_t digest = config_digest(cfg);
    const fs::path model_dir = path_in(cfg, "models");
    fs::create_directories(model_dir);

    RunManifest manifest;
    manifest.kind = setup.resolved_mode;
    manifest.config_digest = digest;
    manifest.seed = cfg.seed;
    manifest.tune_metric = cfg.tune_metric;
    manifest.tie_break = cfg.tie_break;

    auto persist = [&](const auto& model, const std::string& name) {
        const fs::path full = model_dir / name;
        save_model(model, full.string());
        ManifestEntry entry;
        entry.path = (fs::path("models") / name).string();
        entry.checksum = file_checksum(full.string());
        return entry;
    };

    // Whole-training-set baselines exist in both modes.
    {
        const KernelGram g = kernel_gram(setup.rbf, setup.scaled);
        TrainedSvm svc = train_svc(g, setup.scaled, setup.labels, cfg.svc_c, cfg.tol, setup.rbf,
                                   setup.scaling, cfg.max_passes);
        svc.seed = cfg.seed;
        svc.config_digest = digest;
        manifest.baselines["svc"] = persist(svc, "svc.model");
    }
    {
        PegasosModel pqsvc = train_pegasos(setup.scaled, setup.labels, setup.quantum,
                                           cfg.pegasos_c, cfg.pegasos_steps, cfg.seed,
                                           setup.scaling);
        pqsvc.config_digest = digest;
        manifest.baselines["pqsvc"] = persist(pqsvc, "pqsvc.model");
    }

    if (setup.resolved_mode == "staf") {
        if (setup.features.rows() > cfg.staf_cap)
            throw std::runtime_error(
                "direct quantum training refused: " + std::to_string(setup.features.rows()) +
                " training rows exceed staf_cap=" + std::to_string(cfg.staf_cap) +
                "; use chunked mode");
        const KernelGram g = kernel_gram(setup.quantum, setup.scaled);
        TrainedSvm qsvc = train_svc(g, setup.scaled, setup.labels, cfg.qsvc_c, cfg.tol,
                                    setup.quantum, setup.scaling, cfg.max_passes);
        qsvc.seed = cfg.seed;
        qsvc.config_digest = digest;
        manifest.baselines["qsvc"] = persist(qsvc, "qsvc.model");
        manifest.n = static_cast<int>(manifest.baselines.size());
    } else {
        const ChunkPlan plan =
            make_chunks(setup.scaled.rows(), cfg.chunk_size, cfg.min_tail, cfg.seed);
        const ChunkEnsemble ensemble =
            train_chunks(setup.scaled, setup.labels, plan, setup.quantum, cfg.qsvc_c, cfg.tol,
                         setup.scaling, model_dir.string(), cfg.seed, digest);
        for (std::size_t i = 0; i < ensemble.models.size(); ++i) {
            ManifestEntry entry;
            entry.path =
                (fs::path("models") / fs::path(ensemble.model_paths[i]).filename()).string();
            entry.checksum = ensemble.checksums[i];
            entry.chunk_id = ensemble.models[i].chunk_id;
            manifest.chunk_members.push_back(entry);
        }
        manifest.n = ensemble.n;
        manifest.warnings = ensemble.warnings;
    }
    save_manifest(manifest, path_in(cfg, "manifest.json"));
}

void cmd_tune(const ExperimentConfig& cfg) {
    validate(cfg);
    RunManifest manifest = load_manifest(cfg);
    const LabeledDataset tune_ds = load_required(path_in(cfg, "tune.csv"), "split");

    if (manifest.kind == "chunked") {
        ChunkEnsemble ensemble = ensemble_from_manifest(cfg, manifest);
        const Eigen::MatrixXd scaled =
            apply_scaler(ensemble.models.front().scaling, tune_ds.features);
        tune_threshold(ensemble, scaled, tune_ds.labels,
                       tune_metric_from_string(cfg.tune_metric),
                       tie_break_from_string(cfg.tie_break));
        manifest.threshold = ensemble.threshold;
        manifest.tuning_curve = ensemble.tuning_curve;

        // Tuning-set F1 per member — the ranking the evaluation stage uses to
        // pick the top chunk models.
        manifest.chunk_tune_f1.clear();
        for (const TrainedSvm& model : ensemble.models) {
            const std::vector<int> preds = predict(model, scaled);
            manifest.chunk_tune_f1.emplace_back(model.chunk_id,
                                                f1(confusion(tune_ds.labels, preds)));
        }
        save_manifest(manifest, path_in(cfg, "manifest.json"));
        write_pr_curve(cfg, manifest.tuning_curve);
    } else {
        // No aggregation threshold exists without chunks; emit the plot-ready
        // curve for the quantum model's decision scores instead.
        const auto it = manifest.baselines.find("qsvc");
        if (it == manifest.baselines.end())
            throw std::runtime_error("manifest has no qsvc model; retrain first");
        const TrainedSvm qsvc = load_checked<TrainedSvm>(cfg, it->second, "qsvc");
        const Eigen::MatrixXd scaled = apply_scaler(qsvc.scaling, tune_ds.features);
        const Eigen::VectorXd scores = decision_values(qsvc, scaled);
        const std::vector<PrPoint> curve = pr_curve(scores, tune_ds.labels);
        std::vector<TuningPoint> points;
        points.reserve(curve.size());
        for (const PrPoint& p : curve)
            points.push_back({p.threshold, p.precision, p.recall, p.f1});
        write_pr_curve(cfg, points);
    }
}

void cmd_predict(const ExperimentConfig& cfg, const std::string& input_csv) {
    validate(cfg);
    const RunManifest manifest = load_manifest(cfg);
    const LabeledDataset ds = input_csv.empty()
                                  ? load_required(path_in(cfg, "test.csv"), "split")
                                  : load_csv(input_csv);

    std::ofstream out(path_in(cfg, "predictions.csv"));
    if (!out) throw std::runtime_error("cannot write predictions.csv");
    for (const std::string& c : stamp(cfg)) out << "# " << c << "\n";

    const TrainedSvm svc =
        load_checked<TrainedSvm>(cfg, manifest.baselines.at("svc"), "svc");
    const PegasosModel pqsvc =
        load_checked<PegasosModel>(cfg, manifest.baselines.at("pqsvc"), "pqsvc");
    const Eigen::MatrixXd scaled = apply_scaler(svc.scaling, ds.features);
    const Eigen::VectorXd svc_scores = decision_values(svc, scaled);
    const Eigen::VectorXd pqsvc_scores = decision_values(pqsvc, scaled);

    if (manifest.kind == "chunked") {
        if (!manifest.threshold)
            throw std::runtime_error(
                "aggregation threshold unset in manifest; run the tune stage first");
        const ChunkEnsemble ensemble = ensemble_from_manifest(cfg, manifest);

        std::vector<Eigen::VectorXd> chunk_scores;
        std::vector<std::vector<int>> chunk_preds;
        for (const TrainedSvm& model : ensemble.models) {
            Eigen::VectorXd s = decision_values(model, scaled);
            std::vector<int> p(static_cast<std::size_t>(s.size()));
            for (Eigen::Index i = 0; i < s.size(); ++i)
                p[static_cast<std::size_t>(i)] = s[i] >= 0.0;
            chunk_scores.push_back(std::move(s));
            chunk_preds.push_back(std::move(p));
        }
        const Eigen::VectorXd fractions = vote_fractions(chunk_preds);
        const std::vector<int> global = labels_from_fractions(fractions, *manifest.threshold);

        out << "row,svc_score,svc_pred,pqsvc_score,pqsvc_pred";
        for (const TrainedSvm& model : ensemble.models)
            out << ",chunk_" << model.chunk_id << "_score,chunk_" << model.chunk_id << "_pred";
        out << ",vote_fraction,global_pred\n";
        for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
            out << r << "," << format_double(svc_scores[r]) << "," << (svc_scores[r] >= 0.0)
                << "," << format_double(pqsvc_scores[r]) << "," << (pqsvc_scores[r] >= 0.0);
            for (std::size_t m = 0; m < chunk_preds.size(); ++m)
                out << "," << format_double(chunk_scores[m][r]) << ","
                    << chunk_preds[m][static_cast<std::size_t>(r)];
            out << "," << format_double(fractions[r]) << ","
                << global[static_cast<std::size_t>(r)] << "\n";
        }
    } else {
        const TrainedSvm qsvc =
            load_checked<TrainedSvm>(cfg, manifest.baselines.at("qsvc"), "qsvc");
        const Eigen::VectorXd qsvc_scores = decision_values(qsvc, scaled);
        out << "row,svc_score,svc_pred,pqsvc_score,pqsvc_pred,qsvc_score,qsvc_pred\n";
        for (Eigen::Index r = 0; r < scaled.rows(); ++r)
            out << r << "," << format_double(svc_scores[r]) << "," << (svc_scores[r] >= 0.0)
                << "," << format_double(pqsvc_scores[r]) << "," << (pqsvc_scores[r] >= 0.0)
                << "," << format_double(qsvc_scores[r]) << "," << (qsvc_scores[r] >= 0.0)
                << "\n";
    }
    if (!out) throw std::runtime_error("predictions write failed");
}

void cmd_evaluate(const ExperimentConfig& cfg) {
    validate(cfg);
    const RunManifest manifest = load_manifest(cfg);
    const LabeledDataset test_ds = load_required(path_in(cfg, "test.csv"), "split");
    const Table preds = read_table(path_in(cfg, "predictions.csv"), "predict");
    if (preds.values.rows() != test_ds.rows())
        throw std::runtime_error("predictions.csv row count does not match test.csv");
    const std::vector<int>& labels = test_ds.labels;

    auto score_column = [&](const std::string& name) {
        return Eigen::VectorXd(preds.values.col(preds.column(name)));
    };

    std::vector<EvalReport> rows;
    rows.push_back(make_report("SVC", "decision_function", labels,
                               column_as_labels(preds, "svc_pred"), score_column("svc_score")));
    rows.push_back(make_report("PQSVC", "decision_function", labels,
                               column_as_labels(preds, "pqsvc_pred"),
                               score_column("pqsvc_score")));

    if (manifest.kind == "chunked") {
        if (manifest.chunk_tune_f1.empty())
            throw std::runtime_error("manifest has no chunk rankings; run the tune stage first");
        auto ranking = manifest.chunk_tune_f1;
        std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        const std::size_t top = std::min<std::size_t>(3, ranking.size());
        for (std::size_t k = 0; k < top; ++k) {
            const int id = ranking[k].first;
            const std::string col = "chunk_" + std::to_string(id);
            rows.push_back(make_report("QSVC chunk " + std::to_string(id), "decision_function",
                                       labels, column_as_labels(preds, col + "_pred"),
                                       score_column(col + "_score")));
        }
        rows.push_back(make_report("Global QSVC", "vote_fraction", labels,
                                   column_as_labels(preds, "global_pred"),
                                   score_column("vote_fraction")));
    } else {
        rows.push_back(make_report("QSVC", "decision_function", labels,
                                   column_as_labels(preds, "qsvc_pred"),
                                   score_column("qsvc_score")));
    }

    const std::uint64_t digest = config_digest(cfg);
    write_report_csv(rows, path_in(cfg, "report.csv").string(), digest, cfg.seed,
                     /*include_accuracy=*/manifest.kind == "chunked");
    write_report_json(rows, path_in(cfg, "report.json").string(), digest, cfg.seed,
                      manifest.warnings);
}

void cmd_bench(const ExperimentConfig& cfg) {
    validate(cfg);
    const RunManifest manifest = load_manifest(cfg);
    const StageData data = load_split_artifacts(cfg);
    const TrainSetup setup = build_train_setup(cfg, data);
    const Eigen::MatrixXd scaled_test = apply_scaler(setup.scaling, data.test.features);

    std::vector<TimingRecord> records;
    if (manifest.kind == "chunked") {
        const ChunkPlan plan =
            make_chunks(setup.scaled.rows(), cfg.chunk_size, cfg.min_tail, cfg.seed);
        const fs::path scratch = path_in(cfg, "bench_scratch");
        std::vector<TimingRecord> train_records =
            bench_train(setup.scaled, setup.labels, plan, setup.quantum, cfg.qsvc_c, cfg.tol,
                        setup.scaling, scratch.string());
        fs::remove_all(scratch);
        records.insert(records.end(), train_records.begin(), train_records.end());

        const ChunkEnsemble ensemble = ensemble_from_manifest(cfg, manifest);
        for (const TrainedSvm& model : ensemble.models) {
            const BenchResult r = bench_predict(model, scaled_test, cfg.bench_repeats);
            records.push_back(r.test1);
            records.push_back(r.test2);
        }
        if (ensemble.threshold) {
            const BenchResult global = bench_predict(
                [&](const Eigen::Ref<const Eigen::MatrixXd>& rows) {
                    return global_predict(ensemble, rows);
                },
                scaled_test, cfg.bench_repeats, /*chunk_id=*/-1);
            records.push_back(global.test1);
            records.push_back(global.test2);
        }
    } else {
        const auto it = manifest.baselines.find("qsvc");
        if (it == manifest.baselines.end())
            throw std::runtime_error("manifest has no qsvc model; retrain first");
        const TrainedSvm qsvc = load_checked<TrainedSvm>(cfg, it->second, "qsvc");

        Stopwatch watch;
        const KernelGram g = kernel_gram(setup.quantum, setup.scaled);
        train_svc(g, setup.scaled, setup.labels, cfg.qsvc_c, cfg.tol, setup.quantum,
                  setup.scaling, cfg.max_passes);
        records.push_back(
            {Phase::train, -1, watch.seconds(), static_cast<std::int64_t>(setup.scaled.rows())});

        const BenchResult r = bench_predict(qsvc, scaled_test, cfg.bench_repeats);
        records.push_back(r.test1);
        records.push_back(r.test2);
    }
    write_timings_csv(records, path_in(cfg, "timings.csv").string(), config_digest(cfg),
                      cfg.seed);
}

void cmd_run(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.dataset.empty()) {
        try {
            cmd_gen(cfg);
        } catch (const std::exception& e) {
            throw std::runtime_error("stage gen: " + std::string(e.what()));
        }
    }

    struct Stage {
        const char* name;
        std::function<void(const ExperimentConfig&)> fn;
    };
    const std::vector<Stage> stages = {
        {"split", [](const ExperimentConfig& c) { cmd_split(c); }},
        {"train", [](const ExperimentConfig& c) { cmd_train(c); }},
        {"tune", [](const ExperimentConfig& c) { cmd_tune(c); }},
        {"predict", [](const ExperimentConfig& c) { cmd_predict(c); }},
        {"evaluate", [](const ExperimentConfig& c) { cmd_evaluate(c); }},
        {"bench", [](const ExperimentConfig& c) { cmd_bench(c); }},
    };
    for (const Stage& stage : stages) {
        try {
            stage.fn(cfg);
        } catch (const std::exception& e) {
            throw std::runtime_error("stage " + std::string(stage.name) + ": " + e.what());
        }
    }
}

}  // namespace qdp
