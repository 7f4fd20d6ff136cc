#include "qdp/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qdp/rng.hpp"

namespace qdp {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (cell.empty() || end != begin + cell.size() || !std::isfinite(v))
        throw std::runtime_error("unparsable cell in row " + std::to_string(row) + ", column " +
                                 column + ": '" + cell + "'");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    for (int precision : {15, 16, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

LabeledDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    std::string line;
    auto next_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            if (!out.empty() && out.back() == '\r') out.pop_back();
            if (out.empty() || out[0] == '#') continue;  // comments carry run metadata
            return true;
        }
        return false;
    };

    if (!next_line(line)) throw std::runtime_error("empty dataset file: " + path);
    const std::vector<std::string> header = split_fields(line);
    std::size_t label_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == "label") label_col = c;
    if (label_col == header.size())
        throw std::runtime_error("dataset has no 'label' column: " + path);

    LabeledDataset ds;
    ds.source = path;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (c != label_col) ds.feature_names.push_back(header[c]);

    std::vector<std::vector<double>> rows;
    std::size_t row_index = 0;
    while (next_line(line)) {
        ++row_index;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size())
            throw std::runtime_error("row " + std::to_string(row_index) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        std::vector<double> features;
        features.reserve(header.size() - 1);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_col) {
                const double v = parse_cell(fields[c], row_index, "label");
                if (v != 0.0 && v != 1.0)
                    throw std::runtime_error("non-binary label '" + fields[c] + "' in row " +
                                             std::to_string(row_index));
                ds.labels.push_back(static_cast<int>(v));
            } else {
                features.push_back(parse_cell(fields[c], row_index, header[c]));
            }
        }
        rows.push_back(std::move(features));
    }
    if (rows.empty()) throw std::runtime_error("dataset has no data rows: " + path);

    ds.features.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(ds.feature_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return ds;
}

void save_csv(const LabeledDataset& ds, const std::string& path,
              const std::vector<std::string>& comments) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    for (const std::string& c : comments) out << "# " << c << "\n";
    for (const std::string& name : ds.feature_names) out << name << ",";
    out << "label\n";
    for (Eigen::Index r = 0; r < ds.rows(); ++r) {
        for (Eigen::Index c = 0; c < ds.cols(); ++c) out << format_double(ds.features(r, c)) << ",";
        out << ds.labels[static_cast<std::size_t>(r)] << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<Eigen::Index>& indices) {
    LabeledDataset out;
    out.feature_names = ds.feature_names;
    out.source = ds.source;
    out.features.resize(static_cast<Eigen::Index>(indices.size()), ds.cols());
    out.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= ds.rows())
            throw std::out_of_range("take_rows: index " + std::to_string(indices[i]) +
                                    " outside dataset of " + std::to_string(ds.rows()) + " rows");
        out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(indices[i]);
        out.labels.push_back(ds.labels[static_cast<std::size_t>(indices[i])]);
    }
    return out;
}

Split split(const LabeledDataset& ds, const SplitSpec& spec) {
    const auto n = ds.rows();
    if (n == 0) throw std::invalid_argument("split: empty dataset");
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) ||
        !(spec.tune_fraction_of_train > 0.0 && spec.tune_fraction_of_train < 1.0))
        throw std::invalid_argument("split: fractions must lie in (0, 1)");
    const auto positives = std::count(ds.labels.begin(), ds.labels.end(), 1);
    if (positives == 0 || positives == n)
        throw std::invalid_argument("split: dataset must contain both classes");

    // Published split tables round the test count up and the tune count to
    // nearest; epsilons absorb binary representation of the fractions.
    const auto test_count = static_cast<Eigen::Index>(
        std::ceil(static_cast<double>(n) * spec.test_fraction - 1e-9));
    const auto train_count = n - test_count;
    if (test_count < 1 || train_count < 1)
        throw std::invalid_argument("split: test fraction yields an empty part");
    const auto tune_count = static_cast<Eigen::Index>(std::floor(
        static_cast<double>(train_count) * spec.tune_fraction_of_train + 0.5 + 1e-9));
    if (tune_count < 1) throw std::invalid_argument("split: tune fraction yields an empty part");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng shuffle_rng(derive_seed(spec.seed, "split"));
    shuffle_rng.shuffle(order);

    Split result;
    result.train_indices.assign(order.begin(), order.begin() + train_count);
    result.test_indices.assign(order.begin() + train_count, order.end());

    std::vector<Eigen::Index> tune_pool = result.train_indices;
    Rng tune_rng(derive_seed(spec.seed, "tune"));
    tune_rng.shuffle(tune_pool);
    result.tune_indices.assign(tune_pool.begin(), tune_pool.begin() + tune_count);

    result.train = take_rows(ds, result.train_indices);
    result.tune = take_rows(ds, result.tune_indices);
    result.test = take_rows(ds, result.test_indices);
    return result;
}

ScalingParams fit_scaler(const Eigen::Ref<const Eigen::MatrixXd>& train_features) {
    if (train_features.rows() == 0) throw std::invalid_argument("fit_scaler: empty input");
    ScalingParams params;
    params.min = train_features.colwise().minCoeff();
    params.max = train_features.colwise().maxCoeff();
    return params;
}

Eigen::MatrixXd apply_scaler(const ScalingParams& params,
                             const Eigen::Ref<const Eigen::MatrixXd>& features) {
    if (features.cols() != params.min.size())
        throw std::invalid_argument("apply_scaler: feature width does not match fitted params");
    Eigen::MatrixXd scaled(features.rows(), features.cols());
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
        const double lo = params.min[c];
        const double range = params.max[c] - lo;
        for (Eigen::Index r = 0; r < features.rows(); ++r) {
            double v = range > 0.0 ? (features(r, c) - lo) / range * kPi : kPi / 2.0;
            scaled(r, c) = std::clamp(v, 0.0, kPi);
        }
    }
    return scaled;
}

LabeledDataset gen_synthetic(int n, int d, double separation, std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("gen_synthetic: need n >= 4");
    if (d < 1) throw std::invalid_argument("gen_synthetic: need d >= 1");
    if (!(separation >= 0.0)) throw std::invalid_argument("gen_synthetic: separation must be >= 0");

    Rng rng(derive_seed(seed, "gen"));
    const int n0 = n / 2;
    const double shift = separation / std::sqrt(static_cast<double>(d));

    LabeledDataset ds;
    ds.features.resize(n, d);
    ds.labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int label = i < n0 ? 0 : 1;
        for (int c = 0; c < d; ++c)
            ds.features(i, c) = rng.normal() + (label == 1 ? shift : 0.0);
        ds.labels.push_back(label);
    }
    for (int c = 0; c < d; ++c) ds.feature_names.push_back("f" + std::to_string(c));
    ds.source = "synthetic";
    return ds;
}

}  // namespace qdp
