#include "qdp/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "qdp/rng.hpp"

namespace qdp {

namespace {

constexpr char kMagic[4] = {'Q', 'S', 'V', 'M'};
constexpr std::uint8_t kKindSvm = 0;
constexpr std::uint8_t kKindCountModel = 1;
constexpr std::uint8_t kKernelQuantum = 0;
constexpr std::uint8_t kKernelRbf = 1;

// ---- little-endian writer -------------------------------------------------

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u16(std::string& out, std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_i32(std::string& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }
void put_i64(std::string& out, std::int64_t v) { put_u64(out, static_cast<std::uint64_t>(v)); }
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_matrix(std::string& out, const Eigen::MatrixXd& m) {
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

void put_vector(std::string& out, const Eigen::VectorXd& v) {
    put_u32(out, static_cast<std::uint32_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v[i]);
}

void put_kernel(std::string& out, const KernelBinding& k) {
    if (k.kind == KernelBinding::Kind::quantum) {
        put_u8(out, kKernelQuantum);
        put_u8(out, k.map.kind == MapKind::z ? 0 : 1);
        put_u32(out, static_cast<std::uint32_t>(k.map.num_features));
        put_u32(out, static_cast<std::uint32_t>(k.map.reps));
        put_u8(out, k.map.entanglement == Entanglement::linear ? 0 : 1);
    } else {
        put_u8(out, kKernelRbf);
        put_f64(out, k.gamma);
    }
}

void put_scaling(std::string& out, const ScalingParams& s) {
    put_vector(out, s.min);
    put_vector(out, s.max);
}

// ---- bounds-checked reader ------------------------------------------------

struct Cursor {
    const unsigned char* data;
    std::size_t size;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > size) throw corrupt_error("model payload ends prematurely");
    }

    std::uint8_t u8() {
        need(1);
        return data[pos++];
    }

    std::uint64_t uint_le(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
        pos += static_cast<std::size_t>(bytes);
        return v;
    }

    std::uint16_t u16() { return static_cast<std::uint16_t>(uint_le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(uint_le(4)); }
    std::uint64_t u64() { return uint_le(8); }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }

    Eigen::MatrixXd matrix() {
        const std::uint32_t rows = u32();
        const std::uint32_t cols = u32();
        const std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
        // Reject fabricated dimensions before allocating.
        if (count > (size - pos) / 8) throw corrupt_error("model payload ends prematurely");
        Eigen::MatrixXd m(rows, cols);
        for (std::uint32_t r = 0; r < rows; ++r)
            for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = f64();
        return m;
    }

    Eigen::VectorXd vector() {
        const std::uint32_t n = u32();
        need(static_cast<std::uint64_t>(n) * 8);
        Eigen::VectorXd v(n);
        for (std::uint32_t i = 0; i < n; ++i) v[i] = f64();
        return v;
    }

    KernelBinding kernel() {
        const std::uint8_t kind = u8();
        if (kind == kKernelQuantum) {
            FeatureMapSpec spec;
            const std::uint8_t map_kind = u8();
            if (map_kind > 1) throw corrupt_error("unknown feature-map tag");
            spec.kind = map_kind == 0 ? MapKind::z : MapKind::zz;
            spec.num_features = static_cast<int>(u32());
            spec.reps = static_cast<int>(u32());
            const std::uint8_t ent = u8();
            if (ent > 1) throw corrupt_error("unknown entanglement tag");
            spec.entanglement = ent == 0 ? Entanglement::linear : Entanglement::full;
            return KernelBinding::quantum(spec);
        }
        if (kind == kKernelRbf) {
            const double gamma = f64();
            if (!(gamma > 0.0)) throw corrupt_error("rbf gamma must be positive");
            return KernelBinding::rbf(gamma);
        }
        throw corrupt_error("unknown kernel tag");
    }

    ScalingParams scaling() {
        ScalingParams s;
        s.min = vector();
        s.max = vector();
        if (s.min.size() != s.max.size()) throw corrupt_error("scaling bounds length mismatch");
        return s;
    }
};

std::string svm_payload(const TrainedSvm& m) {
    std::string out;
    put_kernel(out, m.kernel);
    put_scaling(out, m.scaling);
    put_matrix(out, m.support_vectors);
    put_vector(out, m.dual_coefs);
    put_f64(out, m.bias);
    put_f64(out, m.C);
    put_u8(out, m.converged ? 1 : 0);
    put_i32(out, m.chunk_id);
    put_u64(out, m.seed);
    put_u64(out, m.config_digest);
    return out;
}

std::string count_model_payload(const PegasosModel& m) {
    std::string out;
    put_kernel(out, m.kernel);
    put_scaling(out, m.scaling);
    put_matrix(out, m.support_vectors);
    put_u32(out, static_cast<std::uint32_t>(m.counts.size()));
    for (std::int64_t c : m.counts) put_i64(out, c);
    put_u32(out, static_cast<std::uint32_t>(m.support_labels.size()));
    for (int l : m.support_labels) put_u8(out, l == 1 ? 1 : 0);
    put_i64(out, m.steps);
    put_i64(out, m.train_size);
    put_f64(out, m.C);
    put_f64(out, m.bias);
    put_u64(out, m.seed);
    put_i32(out, m.chunk_id);
    put_u64(out, m.config_digest);
    return out;
}

TrainedSvm parse_svm(Cursor& cur) {
    TrainedSvm m;
    m.kernel = cur.kernel();
    m.scaling = cur.scaling();
    m.support_vectors = cur.matrix();
    m.dual_coefs = cur.vector();
    if (m.dual_coefs.size() != m.support_vectors.rows())
        throw corrupt_error("dual coefficient count does not match support count");
    m.bias = cur.f64();
    m.C = cur.f64();
    m.converged = cur.u8() != 0;
    m.chunk_id = cur.i32();
    m.seed = cur.u64();
    m.config_digest = cur.u64();
    return m;
}

PegasosModel parse_count_model(Cursor& cur) {
    PegasosModel m;
    m.kernel = cur.kernel();
    m.scaling = cur.scaling();
    m.support_vectors = cur.matrix();
    const std::uint32_t n_counts = cur.u32();
    if (static_cast<Eigen::Index>(n_counts) != m.support_vectors.rows())
        throw corrupt_error("count list does not match support count");
    m.counts.reserve(n_counts);
    for (std::uint32_t i = 0; i < n_counts; ++i) {
        const std::int64_t c = cur.i64();
        if (c < 1) throw corrupt_error("support hit count must be >= 1");
        m.counts.push_back(c);
    }
    const std::uint32_t n_labels = cur.u32();
    if (n_labels != n_counts) throw corrupt_error("label list does not match support count");
    m.support_labels.reserve(n_labels);
    for (std::uint32_t i = 0; i < n_labels; ++i)
        m.support_labels.push_back(cur.u8() == 1 ? 1 : -1);
    m.steps = cur.i64();
    m.train_size = cur.i64();
    if (m.steps < 1 || m.train_size < 1) throw corrupt_error("invalid step or size field");
    m.C = cur.f64();
    m.bias = cur.f64();
    m.seed = cur.u64();
    m.chunk_id = cur.i32();
    m.config_digest = cur.u64();
    return m;
}

void write_file(const std::string& path, std::uint8_t kind, const std::string& payload) {
    std::string buf;
    buf.reserve(payload.size() + 32);
    buf.append(kMagic, 4);
    put_u16(buf, kModelFormatVersion);
    put_u8(buf, kind);
    put_u64(buf, payload.size());
    buf += payload;
    put_u64(buf, fnv1a(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open model file for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw io_error("model write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open model file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error("model read failed: " + path);
    return buf;
}

}  // namespace

void save_model(const TrainedSvm& model, const std::string& path) {
    write_file(path, kKindSvm, svm_payload(model));
}

void save_model(const PegasosModel& model, const std::string& path) {
    write_file(path, kKindCountModel, count_model_payload(model));
}

void save_model(const AnyModel& model, const std::string& path) {
    std::visit([&](const auto& m) { save_model(m, path); }, model);
}

AnyModel load_model(const std::string& path) {
    const std::string buf = read_file(path);
    constexpr std::size_t kHeaderSize = 4 + 2 + 1 + 8;

    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw corrupt_error("not a model file (bad magic): " + path);
    if (buf.size() < 6) throw corrupt_error("model file truncated: " + path);

    const auto* bytes = reinterpret_cast<const unsigned char*>(buf.data());
    const std::uint16_t version =
        static_cast<std::uint16_t>(bytes[4] | (static_cast<std::uint16_t>(bytes[5]) << 8));
    if (version != kModelFormatVersion)
        throw version_error("model format version " + std::to_string(version) +
                            " unsupported (expected " + std::to_string(kModelFormatVersion) +
                            "): " + path);
    if (buf.size() < kHeaderSize) throw corrupt_error("model file truncated: " + path);

    std::uint64_t payload_len = 0;
    for (int i = 0; i < 8; ++i) payload_len |= static_cast<std::uint64_t>(bytes[7 + i]) << (8 * i);
    if (buf.size() != kHeaderSize + payload_len + 8)
        throw corrupt_error("model file truncated or oversized: " + path);

    const std::uint64_t stored =
        [&] {
            std::uint64_t v = 0;
            const std::size_t at = kHeaderSize + payload_len;
            for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[at + i]) << (8 * i);
            return v;
        }();
    if (fnv1a(buf.data(), kHeaderSize + payload_len) != stored)
        throw corrupt_error("model checksum mismatch: " + path);

    const std::uint8_t kind = bytes[6];
    Cursor cur{bytes + kHeaderSize, payload_len};
    AnyModel model = [&]() -> AnyModel {
        if (kind == kKindSvm) return parse_svm(cur);
        if (kind == kKindCountModel) return parse_count_model(cur);
        throw corrupt_error("unknown model kind tag: " + path);
    }();
    if (cur.pos != cur.size) throw corrupt_error("model payload has trailing bytes: " + path);
    return model;
}

std::uint64_t file_checksum(const std::string& path) {
    const std::string buf = read_file(path);
    return fnv1a(buf.data(), buf.size());
}

}  // namespace qdp
