// Versioned, checksummed binary persistence for trained models.
//
// Layout: magic "QSVM", u16 format version, u8 model kind (0 = dual-form SVM,
// 1 = stochastic count model), u64 payload length, payload, u64 FNV-1a
// checksum of every preceding byte. All integers and IEEE-754 binary64 reals
// are little-endian regardless of host.
#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "qdp/pegasos.hpp"
#include "qdp/svm.hpp"

namespace qdp {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File exists but declares a format version this build does not speak.
struct version_error : io_error {
    using io_error::io_error;
};

// Bad magic, failed checksum, truncation, or an inconsistent payload.
struct corrupt_error : io_error {
    using io_error::io_error;
};

inline constexpr std::uint16_t kModelFormatVersion = 1;

using AnyModel = std::variant<TrainedSvm, PegasosModel>;

void save_model(const TrainedSvm& model, const std::string& path);
void save_model(const PegasosModel& model, const std::string& path);
void save_model(const AnyModel& model, const std::string& path);

AnyModel load_model(const std::string& path);

// FNV-1a over the whole file; manifests record this per model.
std::uint64_t file_checksum(const std::string& path);

}  // namespace qdp
