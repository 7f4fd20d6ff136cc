// Wall-clock timing records for the runtime study.
#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qdp {

enum class Phase { train, test1, test2 };

inline std::string to_string(Phase p) {
    switch (p) {
        case Phase::train: return "train";
        case Phase::test1: return "test1";
        case Phase::test2: return "test2";
    }
    return "?";
}

struct TimingRecord {
    Phase phase = Phase::train;
    int chunk_id = -1;  // -1 for whole-ensemble or non-chunk records
    double wall_seconds = 0.0;
    std::int64_t instances = 0;
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Minimum wall time over `repeats` runs — the low-noise estimator.
template <typename Fn>
double min_wall_seconds(Fn&& fn, int repeats) {
    if (repeats < 1) throw std::invalid_argument("min_wall_seconds: repeats must be >= 1");
    double best = 0.0;
    for (int r = 0; r < repeats; ++r) {
        Stopwatch watch;
        fn();
        const double elapsed = watch.seconds();
        if (r == 0 || elapsed < best) best = elapsed;
    }
    return best;
}

}  // namespace qdp
