#pragma once

#include <cstdint>
#include <string_view>

namespace scribkit {

/// Deterministic counter-based random stream (splitmix64). Streams for a
/// generation run are derived from (master seed, volume id, slice, class,
/// scribble type), so output never depends on scheduling or slice order.
class ScribbleRng {
public:
    explicit ScribbleRng(uint64_t stream_seed) : counter_(stream_seed) {}

    static ScribbleRng derive(uint64_t master_seed, std::string_view volume_id,
                              int slice_index, int class_id, int scribble_type);

    uint64_t next();

    /// Uniform double in [0, 1).
    double uniform();
    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi);
    /// Uniform index in [0, n). n must be > 0.
    uint64_t bounded(uint64_t n);

private:
    uint64_t counter_;
};

/// splitmix64 finalizer; stable across platforms.
uint64_t mix64(uint64_t x);

/// FNV-1a, used to fold string ids into stream derivation.
uint64_t hash_string(std::string_view s);

} // namespace scribkit
