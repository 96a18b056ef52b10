#include "scribkit/rng.hpp"

namespace scribkit {

namespace {
constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;
}

uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

uint64_t hash_string(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

ScribbleRng ScribbleRng::derive(uint64_t master_seed, std::string_view volume_id,
                                int slice_index, int class_id, int scribble_type) {
    uint64_t s = master_seed;
    s = mix64(s ^ hash_string(volume_id));
    s = mix64(s ^ static_cast<uint64_t>(slice_index));
    s = mix64(s ^ (static_cast<uint64_t>(class_id) << 8));
    s = mix64(s ^ (static_cast<uint64_t>(scribble_type) << 16));
    return ScribbleRng(s);
}

uint64_t ScribbleRng::next() {
    counter_ += kGamma;
    return mix64(counter_);
}

double ScribbleRng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double ScribbleRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

uint64_t ScribbleRng::bounded(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
}

int ScribbleRng::uniform_int(int lo, int hi) {
    return lo + static_cast<int>(bounded(static_cast<uint64_t>(hi - lo) + 1));
}

} // namespace scribkit
