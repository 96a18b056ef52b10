#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace scribkit {

struct IntRange {
    int lo = 0;
    int hi = 0;
    bool operator==(const IntRange&) const = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Interval&) const = default;
};

/// All generation knobs. Serializes to a "key = value" config file; ranges
/// are written as "lo..hi". Unknown keys are rejected to catch typos.
struct ScribbleConfig {
    int slice_axis = 2;
    double erosion_radius = 2.0;
    std::vector<double> erosion_fallbacks{2.0, 1.0, 0.0}; // must end in 0
    IntRange control_points{4, 8};
    Interval weight_range{0.5, 2.0};
    int samples_per_curve = 128;
    Interval arc_fraction{0.1, 0.25};
    double offset_scale = 1.5;
    int min_component_pixels = 10;
    bool include_background = true;
    uint64_t master_seed = 0;

    /// Radii actually tried when eroding: erosion_radius first, then each
    /// fallback strictly smaller than it.
    std::vector<double> erosion_schedule() const;

    /// Throws std::invalid_argument when a field violates its invariant.
    void validate() const;

    bool operator==(const ScribbleConfig&) const = default;
};

/// Parses config file text. Lines are "key = value"; blank lines and lines
/// starting with '#' are skipped. Unknown keys are errors.
ScribbleConfig parse_config(const std::string& text);

ScribbleConfig load_config(const std::string& path);

/// Applies "key = value" overrides onto an existing config.
void apply_config_overrides(ScribbleConfig& cfg,
                            const std::map<std::string, std::string>& overrides);

std::string serialize_config(const ScribbleConfig& cfg);

void save_config(const ScribbleConfig& cfg, const std::string& path);

} // namespace scribkit
