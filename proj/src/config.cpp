#include "scribkit/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scribkit {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& v, const std::string& key) {
    double out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("config: bad number for '" + key + "': " + v);
    return out;
}

int parse_int(const std::string& v, const std::string& key) {
    int out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
    return out;
}

uint64_t parse_u64(const std::string& v, const std::string& key) {
    uint64_t out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
    return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean for '" + key + "': " + v);
}

// "lo..hi" or a single value meaning a degenerate range
std::pair<std::string, std::string> split_range(const std::string& v) {
    const auto pos = v.find("..");
    if (pos == std::string::npos) return {v, v};
    return {trim(v.substr(0, pos)), trim(v.substr(pos + 2))};
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), key));
    if (out.empty()) throw std::invalid_argument("config: empty list for '" + key + "'");
    return out;
}

void set_field(ScribbleConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "slice_axis") {
        cfg.slice_axis = parse_int(value, key);
    } else if (key == "erosion_radius") {
        cfg.erosion_radius = parse_double(value, key);
    } else if (key == "erosion_fallbacks") {
        cfg.erosion_fallbacks = parse_list(value, key);
    } else if (key == "control_points") {
        auto [lo, hi] = split_range(value);
        cfg.control_points = {parse_int(lo, key), parse_int(hi, key)};
    } else if (key == "weight_range") {
        auto [lo, hi] = split_range(value);
        cfg.weight_range = {parse_double(lo, key), parse_double(hi, key)};
    } else if (key == "samples_per_curve") {
        cfg.samples_per_curve = parse_int(value, key);
    } else if (key == "arc_fraction") {
        auto [lo, hi] = split_range(value);
        cfg.arc_fraction = {parse_double(lo, key), parse_double(hi, key)};
    } else if (key == "offset_scale") {
        cfg.offset_scale = parse_double(value, key);
    } else if (key == "min_component_pixels") {
        cfg.min_component_pixels = parse_int(value, key);
    } else if (key == "include_background") {
        cfg.include_background = parse_bool(value, key);
    } else if (key == "master_seed") {
        cfg.master_seed = parse_u64(value, key);
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

} // namespace

std::vector<double> ScribbleConfig::erosion_schedule() const {
    std::vector<double> radii{erosion_radius};
    for (double r : erosion_fallbacks)
        if (r < erosion_radius) radii.push_back(r);
    return radii;
}

void ScribbleConfig::validate() const {
    if (slice_axis < 0 || slice_axis > 2)
        throw std::invalid_argument("config: slice_axis must be 0, 1 or 2");
    if (erosion_radius < 0) throw std::invalid_argument("config: erosion_radius must be >= 0");
    if (erosion_fallbacks.empty() || erosion_fallbacks.back() != 0.0)
        throw std::invalid_argument("config: erosion_fallbacks must end in 0");
    for (double r : erosion_fallbacks)
        if (r < 0) throw std::invalid_argument("config: erosion fallback radii must be >= 0");
    if (control_points.lo < 2 || control_points.hi < control_points.lo)
        throw std::invalid_argument("config: control_points range must be non-empty and >= 2");
    if (!(weight_range.lo > 0) || weight_range.hi < weight_range.lo)
        throw std::invalid_argument("config: weight_range must be positive and non-empty");
    if (samples_per_curve < 2)
        throw std::invalid_argument("config: samples_per_curve must be >= 2");
    if (!(arc_fraction.lo > 0) || arc_fraction.hi < arc_fraction.lo || arc_fraction.hi > 1.0)
        throw std::invalid_argument("config: arc_fraction must lie in (0, 1]");
    if (offset_scale < 0) throw std::invalid_argument("config: offset_scale must be >= 0");
    if (min_component_pixels < 1)
        throw std::invalid_argument("config: min_component_pixels must be >= 1");
}

ScribbleConfig parse_config(const std::string& text) {
    ScribbleConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        set_field(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

ScribbleConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void apply_config_overrides(ScribbleConfig& cfg,
                            const std::map<std::string, std::string>& overrides) {
    for (const auto& [k, v] : overrides) set_field(cfg, k, v);
    cfg.validate();
}

std::string serialize_config(const ScribbleConfig& cfg) {
    std::ostringstream out;
    out << "slice_axis = " << cfg.slice_axis << "\n";
    out << "erosion_radius = " << cfg.erosion_radius << "\n";
    out << "erosion_fallbacks = ";
    for (size_t i = 0; i < cfg.erosion_fallbacks.size(); ++i)
        out << (i ? "," : "") << cfg.erosion_fallbacks[i];
    out << "\n";
    out << "control_points = " << cfg.control_points.lo << ".." << cfg.control_points.hi << "\n";
    out << "weight_range = " << cfg.weight_range.lo << ".." << cfg.weight_range.hi << "\n";
    out << "samples_per_curve = " << cfg.samples_per_curve << "\n";
    out << "arc_fraction = " << cfg.arc_fraction.lo << ".." << cfg.arc_fraction.hi << "\n";
    out << "offset_scale = " << cfg.offset_scale << "\n";
    out << "min_component_pixels = " << cfg.min_component_pixels << "\n";
    out << "include_background = " << (cfg.include_background ? "true" : "false") << "\n";
    out << "master_seed = " << cfg.master_seed << "\n";
    return out.str();
}

void save_config(const ScribbleConfig& cfg, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::invalid_argument("config: cannot write " + path);
    f << serialize_config(cfg);
}

} // namespace scribkit
