#include "scribkit/phantom.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace scribkit {

namespace {

using nlohmann::json;

PhantomSpec::ShapeType shape_type_from(const std::string& s) {
    if (s == "sphere") return PhantomSpec::ShapeType::sphere;
    if (s == "box") return PhantomSpec::ShapeType::box;
    if (s == "ellipsoid") return PhantomSpec::ShapeType::ellipsoid;
    throw std::invalid_argument("phantom spec: unknown shape type '" + s + "'");
}

std::string shape_type_name(PhantomSpec::ShapeType t) {
    switch (t) {
        case PhantomSpec::ShapeType::sphere: return "sphere";
        case PhantomSpec::ShapeType::box: return "box";
        case PhantomSpec::ShapeType::ellipsoid: return "ellipsoid";
    }
    return "?";
}

bool contains(const PhantomSpec::Shape& s, double x, double y, double z) {
    const double dx = x - s.center[0], dy = y - s.center[1], dz = z - s.center[2];
    switch (s.type) {
        case PhantomSpec::ShapeType::sphere: {
            const double r = s.radii[0];
            return dx * dx + dy * dy + dz * dz <= r * r;
        }
        case PhantomSpec::ShapeType::box:
            return std::abs(dx) <= s.radii[0] && std::abs(dy) <= s.radii[1] &&
                   std::abs(dz) <= s.radii[2];
        case PhantomSpec::ShapeType::ellipsoid: {
            const double a = dx / s.radii[0], b = dy / s.radii[1], c = dz / s.radii[2];
            return a * a + b * b + c * c <= 1.0;
        }
    }
    return false;
}

} // namespace

void PhantomSpec::validate() const {
    for (int d : grid)
        if (d <= 0) throw std::invalid_argument("phantom spec: grid extents must be positive");
    if (shapes.empty()) throw std::invalid_argument("phantom spec: no shapes");
    std::set<uint32_t> ids;
    for (const Shape& s : shapes) {
        if (s.class_id < 1) throw std::invalid_argument("phantom spec: class ids start at 1");
        for (double r : s.radii)
            if (!(r > 0)) throw std::invalid_argument("phantom spec: radii must be positive");
        ids.insert(s.class_id);
    }
    uint32_t expect = 1;
    for (uint32_t id : ids)
        if (id != expect++)
            throw std::invalid_argument("phantom spec: class ids must be contiguous from 1");
}

PhantomSpec PhantomSpec::builtin_default() {
    PhantomSpec spec;
    spec.grid = {48, 48, 48};
    spec.shapes = {
        {ShapeType::sphere, 1, {16.0, 16.0, 22.0}, {10.0, 10.0, 10.0}},
        {ShapeType::box, 2, {33.0, 30.0, 24.0}, {7.0, 6.0, 8.0}},
        {ShapeType::ellipsoid, 3, {22.0, 35.0, 26.0}, {9.0, 7.0, 10.0}},
    };
    return spec;
}

PhantomSpec load_phantom_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("phantom spec: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_phantom_spec(ss.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

PhantomSpec parse_phantom_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("phantom spec: ") + e.what());
    }

    PhantomSpec spec;
    try {
        const auto grid = j.at("grid");
        for (int i = 0; i < 3; ++i) spec.grid[static_cast<size_t>(i)] = grid.at(i).get<int>();
        if (j.contains("spacing"))
            for (int i = 0; i < 3; ++i)
                spec.spacing[static_cast<size_t>(i)] = j["spacing"].at(i).get<float>();
        for (const auto& js : j.at("shapes")) {
            PhantomSpec::Shape s;
            s.type = shape_type_from(js.at("type").get<std::string>());
            s.class_id = js.at("class").get<uint32_t>();
            for (int i = 0; i < 3; ++i)
                s.center[static_cast<size_t>(i)] = js.at("center").at(i).get<double>();
            const auto& r = js.at("radii");
            if (r.size() == 1) {
                s.radii.fill(r.at(0).get<double>());
            } else {
                for (int i = 0; i < 3; ++i)
                    s.radii[static_cast<size_t>(i)] = r.at(i).get<double>();
            }
            spec.shapes.push_back(s);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("phantom spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string serialize_phantom_spec(const PhantomSpec& spec) {
    json j;
    j["grid"] = spec.grid;
    j["spacing"] = spec.spacing;
    j["shapes"] = json::array();
    for (const auto& s : spec.shapes) {
        json js;
        js["type"] = shape_type_name(s.type);
        js["class"] = s.class_id;
        js["center"] = s.center;
        js["radii"] = s.radii;
        j["shapes"].push_back(js);
    }
    return j.dump(2) + "\n";
}

LabelVolume synthesize_phantom(const PhantomSpec& spec) {
    spec.validate();
    uint32_t max_class = 0;
    for (const auto& s : spec.shapes) max_class = std::max(max_class, s.class_id);

    LabelVolume v = LabelVolume::create(spec.grid, spec.spacing, 0,
                                        default_ignore_label(max_class + 1));
    std::vector<int64_t> class_counts(max_class + 1, 0);
    for (int z = 0; z < spec.grid[2]; ++z)
        for (int y = 0; y < spec.grid[1]; ++y)
            for (int x = 0; x < spec.grid[0]; ++x) {
                uint32_t label = 0;
                for (const auto& s : spec.shapes)
                    if (contains(s, x, y, z)) label = s.class_id; // later shapes overwrite
                v.at(x, y, z) = label;
                ++class_counts[label];
            }

    for (uint32_t c = 1; c <= max_class; ++c)
        if (class_counts[c] == 0)
            throw std::invalid_argument("phantom: class " + std::to_string(c) +
                                        " is empty after voxelization");
    return v;
}

LabelVolume synthesize_phantom_jittered(const PhantomSpec& spec, ScribbleRng& rng) {
    PhantomSpec jittered = spec;
    for (auto& s : jittered.shapes) {
        for (double& c : s.center) c += rng.uniform(-2.0, 2.0);
        const double scale = rng.uniform(0.99, 1.01);
        for (double& r : s.radii) r *= scale;
    }
    return synthesize_phantom(jittered);
}

} // namespace scribkit
