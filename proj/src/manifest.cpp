#include "scribkit/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace scribkit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string DatasetManifest::case_path(const std::string& case_rel) const {
    return (fs::path(root) / case_rel).string();
}

void DatasetManifest::validate() const {
    if (name.empty()) throw std::invalid_argument("manifest: dataset name is empty");
    if (cases.empty()) throw std::invalid_argument("manifest: no cases listed");
    if (class_names.empty() || class_names[0] != "background")
        throw std::invalid_argument("manifest: class index 0 must be named 'background'");
    if (slice_axis && (*slice_axis < 0 || *slice_axis > 2))
        throw std::invalid_argument("manifest: slice_axis must be 0, 1 or 2");
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("manifest: cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("manifest: " + path + ": " + e.what());
    }

    DatasetManifest m;
    try {
        m.name = j.at("name").get<std::string>();
        m.root = j.value("root", std::string("."));
        for (const auto& c : j.at("cases")) m.cases.push_back(c.get<std::string>());
        for (const auto& c : j.at("class_names")) m.class_names.push_back(c.get<std::string>());
        if (j.contains("slice_axis")) m.slice_axis = j["slice_axis"].get<int>();
        if (j.contains("config_overrides"))
            for (const auto& [k, v] : j["config_overrides"].items()) {
                if (v.is_string())
                    m.config_overrides[k] = v.get<std::string>();
                else
                    m.config_overrides[k] = v.dump();
            }
    } catch (const json::exception& e) {
        throw std::invalid_argument("manifest: " + path + ": " + e.what());
    }

    // root is relative to the manifest location
    const fs::path base = fs::path(path).parent_path();
    if (!fs::path(m.root).is_absolute()) m.root = (base / m.root).lexically_normal().string();

    m.validate();
    return m;
}

std::string serialize_manifest(const DatasetManifest& m) {
    json j;
    j["name"] = m.name;
    j["root"] = m.root;
    j["cases"] = m.cases;
    j["class_names"] = m.class_names;
    if (m.slice_axis) j["slice_axis"] = *m.slice_axis;
    if (!m.config_overrides.empty()) {
        json o = json::object();
        for (const auto& [k, v] : m.config_overrides) o[k] = v;
        j["config_overrides"] = o;
    }
    return j.dump(2) + "\n";
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::invalid_argument("manifest: cannot write " + path);
    f << serialize_manifest(m);
}

} // namespace scribkit
