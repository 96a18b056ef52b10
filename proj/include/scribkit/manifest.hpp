#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scribkit {

/// One benchmark dataset: where its label volumes live and what the classes
/// mean. A manifest is a single JSON file per dataset.
struct DatasetManifest {
    std::string name;
    std::string root; // resolved relative to the manifest file's directory
    std::vector<std::string> cases; // label-volume paths relative to root
    std::vector<std::string> class_names; // index 0 must be "background"
    std::optional<int> slice_axis;
    std::map<std::string, std::string> config_overrides;

    /// Absolute path of a case file.
    std::string case_path(const std::string& case_rel) const;

    void validate() const;
};

DatasetManifest load_manifest(const std::string& path);
std::string serialize_manifest(const DatasetManifest& m);
void save_manifest(const DatasetManifest& m, const std::string& path);

} // namespace scribkit
