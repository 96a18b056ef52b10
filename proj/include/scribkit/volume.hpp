#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace scribkit {

using Affine = std::array<std::array<double, 4>, 4>;

/// NIfTI orientation fields, carried verbatim between read and write. Stored
/// at file precision (float32) so round trips are exact.
struct Orientation {
    int16_t qform_code = 0;
    int16_t sform_code = 0;
    float qfac = 1.0f;
    std::array<float, 3> quatern{0.0f, 0.0f, 0.0f}; // b, c, d
    std::array<float, 3> qoffset{0.0f, 0.0f, 0.0f};
    std::array<std::array<float, 4>, 3> srow{};

    bool operator==(const Orientation&) const = default;
};

/// Dense 3D grid of integer class labels. data is laid out with x fastest
/// (the NIfTI payload order): data[(z * dims[1] + y) * dims[0] + x].
struct LabelVolume {
    std::array<int, 3> dims{0, 0, 0};
    std::array<float, 3> spacing{1.0f, 1.0f, 1.0f}; // mm, file precision
    Orientation orient;
    uint32_t ignore_label = 255;
    std::vector<uint32_t> data;

    /// Grid of the given size with axis-aligned orientation (sform identity
    /// scaled by spacing), filled with `fill`.
    static LabelVolume create(std::array<int, 3> dims, std::array<float, 3> spacing,
                              uint32_t fill = 0, uint32_t ignore = 255);

    int64_t voxel_count() const {
        return static_cast<int64_t>(dims[0]) * dims[1] * dims[2];
    }
    size_t index(int x, int y, int z) const {
        return (static_cast<size_t>(z) * dims[1] + y) * dims[0] + x;
    }
    uint32_t at(int x, int y, int z) const { return data[index(x, y, z)]; }
    uint32_t& at(int x, int y, int z) { return data[index(x, y, z)]; }

    /// Voxel-to-world transform derived from the orientation fields
    /// (sform wins over qform; plain spacing diagonal when neither is set).
    Affine affine() const;

    /// Sorted class ids present in the volume, excluding ignore_label.
    std::vector<uint32_t> present_labels() const;

    bool same_grid(const LabelVolume& o) const {
        return dims == o.dims && spacing == o.spacing && orient == o.orient;
    }
};

/// Default reserved ignore value for a given class count: stays inside the
/// smallest unsigned width that holds the classes themselves.
uint32_t default_ignore_label(uint32_t num_classes);

/// One plane of a volume. Removing `axis` keeps the two remaining axes in
/// order; data is stored with the first remaining axis fastest.
struct LabelSlice {
    std::array<int, 2> extents{0, 0};
    int axis = 2;
    int index = 0;
    std::vector<uint32_t> data;

    uint32_t at(int u, int v) const { return data[static_cast<size_t>(v) * extents[0] + u]; }
    uint32_t& at(int u, int v) { return data[static_cast<size_t>(v) * extents[0] + u]; }
};

LabelSlice slice_extract(const LabelVolume& v, int axis, int index);

/// Inverse of slice_extract: writes the plane back, leaving all other voxels
/// untouched.
void slice_insert(LabelVolume& v, const LabelSlice& s);

} // namespace scribkit
