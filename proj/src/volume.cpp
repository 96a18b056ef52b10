#include "scribkit/volume.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace scribkit {

LabelVolume LabelVolume::create(std::array<int, 3> dims, std::array<float, 3> spacing,
                                uint32_t fill, uint32_t ignore) {
    for (int d : dims)
        if (d <= 0) throw std::invalid_argument("LabelVolume: extents must be positive");
    for (float s : spacing)
        if (!(s > 0.0f)) throw std::invalid_argument("LabelVolume: spacing must be positive");

    LabelVolume v;
    v.dims = dims;
    v.spacing = spacing;
    v.ignore_label = ignore;
    v.orient.sform_code = 1;
    for (int i = 0; i < 3; ++i) v.orient.srow[i][i] = spacing[i];
    v.data.assign(static_cast<size_t>(v.voxel_count()), fill);
    return v;
}

Affine LabelVolume::affine() const {
    Affine a{};
    a[3] = {0.0, 0.0, 0.0, 1.0};
    if (orient.sform_code > 0) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) a[i][j] = orient.srow[i][j];
        return a;
    }
    if (orient.qform_code > 0) {
        const double b = orient.quatern[0], c = orient.quatern[1], d = orient.quatern[2];
        const double a0 = std::sqrt(std::max(0.0, 1.0 - b * b - c * c - d * d));
        const double R[3][3] = {
            {a0 * a0 + b * b - c * c - d * d, 2 * (b * c - a0 * d), 2 * (b * d + a0 * c)},
            {2 * (b * c + a0 * d), a0 * a0 + c * c - b * b - d * d, 2 * (c * d - a0 * b)},
            {2 * (b * d - a0 * c), 2 * (c * d + a0 * b), a0 * a0 + d * d - b * b - c * c}};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double scale = spacing[j];
                if (j == 2) scale *= orient.qfac;
                a[i][j] = R[i][j] * scale;
            }
            a[i][3] = orient.qoffset[i];
        }
        return a;
    }
    for (int i = 0; i < 3; ++i) a[i][i] = spacing[i];
    return a;
}

std::vector<uint32_t> LabelVolume::present_labels() const {
    std::set<uint32_t> seen(data.begin(), data.end());
    seen.erase(ignore_label);
    return {seen.begin(), seen.end()};
}

uint32_t default_ignore_label(uint32_t num_classes) {
    if (num_classes <= 255) return 255;
    if (num_classes <= 65535) return 65535;
    return 0xFFFFFFFFu;
}

LabelSlice slice_extract(const LabelVolume& v, int axis, int index) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("slice_extract: axis must be 0, 1 or 2");
    if (index < 0 || index >= v.dims[axis])
        throw std::out_of_range("slice_extract: index out of range");

    const int a0 = axis == 0 ? 1 : 0;
    const int a1 = axis == 2 ? 1 : 2;

    LabelSlice s;
    s.axis = axis;
    s.index = index;
    s.extents = {v.dims[a0], v.dims[a1]};
    s.data.resize(static_cast<size_t>(s.extents[0]) * s.extents[1]);

    std::array<int, 3> p{};
    p[axis] = index;
    for (int vv = 0; vv < s.extents[1]; ++vv) {
        p[a1] = vv;
        for (int u = 0; u < s.extents[0]; ++u) {
            p[a0] = u;
            s.at(u, vv) = v.at(p[0], p[1], p[2]);
        }
    }
    return s;
}

void slice_insert(LabelVolume& v, const LabelSlice& s) {
    if (s.axis < 0 || s.axis > 2) throw std::invalid_argument("slice_insert: bad axis");
    if (s.index < 0 || s.index >= v.dims[s.axis])
        throw std::out_of_range("slice_insert: index out of range");
    const int a0 = s.axis == 0 ? 1 : 0;
    const int a1 = s.axis == 2 ? 1 : 2;
    if (s.extents[0] != v.dims[a0] || s.extents[1] != v.dims[a1])
        throw std::invalid_argument("slice_insert: extents do not match volume");

    std::array<int, 3> p{};
    p[s.axis] = s.index;
    for (int vv = 0; vv < s.extents[1]; ++vv) {
        p[a1] = vv;
        for (int u = 0; u < s.extents[0]; ++u) {
            p[a0] = u;
            v.at(p[0], p[1], p[2]) = s.at(u, vv);
        }
    }
}

} // namespace scribkit
