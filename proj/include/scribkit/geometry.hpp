#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "scribkit/vec2.hpp"

namespace scribkit {

/// 2D binary mask. Pixel (x, y) is stored at bits[y * width + x]; pixel
/// centers sit on integer coordinates, pixel (i, j) spans
/// [i-0.5, i+0.5) x [j-0.5, j+0.5).
struct Mask2D {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    Mask2D() = default;
    Mask2D(int w, int h) : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}

    bool test(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v = true) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    int64_t count() const;
    bool empty() const { return count() == 0; }

    bool operator==(const Mask2D&) const = default;
};

struct Pixel {
    int x = 0;
    int y = 0;
    bool operator==(const Pixel&) const = default;
};

/// Boundary walk of one 8-connected component. Consecutive points are
/// 8-neighbors; every point is a boundary pixel (has a 4-neighbor outside
/// the mask, off-grid counting as outside).
struct Contour {
    std::vector<Pixel> points;
    bool closed = false;
};

/// Connected-component labeling. labels[y*w+x] is 0 for background, ids are
/// dense from 1 in raster order of first encounter. sizes[id-1] is the pixel
/// count of component id.
struct Components {
    int width = 0;
    int height = 0;
    int count = 0;
    std::vector<int32_t> labels;
    std::vector<int64_t> sizes;

    int32_t label_at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
};

/// Exact squared Euclidean distance to the nearest set pixel of `sources`
/// (two-pass Felzenszwalb transform). Pixels with no source anywhere get a
/// large sentinel (> any representable grid distance).
std::vector<int64_t> squared_distance_to(const Mask2D& sources);

/// Morphological erosion with a Euclidean disk: keeps pixels whose distance
/// to the nearest in-grid background pixel exceeds `radius`. radius 0 is the
/// identity. Off-grid is not treated as background.
Mask2D erode(const Mask2D& m, double radius);

Components connected_components(const Mask2D& m, int connectivity);

/// True where the component with this id lies.
Mask2D component_mask(const Components& comps, int32_t id);

/// Moore-neighbor trace of the outer boundary of a single 8-connected
/// component, clockwise (y down), starting at the raster-smallest boundary
/// pixel. The mask must contain exactly one 8-connected component.
Contour trace_boundary(const Mask2D& component);

/// Convenience overload: traces component `id` of the labeling of `m`.
Contour trace_boundary(const Mask2D& m, const Components& comps, int32_t id);

/// Rasterizes a polyline given by continuous coordinates into an 8-connected
/// pixel chain per segment (dense walk, round half away from zero). Pixels
/// outside the extents are clipped. Every drawn pixel lies within sqrt(2)/2
/// of the continuous polyline.
Mask2D rasterize_polyline(std::span<const Vec2> points, int width, int height);

} // namespace scribkit
