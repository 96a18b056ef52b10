// Brute-force reference implementations used only by the tests. Each oracle
// deliberately avoids the code path it verifies.
#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "scribkit/geometry.hpp"
#include "scribkit/losses.hpp"
#include "scribkit/rng.hpp"
#include "scribkit/vec2.hpp"

namespace scribkit::oracles {

// O(n^2 r^2) erosion: keep a set pixel iff every in-grid pixel within
// Euclidean distance <= radius is set.
Mask2D erode_brute(const Mask2D& m, double radius);

// Recursive flood fill, raster-scan seed order (matches the dense-id
// contract of connected_components).
Components flood_fill_components(const Mask2D& m, int connectivity);

// Mask pixels with a 4-neighbor outside the mask (off-grid counts as
// outside).
std::set<std::pair<int, int>> boundary_pixels(const Mask2D& m);

// Component pixels 4-adjacent to the exterior background region (background
// flood-filled from the grid border; off-grid is exterior).
std::set<std::pair<int, int>> outer_boundary_pixels(const Mask2D& component);

// Distance from a point to the closest point of a polyline.
double distance_to_polyline(Vec2 p, const std::vector<Vec2>& polyline);

// Convex hull membership with tolerance (monotone chain + half-plane tests).
bool in_convex_hull(Vec2 p, std::vector<Vec2> hull_points, double tol);

// Dense mean cross-entropy over every voxel, written independently of the
// losses module (plain exp/sum softmax, no max subtraction).
double dense_cross_entropy(const LogitField& logits, const std::vector<int32_t>& labels);

// Dense soft Dice over every voxel, mean over classes present in `labels`.
double dense_soft_dice(const LogitField& logits, const std::vector<int32_t>& labels,
                       double smooth);

Mask2D random_mask(int w, int h, double fill, ScribbleRng& rng);

} // namespace scribkit::oracles
