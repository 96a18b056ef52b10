#include "scribkit/scribble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scribkit/nurbs.hpp"

namespace scribkit {

namespace {

Mask2D empty_like(const Mask2D& m) { return Mask2D(m.width, m.height); }

std::vector<Pixel> component_pixels(const Components& comps, int32_t id) {
    std::vector<Pixel> px;
    for (int y = 0; y < comps.height; ++y)
        for (int x = 0; x < comps.width; ++x)
            if (comps.label_at(x, y) == id) px.push_back({x, y});
    return px;
}

// Size-weighted draw among the component ids flagged as candidates.
int32_t pick_component(const Components& comps, const std::vector<char>& candidate,
                       ScribbleRng& rng) {
    int64_t total = 0;
    for (int32_t id = 1; id <= comps.count; ++id)
        if (candidate[id]) total += comps.sizes[id - 1];
    if (total == 0) return 0;
    int64_t r = static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(total)));
    for (int32_t id = 1; id <= comps.count; ++id) {
        if (!candidate[id]) continue;
        r -= comps.sizes[id - 1];
        if (r < 0) return id;
    }
    return 0;
}

// Flags components that belong to a class blob big enough to annotate.
// `comps` may label a subset of the class mask (the eroded interior); each
// component is mapped to its parent blob through any of its pixels.
std::vector<char> candidates_by_parent_blob(const Components& comps,
                                            const Components& class_comps,
                                            int min_component_pixels) {
    std::vector<char> ok(static_cast<size_t>(comps.count) + 1, 0);
    std::vector<char> seen(static_cast<size_t>(comps.count) + 1, 0);
    for (int y = 0; y < comps.height; ++y) {
        for (int x = 0; x < comps.width; ++x) {
            const int32_t id = comps.label_at(x, y);
            if (id == 0 || seen[id]) continue;
            seen[id] = 1;
            const int32_t parent = class_comps.label_at(x, y);
            ok[id] = parent != 0 && class_comps.sizes[parent - 1] >= min_component_pixels;
        }
    }
    return ok;
}

bool below_annotation_threshold(const Components& class_comps, int min_component_pixels) {
    for (int64_t s : class_comps.sizes)
        if (s >= min_component_pixels) return false;
    return true;
}

Mask2D intersect(const Mask2D& a, const Mask2D& b) {
    Mask2D out(a.width, a.height);
    for (size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = a.bits[i] & b.bits[i];
    return out;
}

// Greedy nearest-neighbor chaining from a random start; keeps the stroke
// from crossing itself the way an unordered point set would.
std::vector<Pixel> chain_points(std::vector<Pixel> pts, ScribbleRng& rng) {
    std::vector<Pixel> ordered;
    ordered.reserve(pts.size());
    size_t cur = rng.bounded(pts.size());
    ordered.push_back(pts[cur]);
    pts.erase(pts.begin() + static_cast<ptrdiff_t>(cur));
    while (!pts.empty()) {
        const Pixel last = ordered.back();
        size_t best = 0;
        int64_t best_d = -1;
        for (size_t i = 0; i < pts.size(); ++i) {
            const int64_t dx = pts[i].x - last.x, dy = pts[i].y - last.y;
            const int64_t d = dx * dx + dy * dy;
            if (best_d < 0 || d < best_d) {
                best_d = d;
                best = i;
            }
        }
        ordered.push_back(pts[best]);
        pts.erase(pts.begin() + static_cast<ptrdiff_t>(best));
    }
    return ordered;
}

} // namespace

Mask2D interior_scribble(const Mask2D& class_mask, const ScribbleConfig& cfg, ScribbleRng rng) {
    if (class_mask.count() == 0) return empty_like(class_mask);
    const Components class_comps = connected_components(class_mask, 8);
    if (below_annotation_threshold(class_comps, cfg.min_component_pixels))
        return empty_like(class_mask);

    Mask2D interior;
    for (double r : cfg.erosion_schedule()) {
        interior = erode(class_mask, r);
        if (interior.count() > 0) break;
    }

    const Components comps = connected_components(interior, 8);
    const auto candidate = candidates_by_parent_blob(comps, class_comps, cfg.min_component_pixels);
    const int32_t chosen = pick_component(comps, candidate, rng);
    if (chosen == 0) return empty_like(class_mask);

    std::vector<Pixel> pool = component_pixels(comps, chosen);
    int k = rng.uniform_int(cfg.control_points.lo, cfg.control_points.hi);
    k = std::min<int>(k, static_cast<int>(pool.size()));

    // partial Fisher-Yates draw without replacement
    std::vector<Pixel> picked;
    picked.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        const size_t j = i + rng.bounded(pool.size() - static_cast<size_t>(i));
        std::swap(pool[static_cast<size_t>(i)], pool[j]);
        picked.push_back(pool[static_cast<size_t>(i)]);
    }

    if (k == 1) {
        Mask2D out = empty_like(class_mask);
        out.set(picked[0].x, picked[0].y);
        return intersect(out, class_mask);
    }

    const std::vector<Pixel> ordered = chain_points(std::move(picked), rng);
    std::vector<Vec2> ctrl;
    std::vector<double> weights;
    for (const Pixel& p : ordered) {
        ctrl.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
        weights.push_back(rng.uniform(cfg.weight_range.lo, cfg.weight_range.hi));
    }

    const int degree = std::min(3, k - 1);
    const NurbsCurve curve = make_clamped(std::move(ctrl), std::move(weights), degree);
    const std::vector<Vec2> pts = sample(curve, cfg.samples_per_curve);
    return intersect(rasterize_polyline(pts, class_mask.width, class_mask.height), class_mask);
}

Mask2D border_scribble(const Mask2D& class_mask, const ScribbleConfig& cfg, ScribbleRng rng) {
    if (class_mask.count() == 0) return empty_like(class_mask);
    const Components comps = connected_components(class_mask, 8);

    std::vector<char> candidate(static_cast<size_t>(comps.count) + 1, 0);
    for (int32_t id = 1; id <= comps.count; ++id)
        candidate[id] = comps.sizes[id - 1] >= cfg.min_component_pixels;
    const int32_t chosen = pick_component(comps, candidate, rng);
    if (chosen == 0) return empty_like(class_mask);

    const Mask2D comp = component_mask(comps, chosen);
    const Contour contour = trace_boundary(comp);
    const int perimeter = static_cast<int>(contour.points.size());
    if (perimeter < 2) return empty_like(class_mask);

    const double f = rng.uniform(cfg.arc_fraction.lo, cfg.arc_fraction.hi);
    const int arc_len =
        std::clamp(static_cast<int>(std::lround(f * perimeter)), 2, perimeter);
    const int start = static_cast<int>(rng.bounded(static_cast<uint64_t>(perimeter)));

    // Smoothly varying inward offsets: a clamped curve through
    // (arc position, offset) pairs, sampled once per arc point.
    const int n_ctrl = (arc_len + 7) / 8 + 2;
    std::vector<Vec2> offset_ctrl;
    for (int i = 0; i < n_ctrl; ++i)
        offset_ctrl.push_back({static_cast<double>(i) / (n_ctrl - 1),
                               rng.uniform(0.0, cfg.offset_scale)});
    const NurbsCurve offset_curve = make_clamped(
        std::move(offset_ctrl), std::vector<double>(static_cast<size_t>(n_ctrl), 1.0),
        std::min(3, n_ctrl - 1));

    // centroid fallback for degenerate tangents
    double cx = 0.0, cy = 0.0;
    {
        int64_t n = 0;
        for (int y = 0; y < comp.height; ++y)
            for (int x = 0; x < comp.width; ++x)
                if (comp.test(x, y)) {
                    cx += x;
                    cy += y;
                    ++n;
                }
        cx /= static_cast<double>(n);
        cy /= static_cast<double>(n);
    }

    auto inside = [&](double px, double py) {
        const int x = static_cast<int>(std::lround(px));
        const int y = static_cast<int>(std::lround(py));
        return comp.in_bounds(x, y) && comp.test(x, y);
    };

    std::vector<Vec2> poly;
    poly.reserve(static_cast<size_t>(arc_len));
    for (int j = 0; j < arc_len; ++j) {
        const int idx = (start + j) % perimeter;
        const Pixel p = contour.points[static_cast<size_t>(idx)];
        const double u = arc_len == 1 ? 0.0 : static_cast<double>(j) / (arc_len - 1);
        const double offset = evaluate(offset_curve, u).y;

        const Pixel prev = contour.points[static_cast<size_t>((idx + perimeter - 1) % perimeter)];
        const Pixel next = contour.points[static_cast<size_t>((idx + 1) % perimeter)];
        Vec2 normal{static_cast<double>(-(next.y - prev.y)), static_cast<double>(next.x - prev.x)};
        const double len = normal.norm();
        if (len > 0) {
            normal = normal * (1.0 / len);
        } else {
            normal = {cx - p.x, cy - p.y};
            const double l2 = normal.norm();
            if (l2 > 0) normal = normal * (1.0 / l2);
        }
        // orient inward: probe a step along each direction
        if (!inside(p.x + normal.x, p.y + normal.y)) {
            if (inside(p.x - normal.x, p.y - normal.y)) {
                normal = normal * -1.0;
            } else if (!inside(p.x + 2 * normal.x, p.y + 2 * normal.y)) {
                if (inside(p.x - 2 * normal.x, p.y - 2 * normal.y)) normal = normal * -1.0;
            }
        }
        poly.push_back({p.x + normal.x * offset, p.y + normal.y * offset});
    }

    return intersect(rasterize_polyline(poly, class_mask.width, class_mask.height), class_mask);
}

LabelSlice generate_slice(const LabelSlice& slice, const std::vector<uint32_t>& classes,
                          const ScribbleConfig& cfg, uint64_t master_seed,
                          std::string_view volume_id, uint32_t ignore_label) {
    LabelSlice out;
    out.extents = slice.extents;
    out.axis = slice.axis;
    out.index = slice.index;
    out.data.assign(slice.data.size(), ignore_label);

    for (uint32_t cls : classes) {
        Mask2D mask(slice.extents[0], slice.extents[1]);
        bool any = false;
        for (size_t i = 0; i < slice.data.size(); ++i)
            if (slice.data[i] == cls) {
                mask.bits[i] = 1;
                any = true;
            }
        if (!any) continue; // class not on this slice

        const auto rng_interior = ScribbleRng::derive(master_seed, volume_id, slice.index,
                                                      static_cast<int>(cls),
                                                      static_cast<int>(ScribbleKind::interior));
        const auto rng_border = ScribbleRng::derive(master_seed, volume_id, slice.index,
                                                    static_cast<int>(cls),
                                                    static_cast<int>(ScribbleKind::border));
        const Mask2D si = interior_scribble(mask, cfg, rng_interior);
        const Mask2D sb = border_scribble(mask, cfg, rng_border);
        for (size_t i = 0; i < out.data.size(); ++i)
            if (si.bits[i] || sb.bits[i]) out.data[i] = cls;
    }
    return out;
}

LabelVolume generate_volume(const LabelVolume& v, const ScribbleConfig& cfg,
                            std::string_view volume_id) {
    cfg.validate();

    LabelVolume out;
    out.dims = v.dims;
    out.spacing = v.spacing;
    out.orient = v.orient;
    out.ignore_label = v.ignore_label;
    out.data.assign(static_cast<size_t>(v.voxel_count()), v.ignore_label);

    std::vector<uint32_t> classes = v.present_labels();
    if (!cfg.include_background)
        std::erase(classes, 0u);

    for (int index = 0; index < v.dims[cfg.slice_axis]; ++index) {
        const LabelSlice dense = slice_extract(v, cfg.slice_axis, index);
        const LabelSlice sparse = generate_slice(dense, classes, cfg, cfg.master_seed,
                                                 volume_id, v.ignore_label);
        slice_insert(out, sparse);
    }
    return out;
}

} // namespace scribkit
