#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace scribkit::oracles {

Mask2D erode_brute(const Mask2D& m, double radius) {
    Mask2D out(m.width, m.height);
    const int r = static_cast<int>(std::ceil(radius));
    const double r2 = radius * radius;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            if (!m.test(x, y)) continue;
            bool keep = true;
            for (int dy = -r; dy <= r && keep; ++dy)
                for (int dx = -r; dx <= r && keep; ++dx) {
                    if (dx * dx + dy * dy > r2) continue;
                    const int qx = x + dx, qy = y + dy;
                    if (m.in_bounds(qx, qy) && !m.test(qx, qy)) keep = false;
                }
            if (keep) out.set(x, y);
        }
    return out;
}

namespace {

void flood(const Mask2D& m, std::vector<int32_t>& labels, int x, int y, int32_t id,
           int connectivity) {
    labels[static_cast<size_t>(y) * m.width + x] = id;
    static constexpr int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    for (int k = 0; k < connectivity; ++k) {
        const int qx = x + dx8[k], qy = y + dy8[k];
        if (m.in_bounds(qx, qy) && m.test(qx, qy) &&
            labels[static_cast<size_t>(qy) * m.width + qx] == 0)
            flood(m, labels, qx, qy, id, connectivity);
    }
}

} // namespace

Components flood_fill_components(const Mask2D& m, int connectivity) {
    Components out;
    out.width = m.width;
    out.height = m.height;
    out.labels.assign(static_cast<size_t>(m.width) * m.height, 0);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.test(x, y) && out.label_at(x, y) == 0)
                flood(m, out.labels, x, y, ++out.count, connectivity);
    out.sizes.assign(static_cast<size_t>(out.count), 0);
    for (int32_t l : out.labels)
        if (l > 0) ++out.sizes[static_cast<size_t>(l) - 1];
    return out;
}

std::set<std::pair<int, int>> boundary_pixels(const Mask2D& m) {
    std::set<std::pair<int, int>> out;
    static constexpr int dx4[4] = {1, -1, 0, 0};
    static constexpr int dy4[4] = {0, 0, 1, -1};
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            if (!m.test(x, y)) continue;
            for (int k = 0; k < 4; ++k) {
                const int qx = x + dx4[k], qy = y + dy4[k];
                if (!m.in_bounds(qx, qy) || !m.test(qx, qy)) {
                    out.insert({x, y});
                    break;
                }
            }
        }
    return out;
}

std::set<std::pair<int, int>> outer_boundary_pixels(const Mask2D& component) {
    const int w = component.width, h = component.height;
    // 4-connected flood of background from the border
    std::vector<char> exterior(static_cast<size_t>(w) * h, 0);
    std::vector<std::pair<int, int>> stack;
    auto push = [&](int x, int y) {
        if (x < 0 || x >= w || y < 0 || y >= h) return;
        const size_t i = static_cast<size_t>(y) * w + x;
        if (exterior[i] || component.bits[i]) return;
        exterior[i] = 1;
        stack.push_back({x, y});
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        push(x + 1, y);
        push(x - 1, y);
        push(x, y + 1);
        push(x, y - 1);
    }

    std::set<std::pair<int, int>> out;
    static constexpr int dx4[4] = {1, -1, 0, 0};
    static constexpr int dy4[4] = {0, 0, 1, -1};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!component.test(x, y)) continue;
            for (int k = 0; k < 4; ++k) {
                const int qx = x + dx4[k], qy = y + dy4[k];
                if (qx < 0 || qx >= w || qy < 0 || qy >= h ||
                    exterior[static_cast<size_t>(qy) * w + qx]) {
                    out.insert({x, y});
                    break;
                }
            }
        }
    return out;
}

namespace {

double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    if (len2 == 0.0) return (p - a).norm();
    double t = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return (p - Vec2{a.x + t * ab.x, a.y + t * ab.y}).norm();
}

} // namespace

double distance_to_polyline(Vec2 p, const std::vector<Vec2>& polyline) {
    if (polyline.size() == 1) return (p - polyline[0]).norm();
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < polyline.size(); ++i)
        best = std::min(best, dist_point_segment(p, polyline[i], polyline[i + 1]));
    return best;
}

bool in_convex_hull(Vec2 p, std::vector<Vec2> pts, double tol) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](Vec2 o, Vec2 a, Vec2 b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    if (pts.size() == 1) return (p - pts[0]).norm() <= tol;
    if (pts.size() == 2) return dist_point_segment(p, pts[0], pts[1]) <= tol;

    std::vector<Vec2> hull(2 * pts.size());
    size_t k = 0;
    for (const Vec2& q : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], q) <= 0) --k;
        hull[k++] = q;
    }
    const size_t lower = k + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);

    for (size_t i = 0; i < hull.size(); ++i) {
        const Vec2 a = hull[i], b = hull[(i + 1) % hull.size()];
        const double side = cross(a, b, p);
        const double edge = (b - a).norm();
        if (edge > 0 && side < -tol * edge) return false;
    }
    return true;
}

double dense_cross_entropy(const LogitField& logits, const std::vector<int32_t>& labels) {
    const int C = logits.num_classes;
    const int64_t N = logits.num_voxels;
    double acc = 0.0;
    for (int64_t j = 0; j < N; ++j) {
        double denom = 0.0;
        for (int c = 0; c < C; ++c) denom += std::exp(logits.at(c, j));
        acc -= std::log(std::exp(logits.at(labels[static_cast<size_t>(j)], j)) / denom);
    }
    return acc / static_cast<double>(N);
}

double dense_soft_dice(const LogitField& logits, const std::vector<int32_t>& labels,
                       double smooth) {
    const int C = logits.num_classes;
    const int64_t N = logits.num_voxels;
    double total = 0.0;
    int present = 0;
    for (int c = 0; c < C; ++c) {
        double inter = 0.0, psum = 0.0;
        int64_t tsum = 0;
        for (int64_t j = 0; j < N; ++j) {
            double denom = 0.0;
            for (int k = 0; k < C; ++k) denom += std::exp(logits.at(k, j));
            const double p = std::exp(logits.at(c, j)) / denom;
            psum += p;
            if (labels[static_cast<size_t>(j)] == c) {
                inter += p;
                ++tsum;
            }
        }
        if (tsum == 0) continue;
        total += (2.0 * inter + smooth) / (psum + static_cast<double>(tsum) + smooth);
        ++present;
    }
    return 1.0 - total / present;
}

Mask2D random_mask(int w, int h, double fill, ScribbleRng& rng) {
    Mask2D m(w, h);
    for (auto& b : m.bits) b = rng.uniform() < fill ? 1 : 0;
    return m;
}

} // namespace scribkit::oracles
