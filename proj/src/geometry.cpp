#include "scribkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scribkit {

namespace {

// Larger than any squared grid distance (dims are bounded by the int16 NIfTI
// dim fields), small enough that f + q*q stays exact in double.
constexpr int64_t kFarAway = int64_t(1) << 40;

// 1D squared-distance lower envelope (Felzenszwalb & Huttenlocher).
void dt1d(const int64_t* f, int n, int64_t* d, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        for (;;) {
            int p = v[k];
            s = (static_cast<double>(f[q] + int64_t(q) * q) -
                 static_cast<double>(f[p] + int64_t(p) * p)) /
                (2.0 * (q - p));
            if (k > 0 && s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        int p = v[k];
        int64_t dd = int64_t(q - p) * (q - p) + f[p];
        d[q] = std::min(dd, kFarAway);
    }
}

} // namespace

int64_t Mask2D::count() const {
    int64_t n = 0;
    for (uint8_t b : bits) n += b;
    return n;
}

std::vector<int64_t> squared_distance_to(const Mask2D& sources) {
    const int w = sources.width, h = sources.height;
    std::vector<int64_t> dist(static_cast<size_t>(w) * h, kFarAway);
    if (w == 0 || h == 0) return dist;

    for (size_t i = 0; i < dist.size(); ++i)
        if (sources.bits[i]) dist[i] = 0;

    const int n = std::max(w, h);
    std::vector<int64_t> f(n), d(n);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);

    // rows, then columns
    for (int y = 0; y < h; ++y) {
        int64_t* row = dist.data() + static_cast<size_t>(y) * w;
        std::copy(row, row + w, f.begin());
        dt1d(f.data(), w, d.data(), v.data(), z.data());
        std::copy(d.begin(), d.begin() + w, row);
    }
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = dist[static_cast<size_t>(y) * w + x];
        dt1d(f.data(), h, d.data(), v.data(), z.data());
        for (int y = 0; y < h; ++y) dist[static_cast<size_t>(y) * w + x] = d[y];
    }
    return dist;
}

Mask2D erode(const Mask2D& m, double radius) {
    if (radius < 0) throw std::invalid_argument("erode: negative radius");
    if (radius == 0.0) return m;

    Mask2D background(m.width, m.height);
    for (size_t i = 0; i < m.bits.size(); ++i) background.bits[i] = m.bits[i] ? 0 : 1;

    const std::vector<int64_t> d2 = squared_distance_to(background);
    const double r2 = radius * radius;
    Mask2D out(m.width, m.height);
    for (size_t i = 0; i < m.bits.size(); ++i)
        out.bits[i] = (m.bits[i] && static_cast<double>(d2[i]) > r2) ? 1 : 0;
    return out;
}

Components connected_components(const Mask2D& m, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw std::invalid_argument("connected_components: connectivity must be 4 or 8");

    static constexpr int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int nn = connectivity;

    Components out;
    out.width = m.width;
    out.height = m.height;
    out.labels.assign(static_cast<size_t>(m.width) * m.height, 0);

    std::vector<Pixel> stack;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            const size_t idx = static_cast<size_t>(y) * m.width + x;
            if (!m.bits[idx] || out.labels[idx] != 0) continue;
            const int32_t id = ++out.count;
            int64_t size = 0;
            stack.push_back({x, y});
            out.labels[idx] = id;
            while (!stack.empty()) {
                Pixel p = stack.back();
                stack.pop_back();
                ++size;
                for (int k = 0; k < nn; ++k) {
                    int qx = p.x + dx8[k], qy = p.y + dy8[k];
                    if (!m.in_bounds(qx, qy)) continue;
                    const size_t qi = static_cast<size_t>(qy) * m.width + qx;
                    if (m.bits[qi] && out.labels[qi] == 0) {
                        out.labels[qi] = id;
                        stack.push_back({qx, qy});
                    }
                }
            }
            out.sizes.push_back(size);
        }
    }
    return out;
}

Mask2D component_mask(const Components& comps, int32_t id) {
    Mask2D out(comps.width, comps.height);
    for (size_t i = 0; i < comps.labels.size(); ++i)
        out.bits[i] = comps.labels[i] == id ? 1 : 0;
    return out;
}

namespace {

// Clockwise Moore neighborhood with y pointing down: N, NE, E, SE, S, SW, W, NW.
constexpr int mx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int my[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

int direction_of(Pixel from, Pixel to) {
    for (int d = 0; d < 8; ++d)
        if (from.x + mx[d] == to.x && from.y + my[d] == to.y) return d;
    throw std::logic_error("trace_boundary: pixels not adjacent");
}

} // namespace

Contour trace_boundary(const Mask2D& component) {
    auto inside = [&](int x, int y) { return component.in_bounds(x, y) && component.test(x, y); };

    Pixel start{-1, -1};
    for (int y = 0; y < component.height && start.x < 0; ++y)
        for (int x = 0; x < component.width; ++x)
            if (component.test(x, y)) {
                start = {x, y};
                break;
            }
    if (start.x < 0) throw std::invalid_argument("trace_boundary: empty component");

    Contour contour;
    contour.closed = true;
    contour.points.push_back(start);

    // The raster-smallest pixel has a background west neighbor; start the
    // clockwise scan there. Terminate when the (pixel, backtrack) state right
    // after the first move repeats (Jacob-style criterion).
    Pixel b = start;
    Pixel c{start.x - 1, start.y};
    Pixel first_b{-1, -1}, first_c{-1, -1};

    const int64_t max_steps = 8 * (4 * component.count() + 8);
    for (int64_t step = 0; step < max_steps; ++step) {
        const int back = direction_of(b, c);
        int found = -1;
        Pixel last_bg = c;
        for (int i = 1; i <= 8; ++i) {
            const int d = (back + i) % 8;
            const Pixel q{b.x + mx[d], b.y + my[d]};
            if (inside(q.x, q.y)) {
                found = d;
                break;
            }
            last_bg = q;
        }
        if (found < 0) return contour; // isolated pixel

        const Pixel nb{b.x + mx[found], b.y + my[found]};
        if (first_b.x < 0) {
            first_b = nb;
            first_c = last_bg;
        } else if (nb == first_b && last_bg == first_c) {
            break;
        }
        b = nb;
        c = last_bg;
        contour.points.push_back(b);
    }

    if (contour.points.size() > 1 && contour.points.back() == contour.points.front())
        contour.points.pop_back();
    return contour;
}

Contour trace_boundary(const Mask2D& m, const Components& comps, int32_t id) {
    if (id < 1 || id > comps.count) throw std::invalid_argument("trace_boundary: no such component");
    (void)m;
    return trace_boundary(component_mask(comps, id));
}

namespace {

int round_half_away(double v) {
    return static_cast<int>(std::lround(v));
}

} // namespace

Mask2D rasterize_polyline(std::span<const Vec2> points, int width, int height) {
    if (points.empty()) throw std::invalid_argument("rasterize_polyline: no points");
    Mask2D out(width, height);

    auto plot = [&](double px, double py) {
        const int x = round_half_away(px), y = round_half_away(py);
        if (out.in_bounds(x, y)) out.set(x, y);
    };

    plot(points[0].x, points[0].y);
    for (size_t i = 0; i + 1 < points.size(); ++i) {
        const Vec2 a = points[i], b = points[i + 1];
        const double span = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
        // step < 0.5 keeps consecutive rounded pixels 8-adjacent
        const int steps = std::max(1, static_cast<int>(std::ceil(span / 0.45)));
        for (int s = 1; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            plot(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
        }
    }
    return out;
}

} // namespace scribkit
