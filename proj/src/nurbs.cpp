#include "scribkit/nurbs.hpp"

#include <algorithm>
#include <stdexcept>

namespace scribkit {

NurbsCurve make_clamped(std::vector<Vec2> control_points, std::vector<double> weights,
                        int degree) {
    const int n = static_cast<int>(control_points.size());
    if (degree < 1) throw std::invalid_argument("make_clamped: degree must be >= 1");
    if (n < degree + 1)
        throw std::invalid_argument("make_clamped: need at least degree+1 control points");
    if (static_cast<int>(weights.size()) != n)
        throw std::invalid_argument("make_clamped: one weight per control point");
    for (double w : weights)
        if (!(w > 0.0)) throw std::invalid_argument("make_clamped: weights must be positive");

    NurbsCurve c;
    c.degree = degree;
    c.control_points = std::move(control_points);
    c.weights = std::move(weights);
    c.knots.assign(degree + 1, 0.0);
    const int spans = n - degree; // interior knots: spans - 1
    for (int i = 1; i < spans; ++i)
        c.knots.push_back(static_cast<double>(i) / spans);
    c.knots.insert(c.knots.end(), degree + 1, 1.0);
    return c;
}

std::vector<double> basis(const std::vector<double>& knots, int degree, double u) {
    const int m = static_cast<int>(knots.size());
    const int n = m - degree - 1; // number of basis functions
    if (degree < 0 || n < 1) throw std::invalid_argument("basis: invalid knot/degree combination");
    if (!std::is_sorted(knots.begin(), knots.end()))
        throw std::invalid_argument("basis: knots must be non-decreasing");
    if (u < knots.front() || u > knots.back())
        throw std::domain_error("basis: parameter outside knot range");

    // Degree-0 indicators over the m-1 spans; u at the top of the domain is
    // assigned to the last non-degenerate span so N sums to 1 there too.
    std::vector<double> N(m - 1, 0.0);
    if (u >= knots.back()) {
        for (int i = m - 2; i >= 0; --i)
            if (knots[i] < knots[i + 1]) {
                N[i] = 1.0;
                break;
            }
    } else {
        for (int i = 0; i < m - 1; ++i)
            if (knots[i] <= u && u < knots[i + 1]) {
                N[i] = 1.0;
                break;
            }
    }

    for (int d = 1; d <= degree; ++d) {
        for (int i = 0; i + d < m - 1; ++i) {
            const double left_den = knots[i + d] - knots[i];
            const double right_den = knots[i + d + 1] - knots[i + 1];
            double v = 0.0;
            if (left_den > 0.0) v += (u - knots[i]) / left_den * N[i];
            if (right_den > 0.0) v += (knots[i + d + 1] - u) / right_den * N[i + 1];
            N[i] = v;
        }
    }
    N.resize(n);
    return N;
}

Vec2 evaluate(const NurbsCurve& c, double u) {
    const std::vector<double> N = basis(c.knots, c.degree, u);
    double wx = 0.0, wy = 0.0, wsum = 0.0;
    for (size_t i = 0; i < N.size(); ++i) {
        const double wn = c.weights[i] * N[i];
        wx += wn * c.control_points[i].x;
        wy += wn * c.control_points[i].y;
        wsum += wn;
    }
    return {wx / wsum, wy / wsum};
}

std::vector<Vec2> sample(const NurbsCurve& c, int n) {
    if (n < 2) throw std::invalid_argument("sample: need n >= 2");
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int k = 0; k < n; ++k)
        pts.push_back(evaluate(c, static_cast<double>(k) / (n - 1)));
    return pts;
}

} // namespace scribkit
