#pragma once

#include <vector>

#include "scribkit/vec2.hpp"

namespace scribkit {

/// Rational B-spline curve with a clamped knot vector on [0, 1].
struct NurbsCurve {
    int degree = 1;
    std::vector<Vec2> control_points;
    std::vector<double> weights;
    std::vector<double> knots;
};

/// Builds a clamped curve with uniform interior knots on [0, 1]; the curve
/// interpolates its first and last control points.
NurbsCurve make_clamped(std::vector<Vec2> control_points, std::vector<double> weights,
                        int degree);

/// Non-rational basis values N_{i,degree}(u) for every control index i
/// (Cox–de Boor; 0/0 resolves to 0). u must lie in [knots.front(), knots.back()].
std::vector<double> basis(const std::vector<double>& knots, int degree, double u);

/// Rational evaluation: sum(w_i N_i(u) P_i) / sum(w_i N_i(u)).
Vec2 evaluate(const NurbsCurve& c, double u);

/// Polyline of n points at uniform parameters k/(n-1), n >= 2.
std::vector<Vec2> sample(const NurbsCurve& c, int n);

} // namespace scribkit
