#pragma once
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>
#include <pclasso/core.hpp>

namespace pclasso {

/**
 * Level sets of the pcLasso penalty for two standardized predictors with
 * correlation rho, written in closed form:
 *
 *   P(b) = lambda (|b1| + |b2|) + 2 theta rho (b1 - b2)^2     rho > 0
 *   P(b) = lambda (|b1| + |b2|) - 2 theta rho (b1 + b2)^2     rho < 0
 *
 * This is the normalization of the two-predictor closed form. With the
 * block A returned by build_penalty for X^T X = [[1, rho], [rho, 1]]
 * (A = |rho| [[1, -s], [-s, 1]], s = sign rho) it equals
 * penalty_value(b, lambda, 4 theta).
 */
inline double contour_penalty(double b1, double b2, double lambda, double theta, double rho)
{
    const double l1 = std::abs(b1) + std::abs(b2);
    if (rho >= 0.0) return lambda * l1 + 2.0 * theta * rho * (b1 - b2) * (b1 - b2);
    return lambda * l1 - 2.0 * theta * rho * (b1 + b2) * (b1 + b2);
}

struct ContourPoint
{
    double x;
    double y;
    std::string piece;   // sign quadrant: "pp", "mp", "mm", "pm"
};

namespace detail {

inline std::string quadrant_label(double x, double y, const char* fallback)
{
    if (x > 0 && y > 0) return "pp";
    if (x < 0 && y > 0) return "mp";
    if (x < 0 && y < 0) return "mm";
    if (x > 0 && y < 0) return "pm";
    return fallback;
}

} // namespace detail

/**
 * Closed polyline {b : P(b) = level}, assembled counter-clockwise from the
 * four sign-quadrant pieces. Same-sign quadrants are arcs of a parabola
 * rotated by 45 degrees, mixed-sign quadrants are straight segments
 * (roles swap for rho < 0). rho = 0 or theta = 0 gives the l1 diamond.
 */
inline std::vector<ContourPoint> contour_2d(double lambda, double theta, double rho,
                                            double level, Index n_points)
{
    if (!(lambda >= 0.0) || !(theta >= 0.0)) throw UsageError("lambda and theta must be >= 0");
    if (!(rho > -1.0 && rho < 1.0)) throw UsageError("rho must lie in (-1, 1)");
    if (!(level > 0.0)) throw UsageError("contour level must be positive");
    if (n_points < 8) throw UsageError("contour needs at least 8 points");

    const double r = std::abs(rho);
    const double q = 2.0 * theta * r;   // weight on the squared difference
    if (lambda == 0.0) {
        throw UsageError("the level set is unbounded when lambda = 0");
    }
    const double sqrt2 = std::sqrt(2.0);
    // Rationalized roots avoid cancellation when q is small.
    // Mixed-sign segment: lambda t + q t^2 = C.
    const double t = 2.0 * level / (lambda + std::sqrt(lambda * lambda + 4.0 * q * level));
    // Same-sign arc in rotated coordinates: sqrt2 lambda |u| + 2 q v^2 = C, |v| <= v_max.
    const double v_max = 2.0 * level
        / (sqrt2 * lambda + std::sqrt(2.0 * lambda * lambda + 8.0 * q * level));

    const Index per = std::max<Index>(2, n_points / 4);
    std::vector<ContourPoint> pts;
    pts.reserve(4 * per);
    const double flip = rho < 0.0 ? -1.0 : 1.0;
    auto emit = [&](double b1, double b2, const char* piece) {
        const double y = flip * b2;
        pts.push_back({b1, y, detail::quadrant_label(b1, y, piece)});
    };
    auto frac = [&](Index i) { return static_cast<double>(i) / static_cast<double>(per - 1); };

    // Arc with b1, b2 >= 0, from (t, 0) to (0, t).
    for (Index i = 0; i < per; ++i) {
        const double v = v_max * (1.0 - 2.0 * frac(i));
        const double u = (level - 2.0 * q * v * v) / (sqrt2 * lambda);
        emit((u + v) / sqrt2, (u - v) / sqrt2, flip > 0 ? "pp" : "pm");
    }
    // Segment b1 <= 0 <= b2: b2 = b1 + t.
    for (Index i = 0; i < per; ++i) {
        const double b1 = -t * frac(i);
        emit(b1, b1 + t, flip > 0 ? "mp" : "mm");
    }
    // Arc with b1, b2 <= 0, from (-t, 0) to (0, -t).
    for (Index i = 0; i < per; ++i) {
        const double v = -v_max * (1.0 - 2.0 * frac(i));
        const double u = -(level - 2.0 * q * v * v) / (sqrt2 * lambda);
        emit((u + v) / sqrt2, (u - v) / sqrt2, flip > 0 ? "mm" : "mp");
    }
    // Segment b2 <= 0 <= b1: b2 = b1 - t.
    for (Index i = 0; i < per; ++i) {
        const double b1 = t * frac(i);
        emit(b1, b1 - t, flip > 0 ? "pm" : "pp");
    }
    return pts;
}

} // namespace pclasso
