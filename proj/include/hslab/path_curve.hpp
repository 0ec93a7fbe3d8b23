#pragma once

#include <vector>

#include "hslab/complex_types.hpp"

namespace hslab {

// Ordered polyline of plane points. If closed, the segment from the last
// stored point back to the first is implied; first != last in storage.
struct PathCurve {
    std::vector<Cplx> points;
    bool closed = false;

    size_t segment_count() const {
        if (points.size() < 2) return 0;
        return closed ? points.size() : points.size() - 1;
    }
    Cplx segment_start(size_t k) const { return points[k]; }
    Cplx segment_end(size_t k) const { return points[(k + 1) % points.size()]; }

    double length() const {
        double len = 0;
        for (size_t k = 0; k < segment_count(); ++k)
            len += std::abs(segment_end(k) - segment_start(k));
        return len;
    }
};

// Total argument increment of (z(t) - p) along the curve, divided by 2 pi.
// For closed curves this is the integer winding number; computed by summing
// principal argument differences segment by segment.
double winding_number(const PathCurve& curve, Cplx p);

// Distance from a point to a segment.
double point_segment_distance(Cplx p, Cplx a, Cplx b);

// Minimal distance from p to the polyline (segments, not just vertices).
double point_curve_distance(Cplx p, const PathCurve& curve);

// Resample the polyline with spacing at most `step` (keeps vertices).
std::vector<Cplx> resample(const PathCurve& curve, double step);

// True if some pair of non-adjacent segments of the curve intersects.
bool self_intersects(const PathCurve& curve, double tol = 0.0);

}  // namespace hslab
