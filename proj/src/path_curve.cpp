#include "hslab/path_curve.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace hslab {

double winding_number(const PathCurve& curve, Cplx p) {
    double total = 0.0;
    for (size_t k = 0; k < curve.segment_count(); ++k) {
        Cplx u = curve.segment_start(k) - p;
        Cplx v = curve.segment_end(k) - p;
        total += std::arg(v / u);
    }
    return total / (2.0 * M_PI);
}

double point_segment_distance(Cplx p, Cplx a, Cplx b) {
    Cplx ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

double point_curve_distance(Cplx p, const PathCurve& curve) {
    if (curve.points.empty()) throw EmptyCurveError("empty curve");
    if (curve.points.size() == 1) return std::abs(p - curve.points[0]);
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < curve.segment_count(); ++k)
        best = std::min(best, point_segment_distance(p, curve.segment_start(k), curve.segment_end(k)));
    return best;
}

std::vector<Cplx> resample(const PathCurve& curve, double step) {
    std::vector<Cplx> out;
    if (curve.points.empty()) return out;
    for (size_t k = 0; k < curve.segment_count(); ++k) {
        Cplx a = curve.segment_start(k), b = curve.segment_end(k);
        double len = std::abs(b - a);
        int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * (double(i) / n));
    }
    if (!curve.closed) out.push_back(curve.points.back());
    else if (out.empty()) out.push_back(curve.points.front());
    return out;
}

namespace {

bool segments_cross(Cplx a, Cplx b, Cplx c, Cplx d, double tol) {
    auto orient = [](Cplx p, Cplx q, Cplx r) {
        return (q - p).real() * (r - p).imag() - (q - p).imag() * (r - p).real();
    };
    double o1 = orient(a, b, c), o2 = orient(a, b, d);
    double o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol)) &&
        ((o3 > tol && o4 < -tol) || (o3 < -tol && o4 > tol)))
        return true;
    return false;
}

}  // namespace

bool self_intersects(const PathCurve& curve, double tol) {
    size_t n = curve.segment_count();
    if (n < 3) return false;
    // Grid hashing keeps this near-linear for long traces.
    double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300, maxlen = 0;
    for (size_t k = 0; k < n; ++k) {
        Cplx a = curve.segment_start(k), b = curve.segment_end(k);
        minx = std::min({minx, a.real(), b.real()});
        maxx = std::max({maxx, a.real(), b.real()});
        miny = std::min({miny, a.imag(), b.imag()});
        maxy = std::max({maxy, a.imag(), b.imag()});
        maxlen = std::max(maxlen, std::abs(b - a));
    }
    double cell = std::max(maxlen, 1e-12);
    auto key = [&](int ix, int iy) { return (long long)ix * 2000003LL + iy; };
    std::unordered_map<long long, std::vector<size_t>> grid;
    auto cells_of = [&](size_t k, auto&& fn) {
        Cplx a = curve.segment_start(k), b = curve.segment_end(k);
        int x0 = (int)std::floor((std::min(a.real(), b.real()) - minx) / cell);
        int x1 = (int)std::floor((std::max(a.real(), b.real()) - minx) / cell);
        int y0 = (int)std::floor((std::min(a.imag(), b.imag()) - miny) / cell);
        int y1 = (int)std::floor((std::max(a.imag(), b.imag()) - miny) / cell);
        for (int ix = x0; ix <= x1; ++ix)
            for (int iy = y0; iy <= y1; ++iy) fn(key(ix, iy));
    };
    for (size_t k = 0; k < n; ++k) cells_of(k, [&](long long h) { grid[h].push_back(k); });
    size_t last = n - 1;
    for (auto& [h, segs] : grid) {
        for (size_t i = 0; i < segs.size(); ++i)
            for (size_t j = i + 1; j < segs.size(); ++j) {
                size_t p = segs[i], q = segs[j];
                if (p > q) std::swap(p, q);
                bool adjacent = (q == p + 1) || (curve.closed && p == 0 && q == last);
                if (adjacent) continue;
                if (segments_cross(curve.segment_start(p), curve.segment_end(p),
                                   curve.segment_start(q), curve.segment_end(q), tol))
                    return true;
            }
    }
    return false;
}

}  // namespace hslab
