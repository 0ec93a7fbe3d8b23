#pragma once

// Shared test oracles. Everything here is an independent route to the values
// under test: quadratures, Monte Carlo estimators, and brute-force scans that
// never call the implementation path they check.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "hslab/path_curve.hpp"
#include "hslab/quad_diff.hpp"

namespace testsupport {

using hslab::Cplx;

// Harmonic measure sampling by walk-on-spheres in the unit disc: from z,
// jump uniformly on the largest inscribed circle until within eps of the
// boundary, then project. Returns E[f(boundary point)].
inline double walk_on_spheres_disc(Cplx z, const std::function<double(Cplx)>& f, int samples,
                                   uint64_t seed, double eps = 1e-9) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    double acc = 0.0;
    for (int s = 0; s < samples; ++s) {
        Cplx p = z;
        while (1.0 - std::abs(p) > eps) {
            double r = 1.0 - std::abs(p);
            p += std::polar(r, angle(gen));
        }
        acc += f(p / std::abs(p));
    }
    return acc / samples;
}

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2048) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int k = 1; k < n; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Periodic trapezoid over [0, 2 pi): spectrally accurate for smooth
// periodic integrands.
inline double periodic_trapezoid(const std::function<double(double)>& f, int n = 4096) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += f(2.0 * M_PI * k / n);
    return acc * 2.0 * M_PI / n;
}

// |Re int sqrt(phi)| accumulated along a polyline by per-segment
// Gauss-Legendre with branch continuation; independent of the tracer's
// internal level-set bookkeeping. Returns the maximum drift over the curve.
inline double max_level_drift(const hslab::QuadDiff& qd, const hslab::PathCurve& curve) {
    static const double X[5] = {0.04691007703066800, 0.23076534494715845, 0.5,
                                0.76923465505284155, 0.95308992296933200};
    static const double W[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                0.23931433524968324, 0.11846344252809454};
    Cplx psi = 0.0;
    double worst = 0.0;
    Cplx prev;
    bool have_prev = false;
    for (size_t k = 0; k < curve.segment_count(); ++k) {
        Cplx a = curve.segment_start(k), b = curve.segment_end(k);
        Cplx dz = b - a;
        for (int i = 0; i < 5; ++i) {
            Cplx w = std::sqrt(qd.eval(a + X[i] * dz));
            if (have_prev && std::real(w * std::conj(prev)) < 0.0) w = -w;
            prev = w;
            have_prev = true;
            psi += W[i] * w * dz;
        }
        worst = std::max(worst, std::abs(psi.real()));
    }
    return worst;
}

// Dense point-sample Hausdorff (point-to-point), the brute-force oracle.
inline double brute_hausdorff(const std::vector<Cplx>& a, const std::vector<Cplx>& b) {
    auto directed = [](const std::vector<Cplx>& from, const std::vector<Cplx>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = 1e300;
            for (const auto& q : to) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

inline std::vector<Cplx> sample_circle(Cplx center, double radius, int n) {
    std::vector<Cplx> out(n);
    for (int k = 0; k < n; ++k) out[k] = center + std::polar(radius, 2.0 * M_PI * k / n);
    return out;
}

}  // namespace testsupport
