#pragma once

#include <optional>

#include "hslab/complex_types.hpp"
#include "hslab/path_curve.hpp"

namespace hslab {

// Finite sum of log-modulus terms R(z) = sum c_j log|z - p_j| + constant.
// Both the two-divisor potential of stationary Jordan curves and the
// four-droplet potential reduce to this form.
struct LogPotential {
    struct Atom {
        double coeff;
        Cplx point;
    };
    std::vector<Atom> atoms;
    double constant = 0.0;

    double value(Cplx z) const;
    // Real gradient as a complex number (dR/dx, dR/dy).
    Cplx gradient(Cplx z) const;
};

// Potential R(z) = sum b_j log|z-w_j|^{-1} - sum a_j log|z-z_j|^{-1} built
// from the positive-side divisor (b_j at w_j) and negative-side divisor
// (a_j at z_j). Supports must be finite and disjoint.
struct LevelPotential {
    WeightedDivisor pos;  // the b_j at finite w_j
    WeightedDivisor neg;  // the a_j at z_j

    LogPotential as_log_potential() const;
};

double potential_value(const LevelPotential& R, Cplx z);

// Four-droplet family: R(z) = a R_{x1}(z) - b R_{x2}(z) with
// R_x(z) = log|(1 - z x) / (z - x)|, x1, x2 in (-1, 1).
struct FourDropletSpec {
    double x1, x2;
    double a, b;

    FourDropletSpec(double x1_, double x2_, double a_, double b_);
    double value(Cplx z) const;
    LogPotential as_log_potential() const;
};

enum class DropletLabel { D1, D2, D3, D4, Boundary };

// Label by (sign of R, |z| vs 1); D1 = {|z|<1, R>0}, D3 its inverse image.
DropletLabel classify_four_droplet(const FourDropletSpec& spec, Cplx z);

struct LevelCurve {
    PathCurve curve;
    bool jordan = false;     // no self-crossing at tracing tolerance
    bool separates = false;  // winds around all neg atoms, none of the pos atoms
    double level = 0.0;
};

struct TraceLevelOptions {
    double step_rel = 1e-3;      // fraction of the estimated curve scale
    size_t max_steps = 20'000'000;
};

// Predictor-corrector along the rotated gradient of R on {R = level}: an
// RK4 predictor step plus one Newton correction per step. The seed gets a
// single Newton correction first and must land within 1e-6 of the level.
LevelCurve trace_level(const LogPotential& R, double level, Cplx seed,
                       const TraceLevelOptions& opts = {});
LevelCurve trace_level(const LevelPotential& R, double level, Cplx seed,
                       const TraceLevelOptions& opts = {});

// log(1 - |center|^2 / radius^2): the reduced energy of the circle
// |z - center| = radius with d = 1*0 inside and d* = 1*infinity outside.
double reduced_energy_circle_pair(Cplx center, double radius);

// Reduced Green's energy of (domain, d) for a Moebius image of the unit
// disc: pulls the divisor back and applies the conformal covariance
// correction sum a_j^2 log|m'(x_j)|.
double reduced_energy_general(const MoebiusMap& domain_map, const WeightedDivisor& d);

// Circle as a curve: the closed-form Poisson-kernel domain for the
// variational quadratures.
struct Circle {
    Cplx center;
    double radius;
};

// Fit a circle to a polyline; UnsupportedDomainError when the curve is not
// a circle within 1e-6 relative deviation.
Circle fit_circle(const PathCurve& curve);

// Competitive Hele-Shaw variation of the reduced energy along the circle:
// (1/2pi) oint (sum aP + sum bQ)(sum aP - sum bQ)^2 |dzeta| >= 0,
// zero exactly at stationary configurations. d lives in the bounded side,
// d* in the unbounded side (infinity allowed in d*).
double hadamard_gradient_quadrature(const Circle& curve, const WeightedDivisor& d,
                                    const WeightedDivisor& dstar);
double hadamard_gradient_quadrature(const PathCurve& curve, const WeightedDivisor& d,
                                    const WeightedDivisor& dstar);

// (area variation, perimeter variation) of the circle under the competitive
// Hele-Shaw vector field; area variation equals 2 pi (|d| - |d*|).
std::pair<double, double> area_perimeter_variation(const Circle& curve, const WeightedDivisor& d,
                                                   const WeightedDivisor& dstar);
std::pair<double, double> area_perimeter_variation(const PathCurve& curve,
                                                   const WeightedDivisor& d,
                                                   const WeightedDivisor& dstar);

// Welding homeomorphism h(z) = rotation * prod ((z - x_j)/(1 - conj(x_j) z))^{a_j}
// of a stationary Jordan curve with d* = 1*infinity.
struct WeldingMap {
    struct Anchor {
        Cplx x;
        double weight;
    };
    std::vector<Anchor> anchors;
    Cplx rotation{1.0};
    bool is_homeomorphism = false;
    int degree = 0;

    WeldingMap(std::vector<Anchor> anchors_, Cplx rotation_);
};

// Evaluate h(e^{i theta}) with a continuous branch of each factor's argument
// continued from theta = 0.
Cplx welding_evaluate(const WeldingMap& w, double theta);

// d(arg h)/d theta = sum a_j P(x_j, e^{i theta}); positive, hence monotone.
double welding_arg_derivative(const WeldingMap& w, double theta);

}  // namespace hslab
