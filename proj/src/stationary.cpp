#include "hslab/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "hslab/complex_kernels.hpp"

namespace hslab {

double LogPotential::value(Cplx z) const {
    double s = constant;
    for (const auto& a : atoms) {
        double r = std::abs(z - a.point);
        if (r == 0.0) throw PoleError("potential evaluated at a support point");
        s += a.coeff * std::log(r);
    }
    return s;
}

Cplx LogPotential::gradient(Cplx z) const {
    Cplx g = 0.0;
    for (const auto& a : atoms) {
        Cplx d = z - a.point;
        if (std::abs(d) == 0.0) throw PoleError("potential gradient at a support point");
        g += a.coeff / std::conj(d);
    }
    return g;
}

LogPotential LevelPotential::as_log_potential() const {
    LogPotential R;
    for (const auto& a : pos.atoms) {
        if (a.point.is_infinity()) continue;  // log term of infinity is absent
        R.atoms.push_back({-a.weight, a.point.value()});
    }
    for (const auto& a : neg.atoms) {
        if (a.point.is_infinity())
            throw ParameterError("negative-side divisor must have finite support");
        R.atoms.push_back({a.weight, a.point.value()});
    }
    return R;
}

double potential_value(const LevelPotential& R, Cplx z) {
    return R.as_log_potential().value(z);
}

FourDropletSpec::FourDropletSpec(double x1_, double x2_, double a_, double b_)
    : x1(x1_), x2(x2_), a(a_), b(b_) {
    if (!(std::abs(x1) < 1.0) || !(std::abs(x2) < 1.0))
        throw ParameterError("x1, x2 must lie in (-1, 1)");
    if (x1 == x2) throw ParameterError("x1 and x2 must differ");
    if (!(a > 0) || !(b > 0)) throw ParameterError("weights must be positive");
}

namespace {

double r_x(double x, Cplx z) { return std::log(std::abs((1.0 - z * x) / (z - x))); }

}  // namespace

double FourDropletSpec::value(Cplx z) const { return a * r_x(x1, z) - b * r_x(x2, z); }

LogPotential FourDropletSpec::as_log_potential() const {
    // log|1 - z x| = log|x| + log|z - 1/x| for x != 0.
    LogPotential R;
    auto add = [&R](double coeff, double x) {
        if (x == 0.0) {
            R.atoms.push_back({-coeff, Cplx(0.0)});
            return;
        }
        R.atoms.push_back({coeff, Cplx(1.0 / x)});
        R.atoms.push_back({-coeff, Cplx(x)});
        R.constant += coeff * std::log(std::abs(x));
    };
    add(a, x1);
    add(-b, x2);
    return R;
}

DropletLabel classify_four_droplet(const FourDropletSpec& spec, Cplx z) {
    for (Cplx p : {Cplx(spec.x1), Cplx(spec.x2), Cplx(1.0 / spec.x1), Cplx(1.0 / spec.x2)})
        if (std::abs(z - p) < kBoundaryTol) throw PoleError("four-droplet pole point");
    double r = spec.value(z);
    double mod = std::abs(z);
    if (std::abs(r) <= kBoundaryTol || std::abs(mod - 1.0) <= kBoundaryTol)
        return DropletLabel::Boundary;
    if (mod < 1.0) return r > 0 ? DropletLabel::D1 : DropletLabel::D2;
    return r < 0 ? DropletLabel::D3 : DropletLabel::D4;
}

LevelCurve trace_level(const LogPotential& R, double level, Cplx seed,
                       const TraceLevelOptions& opts) {
    const double kGradFloor = 1e-10;

    auto newton = [&](Cplx z) {
        Cplx g = R.gradient(z);
        double gn = std::norm(g);
        if (std::sqrt(gn) < kGradFloor) throw CriticalLevelError("level passes through a saddle");
        return z - (R.value(z) - level) * g / gn;
    };

    Cplx z = newton(seed);
    if (std::abs(R.value(z) - level) >= 1e-6)
        throw SeedError("seed does not reach the level after one Newton correction");
    for (int k = 0; k < 5 && std::abs(R.value(z) - level) > 1e-13 * (1.0 + std::abs(level)); ++k)
        z = newton(z);

    double scale = 1e300;
    for (const auto& a : R.atoms) scale = std::min(scale, std::abs(z - a.point));
    double h = opts.step_rel * 2.0 * M_PI * scale;

    // The rotated gradient is a line field: its sign reverses across level
    // crossings (saddles), so the orientation is carried along the trace and
    // the curve continues straight through junctions.
    auto tangent = [&](Cplx p, Cplx ref) {
        Cplx g = R.gradient(p);
        double gn = std::abs(g);
        if (gn < kGradFloor) throw CriticalLevelError("level passes through a saddle");
        Cplx t = Cplx(0, 1) * g / gn;
        if (std::real(t * std::conj(ref)) < 0.0) t = -t;
        return t;
    };

    LevelCurve out;
    out.level = level;
    out.curve.points.push_back(z);
    Cplx dir0 = tangent(z, R.gradient(z) * Cplx(0, 1));
    Cplx dir = dir0;
    const Cplx start = z;
    double arclen = 0.0;

    for (size_t step = 0; step < opts.max_steps; ++step) {
        // RK4 predictor along the rotated gradient, one Newton corrector.
        Cplx k1 = tangent(z, dir);
        Cplx k2 = tangent(z + 0.5 * h * k1, k1);
        Cplx k3 = tangent(z + 0.5 * h * k2, k2);
        Cplx k4 = tangent(z + h * k3, k3);
        Cplx zn = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        zn = newton(zn);
        arclen += std::abs(zn - z);
        dir = tangent(zn, dir);
        z = zn;
        out.curve.points.push_back(z);

        if (arclen > 10.0 * h && std::abs(z - start) < h &&
            std::abs(std::arg(dir / dir0)) < 0.05) {
            out.curve.points.pop_back();
            out.curve.closed = true;
            break;
        }
    }
    if (!out.curve.closed) throw StepError("level trace failed to close within the step budget");

    out.jordan = !self_intersects(out.curve);
    // Separation: winding +-1 around every positive-coefficient atom (the
    // neg divisor side), 0 around every negative-coefficient atom.
    bool sep = true;
    std::optional<int> sign;
    for (const auto& a : R.atoms) {
        double w = winding_number(out.curve, a.point);
        long iw = std::lround(w);
        if (std::abs(w - double(iw)) > 0.1) {
            sep = false;
            break;
        }
        if (a.coeff > 0) {
            if (iw == 0) sep = false;
            if (sign && iw != *sign) sep = false;
            if (!sign && iw != 0) sign = int(iw);
        } else {
            if (iw != 0) sep = false;
        }
        if (!sep) break;
    }
    out.separates = sep;
    return out;
}

LevelCurve trace_level(const LevelPotential& R, double level, Cplx seed,
                       const TraceLevelOptions& opts) {
    return trace_level(R.as_log_potential(), level, seed, opts);
}

double reduced_energy_circle_pair(Cplx center, double radius) {
    if (!(radius > 0)) throw ParameterError("radius must be positive");
    if (std::abs(center) >= radius) throw DomainError("0 must lie inside the circle");
    return std::log(1.0 - std::norm(center) / (radius * radius));
}

double reduced_energy_general(const MoebiusMap& domain_map, const WeightedDivisor& d) {
    if (std::abs(domain_map.det()) == 0.0) throw UnsupportedDomainError("singular domain map");
    MoebiusMap inv = domain_map.inverse();
    std::vector<Cplx> pulled;
    std::vector<double> weights;
    for (const auto& a : d.atoms) {
        if (a.point.is_infinity())
            throw UnsupportedDomainError("divisor at infinity: use reduced_energy_circle_pair");
        Cplx x = inv.apply(a.point.value());
        if (std::abs(x) >= 1.0) throw DomainError("divisor point outside the domain");
        pulled.push_back(x);
        weights.push_back(a.weight);
    }
    double energy = 0.0;
    for (size_t j = 0; j < pulled.size(); ++j) {
        for (size_t k = 0; k < pulled.size(); ++k)
            if (j != k) energy += weights[j] * weights[k] * greens_disc(pulled[j], pulled[k]);
        double radius = 1.0 - std::norm(pulled[j]);  // conformal radius of the disc at x
        energy += weights[j] * weights[j] *
                  (std::log(radius) + std::log(std::abs(domain_map.deriv(pulled[j]))));
    }
    return energy;
}

Circle fit_circle(const PathCurve& curve) {
    if (curve.points.empty()) throw EmptyCurveError("empty curve");
    Cplx c = 0.0;
    for (const auto& p : curve.points) c += p;
    c /= double(curve.points.size());
    double r = 0.0;
    for (const auto& p : curve.points) r += std::abs(p - c);
    r /= double(curve.points.size());
    for (const auto& p : curve.points)
        if (std::abs(std::abs(p - c) - r) > 1e-6 * r)
            throw UnsupportedDomainError("curve is not a circle");
    return Circle{c, r};
}

namespace {

// Poisson kernel of the disc B(c, r) at interior z, boundary zeta.
double poisson_inside(const Circle& circle, Cplx z, Cplx zeta) {
    return (circle.radius * circle.radius - std::norm(z - circle.center)) /
           (circle.radius * std::norm(z - zeta));
}

// Poisson kernel of the exterior of B(c, r) at z (finite or infinity).
double poisson_outside(const Circle& circle, const SpherePoint& z, Cplx zeta) {
    if (z.is_infinity()) return 1.0 / circle.radius;
    return (std::norm(z.value() - circle.center) - circle.radius * circle.radius) /
           (circle.radius * std::norm(z.value() - zeta));
}

void check_sides(const Circle& circle, const WeightedDivisor& d, const WeightedDivisor& dstar) {
    for (const auto& a : d.atoms) {
        if (a.point.is_infinity()) throw DomainError("bounded-side divisor cannot contain infinity");
        if (std::abs(a.point.value() - circle.center) >= circle.radius)
            throw DomainError("divisor point not in the bounded side");
    }
    for (const auto& a : dstar.atoms) {
        if (a.point.is_infinity()) continue;
        if (std::abs(a.point.value() - circle.center) <= circle.radius)
            throw DomainError("dual divisor point not in the unbounded side");
    }
}

}  // namespace

double hadamard_gradient_quadrature(const Circle& circle, const WeightedDivisor& d,
                                    const WeightedDivisor& dstar) {
    check_sides(circle, d, dstar);
    const int kNodes = 4096;
    double acc = 0.0;
    for (int j = 0; j < kNodes; ++j) {
        double theta = 2.0 * M_PI * j / kNodes;
        Cplx zeta = circle.center + std::polar(circle.radius, theta);
        double A = 0.0, B = 0.0;
        for (const auto& a : d.atoms) A += a.weight * poisson_inside(circle, a.point.value(), zeta);
        for (const auto& a : dstar.atoms) B += a.weight * poisson_outside(circle, a.point, zeta);
        acc += (A + B) * (A - B) * (A - B);
    }
    // |dzeta| = r dtheta; the 1/2pi cancels the dtheta weight up to r.
    return acc * circle.radius / kNodes;
}

double hadamard_gradient_quadrature(const PathCurve& curve, const WeightedDivisor& d,
                                    const WeightedDivisor& dstar) {
    return hadamard_gradient_quadrature(fit_circle(curve), d, dstar);
}

std::pair<double, double> area_perimeter_variation(const Circle& circle, const WeightedDivisor& d,
                                                   const WeightedDivisor& dstar) {
    check_sides(circle, d, dstar);
    const int kNodes = 4096;
    double area = 0.0, perim = 0.0;
    const double curvature = 1.0 / circle.radius;
    for (int j = 0; j < kNodes; ++j) {
        double theta = 2.0 * M_PI * j / kNodes;
        Cplx zeta = circle.center + std::polar(circle.radius, theta);
        double A = 0.0, B = 0.0;
        for (const auto& a : d.atoms) A += a.weight * poisson_inside(circle, a.point.value(), zeta);
        for (const auto& a : dstar.atoms) B += a.weight * poisson_outside(circle, a.point, zeta);
        area += (A - B);
        perim += curvature * (A - B);
    }
    double scale = 2.0 * M_PI * circle.radius / kNodes;
    return {area * scale, perim * scale};
}

std::pair<double, double> area_perimeter_variation(const PathCurve& curve,
                                                   const WeightedDivisor& d,
                                                   const WeightedDivisor& dstar) {
    return area_perimeter_variation(fit_circle(curve), d, dstar);
}

WeldingMap::WeldingMap(std::vector<Anchor> anchors_, Cplx rotation_)
    : anchors(std::move(anchors_)), rotation(rotation_) {
    double total = 0.0;
    for (const auto& a : anchors) {
        if (std::abs(a.x) >= 1.0) throw BranchError("welding anchor must satisfy |x| < 1");
        if (!(a.weight > 0)) throw ParameterError("welding weights must be positive");
        total += a.weight;
    }
    if (std::abs(std::abs(rotation) - 1.0) > kBoundaryTol)
        throw ParameterError("rotation must have unit modulus");
    double nearest = std::round(total);
    if (std::abs(total - nearest) > 1e-9 || nearest < 1.0)
        throw ParameterError("anchor weights must sum to a positive integer");
    degree = int(nearest);
    is_homeomorphism = (degree == 1);
}

double welding_arg_derivative(const WeldingMap& w, double theta) {
    Cplx zeta = std::polar(1.0, theta);
    double s = 0.0;
    for (const auto& a : w.anchors) s += a.weight * poisson_disc(a.x, zeta);
    return s;
}

Cplx welding_evaluate(const WeldingMap& w, double theta) {
    // Continuous argument of each Moebius factor, continued from theta = 0 in
    // increments small enough that principal differences never wrap.
    double max_p = 0.0;
    for (const auto& a : w.anchors) max_p += (1.0 + std::abs(a.x)) / (1.0 - std::abs(a.x));
    int n = std::max(1, int(std::ceil(std::abs(theta) * max_p / 2.0)));

    double psi = 0.0;
    std::vector<double> prev_args(w.anchors.size());
    for (size_t j = 0; j < w.anchors.size(); ++j) {
        Cplx m = (Cplx(1.0) - w.anchors[j].x) / (1.0 - std::conj(w.anchors[j].x));
        prev_args[j] = std::arg(m);
        psi += w.anchors[j].weight * prev_args[j];
    }
    for (int i = 1; i <= n; ++i) {
        double t = theta * double(i) / n;
        Cplx zeta = std::polar(1.0, t);
        for (size_t j = 0; j < w.anchors.size(); ++j) {
            Cplx m = (zeta - w.anchors[j].x) / (1.0 - std::conj(w.anchors[j].x) * zeta);
            double arg = std::arg(m);
            double d = std::remainder(arg - prev_args[j], 2.0 * M_PI);
            psi += w.anchors[j].weight * d;
            prev_args[j] = prev_args[j] + d;
        }
    }
    return w.rotation * std::polar(1.0, psi);
}

}  // namespace hslab
