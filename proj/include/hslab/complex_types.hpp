#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "hslab/errors.hpp"

namespace hslab {

using Cplx = std::complex<double>;

// One declared tolerance for "is this point on the boundary" questions.
inline constexpr double kBoundaryTol = 1e-12;

// A point of the Riemann sphere. Infinity is a tagged case, never an IEEE
// infinity smuggled into coordinates; sphere operations convert via z -> 1/z.
class SpherePoint {
public:
    SpherePoint() : z_(0.0, 0.0), inf_(false) {}
    SpherePoint(Cplx z) : z_(z), inf_(false) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ParameterError("finite coordinates required; use SpherePoint::infinity()");
    }
    static SpherePoint infinity() {
        SpherePoint p;
        p.inf_ = true;
        return p;
    }
    bool is_infinity() const { return inf_; }
    Cplx value() const {
        if (inf_) throw DomainError("finite value requested for the point at infinity");
        return z_;
    }
    bool operator==(const SpherePoint& o) const {
        return inf_ == o.inf_ && (inf_ || z_ == o.z_);
    }

private:
    Cplx z_;
    bool inf_;
};

// Positive divisor d = sum a_j z_j: finite list of distinct points with
// positive weights. Points may be the tagged infinity.
struct WeightedDivisor {
    struct Atom {
        SpherePoint point;
        double weight;
    };
    std::vector<Atom> atoms;

    WeightedDivisor() = default;
    WeightedDivisor(std::initializer_list<Atom> list) : atoms(list) { validate(); }

    void add(SpherePoint p, double w) {
        atoms.push_back({p, w});
        validate();
    }
    double total_weight() const {
        double s = 0;
        for (const auto& a : atoms) s += a.weight;
        return s;
    }
    bool contains_infinity() const {
        for (const auto& a : atoms)
            if (a.point.is_infinity()) return true;
        return false;
    }
    void validate() const {
        for (size_t j = 0; j < atoms.size(); ++j) {
            if (!(atoms[j].weight > 0)) throw ParameterError("divisor weights must be positive");
            for (size_t k = j + 1; k < atoms.size(); ++k)
                if (atoms[j].point == atoms[k].point)
                    throw ParameterError("divisor points must be pairwise distinct");
        }
    }
};

// Moebius transform z -> (a z + b) / (c z + d), det != 0.
struct MoebiusMap {
    Cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    Cplx det() const { return a * d - b * c; }

    Cplx apply(Cplx z) const {
        Cplx den = c * z + d;
        if (std::abs(den) == 0.0) throw PoleError("Moebius map pole");
        return (a * z + b) / den;
    }
    // Derivative of the map at z.
    Cplx deriv(Cplx z) const {
        Cplx den = c * z + d;
        if (std::abs(den) == 0.0) throw PoleError("Moebius map pole");
        return det() / (den * den);
    }
    MoebiusMap inverse() const {
        if (std::abs(det()) == 0.0) throw UnsupportedDomainError("singular Moebius map");
        return MoebiusMap{d, -b, -c, a};
    }
    MoebiusMap compose(const MoebiusMap& o) const {  // this after o
        return MoebiusMap{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    SpherePoint apply_sphere(const SpherePoint& p) const {
        if (p.is_infinity()) {
            if (std::abs(c) == 0.0) return SpherePoint::infinity();
            return SpherePoint(a / c);
        }
        Cplx den = c * p.value() + d;
        if (std::abs(den) == 0.0) return SpherePoint::infinity();
        return SpherePoint((a * p.value() + b) / den);
    }

    static MoebiusMap identity() { return MoebiusMap{}; }
    static MoebiusMap affine(Cplx scale, Cplx shift) { return MoebiusMap{scale, shift, 0.0, 1.0}; }
};

// Automorphism of the unit disc: z -> rotation * (z - x) / (1 - conj(x) z).
struct DiscAutomorphism {
    Cplx x{0.0};         // the point sent to 0, |x| < 1
    Cplx rotation{1.0};  // unit modulus

    DiscAutomorphism() = default;
    DiscAutomorphism(Cplx fixed, Cplx rot) : x(fixed), rotation(rot) {
        if (std::abs(x) >= 1.0) throw ParameterError("disc automorphism parameter must satisfy |x| < 1");
        if (std::abs(std::abs(rotation) - 1.0) > kBoundaryTol)
            throw ParameterError("rotation must have unit modulus");
    }

    Cplx apply(Cplx z) const { return rotation * (z - x) / (1.0 - std::conj(x) * z); }

    MoebiusMap as_moebius() const {
        return MoebiusMap{rotation, -rotation * x, -std::conj(x), 1.0};
    }
};

}  // namespace hslab
