#include "hslab/complex_kernels.hpp"

#include <cmath>

namespace hslab {

double greens_disc(Cplx z, Cplx w) {
    if (std::abs(z) >= 1.0 || std::abs(w) >= 1.0)
        throw DomainError("greens_disc arguments must lie in the open unit disc");
    if (z == w) throw PoleError("greens_disc pole: z == w");
    return std::log(std::abs((1.0 - z * std::conj(w)) / (z - w)));
}

double poisson_disc(Cplx z, Cplx zeta) {
    if (std::abs(z) >= 1.0) throw DomainError("poisson_disc interior point must satisfy |z| < 1");
    if (std::abs(std::abs(zeta) - 1.0) > kBoundaryTol)
        throw DomainError("poisson_disc boundary point must satisfy |zeta| = 1");
    double den = std::norm(z - zeta);
    return (1.0 - std::norm(z)) / den;
}

double greens_divisor_disc(const WeightedDivisor& d, Cplx z) {
    double s = 0.0;
    for (const auto& a : d.atoms) {
        if (a.point.is_infinity())
            throw DomainError("greens_divisor_disc requires a finite divisor");
        s += a.weight * greens_disc(z, a.point.value());
    }
    return s;
}

double conformal_radius_disc(Cplx center, double radius, Cplx at) {
    if (!(radius > 0)) throw ParameterError("radius must be positive");
    double r2 = std::norm(at - center);
    if (r2 >= radius * radius) throw DomainError("evaluation point outside the disc");
    return (radius * radius - r2) / radius;
}

Cplx greens_disc_dz(Cplx z, Cplx w) {
    if (std::abs(z) >= 1.0 || std::abs(w) >= 1.0)
        throw DomainError("greens_disc_dz arguments must lie in the open unit disc");
    if (z == w) throw PoleError("greens_disc_dz pole: z == w");
    return -0.5 * (1.0 / (z - w) + std::conj(w) / (1.0 - z * std::conj(w)));
}

}  // namespace hslab
