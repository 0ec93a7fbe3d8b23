#pragma once

#include "hslab/complex_types.hpp"

namespace hslab {

// Green's function of the unit disc, G(z,w) = log|(1 - z conj(w)) / (z - w)|.
// Strictly positive and symmetric on {|z|<1, |w|<1, z != w}.
double greens_disc(Cplx z, Cplx w);

// Poisson kernel of the unit disc, P(z,zeta) = (1-|z|^2)/|z-zeta|^2 for |zeta|=1.
// Convention without the 1/(2 pi): integrating over |dzeta| gives 2 pi.
double poisson_disc(Cplx z, Cplx zeta);

// Sum of a_k G(z, z_k) over the atoms of d. All atoms must be finite and in
// the open disc.
double greens_divisor_disc(const WeightedDivisor& d, Cplx z);

// Conformal radius of the disc B(center, radius) seen from `at`:
// (radius^2 - |at-center|^2) / radius. The reduced modulus is its log.
double conformal_radius_disc(Cplx center, double radius, Cplx at);

// d/dz of G(.,w) in the unit disc: -(1/2) (1/(z-w) + conj(w)/(1 - z conj(w))).
Cplx greens_disc_dz(Cplx z, Cplx w);

}  // namespace hslab
