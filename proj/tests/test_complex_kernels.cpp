#include "hslab/complex_kernels.hpp"

#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace hslab;

TEST_CASE("greens_disc at the centre is -log|z|") {
    CHECK(greens_disc(Cplx(0.5, 0.0), Cplx(0.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("greens_disc symmetry on random pairs") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> radius(0.0, 0.95), angle(0.0, 2 * M_PI);
    for (int k = 0; k < 1000; ++k) {
        Cplx z = std::polar(radius(gen), angle(gen));
        Cplx w = std::polar(radius(gen), angle(gen));
        if (std::abs(z - w) < 1e-6) continue;
        CHECK(greens_disc(z, w) == doctest::Approx(greens_disc(w, z)).epsilon(1e-12));
        CHECK(greens_disc(z, w) > 0.0);
    }
}

TEST_CASE("greens_disc matches a walk-on-spheres harmonic measure estimate") {
    // G(z,w) = -log|z-w| + E_z[log|B_tau - w|], B_tau sampled on the circle.
    Cplx z(0.3, 0.4), w(0.1, -0.2);
    double h = testsupport::walk_on_spheres_disc(
        z, [&](Cplx zeta) { return std::log(std::abs(zeta - w)); }, 1'000'000, 20240817);
    double estimate = -std::log(std::abs(z - w)) + h;
    CHECK(greens_disc(z, w) == doctest::Approx(estimate).epsilon(5e-3));
}

TEST_CASE("greens_disc domain and pole errors") {
    CHECK_THROWS_AS(greens_disc(Cplx(1.2, 0.0), Cplx(0.0)), DomainError);
    CHECK_THROWS_AS(greens_disc(Cplx(0.2, 0.0), Cplx(1.0, 0.5)), DomainError);
    CHECK_THROWS_AS(greens_disc(Cplx(0.2, 0.1), Cplx(0.2, 0.1)), PoleError);
}

TEST_CASE("poisson_disc basics") {
    for (double theta : {0.0, 1.1, 2.7, 4.5})
        CHECK(poisson_disc(Cplx(0.0), std::polar(1.0, theta)) == doctest::Approx(1.0));
    CHECK(poisson_disc(Cplx(0.5, 0.0), Cplx(1.0, 0.0)) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(poisson_disc(Cplx(0.5, 0.0), Cplx(0.9, 0.0)), DomainError);
}

TEST_CASE("poisson total mass is 2 pi") {
    for (Cplx z : {Cplx(0.5, 0.0), Cplx(-0.3, 0.62), Cplx(0.0, 0.9)}) {
        double mass = testsupport::periodic_trapezoid(
            [&](double t) { return poisson_disc(z, std::polar(1.0, t)); }, 8192);
        CHECK(mass == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
    }
}

TEST_CASE("normal derivative of the Green's function is the Poisson kernel") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> radius(0.0, 0.8), angle(0.0, 2 * M_PI);
    for (int k = 0; k < 50; ++k) {
        Cplx z = std::polar(radius(gen), angle(gen));
        Cplx zeta = std::polar(1.0, angle(gen));
        double h = 1e-6;
        // Richardson-extrapolated one-sided difference; G vanishes on the circle.
        double g1 = greens_disc(z, (1.0 - h) * zeta);
        double g2 = greens_disc(z, (1.0 - 2.0 * h) * zeta);
        double dn = (4.0 * g1 - g2) / (2.0 * h);
        CHECK(dn == doctest::Approx(poisson_disc(z, zeta)).epsilon(1e-4));
    }
}

TEST_CASE("Moebius covariance of the Green's function") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> radius(0.0, 0.9), angle(0.0, 2 * M_PI);
    for (int k = 0; k < 200; ++k) {
        DiscAutomorphism m(std::polar(radius(gen) * 0.8, angle(gen)), std::polar(1.0, angle(gen)));
        Cplx z = std::polar(radius(gen), angle(gen));
        Cplx w = std::polar(radius(gen), angle(gen));
        if (std::abs(z - w) < 1e-6) continue;
        CHECK(greens_disc(m.apply(z), m.apply(w)) ==
              doctest::Approx(greens_disc(z, w)).epsilon(1e-12));
    }
}

TEST_CASE("greens_divisor_disc is additive in the divisor") {
    WeightedDivisor d;
    d.add(SpherePoint(Cplx(0.3, 0.0)), 1.0);
    d.add(SpherePoint(Cplx(-0.3, 0.0)), 1.0);
    Cplx z(0.0, 0.5);
    CHECK(greens_divisor_disc(d, z) ==
          doctest::Approx(greens_disc(z, Cplx(0.3, 0.0)) + greens_disc(z, Cplx(-0.3, 0.0)))
              .epsilon(1e-14));

    WeightedDivisor d2;
    d2.add(SpherePoint(Cplx(0.0)), 2.0);
    CHECK(greens_divisor_disc(d2, Cplx(0.5, 0.0)) ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("conformal radius of discs") {
    CHECK(conformal_radius_disc(Cplx(0.0), 2.5, Cplx(0.0)) == doctest::Approx(2.5));
    // Off-centre disc: compose the Riemann map with a disc automorphism.
    // For B(c, r) seen from 0 (|c| < r): (r^2 - |c|^2)/r.
    CHECK(conformal_radius_disc(Cplx(0.3, 0.4), 1.0, Cplx(0.0)) ==
          doctest::Approx((1.0 - 0.25) / 1.0).epsilon(1e-12));
    CHECK(conformal_radius_disc(Cplx(0.0), 1.0, Cplx(0.99, 0.0)) ==
          doctest::Approx(0.0199).epsilon(1e-12));
    CHECK_THROWS_AS(conformal_radius_disc(Cplx(0.0), 1.0, Cplx(1.5, 0.0)), DomainError);
}

TEST_CASE("conformal radius agrees with greens_disc asymptotics") {
    // M_D(w) = lim_{z->w} (G(z,w) + log|z-w|); evaluate at |z-w| = 1e-6.
    Cplx w(0.99, 0.0);
    double g = greens_disc(w + Cplx(1e-6, 0.0), w);
    double m = g + std::log(1e-6);
    CHECK(std::exp(m) == doctest::Approx(conformal_radius_disc(Cplx(0.0), 1.0, w)).epsilon(1e-4));
}

TEST_CASE("divisor validation") {
    WeightedDivisor d;
    d.add(SpherePoint(Cplx(0.1, 0.0)), 1.0);
    CHECK_THROWS_AS(d.add(SpherePoint(Cplx(0.1, 0.0)), 2.0), ParameterError);
    CHECK_THROWS_AS(d.add(SpherePoint(Cplx(0.5, 0.0)), -1.0), ParameterError);
    WeightedDivisor dinf;
    dinf.add(SpherePoint::infinity(), 1.0);
    CHECK(dinf.contains_infinity());
    CHECK_THROWS_AS(greens_divisor_disc(dinf, Cplx(0.0)), DomainError);
}
