#include "hslab/quad_diff.hpp"

#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace hslab;

TEST_CASE("three-source numerators follow the closed form") {
    QuadDiff qd = build_three_source(2.0, 1.0, 0.0);
    // 4 - 3z over 4 z^2 (z-1)^2.
    REQUIRE(qd.numerator().degree() == 1);
    CHECK(qd.numerator().coeffs()[0] == Cplx(4.0));
    CHECK(qd.numerator().coeffs()[1] == Cplx(-3.0));
    CHECK(qd.factor() == doctest::Approx(0.25));

    QuadDiff flat = build_three_source(1.0, 1.0, 0.0);
    CHECK(flat.numerator().degree() == 0);
    CHECK(flat.numerator().coeffs()[0] == Cplx(1.0));

    QuadDiff slit = build_three_source(1.0, 0.0, 0.0);
    REQUIRE(slit.numerator().degree() == 1);
    CHECK(slit.numerator().coeffs()[0] == Cplx(1.0));
    CHECK(slit.numerator().coeffs()[1] == Cplx(-1.0));

    CHECK_THROWS_AS(build_three_source(0.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("finite critical points") {
    auto cps = finite_critical_points(build_three_source(2.0, 1.0, 0.0));
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].location.real() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(cps[0].location.imag()) < 1e-14);
    CHECK(cps[0].order == 1);

    CHECK(finite_critical_points(build_three_source(1.0, 1.0, 0.0)).empty());

    // Weight 0 at z = 1 degenerates the double pole to a simple pole.
    auto slit = finite_critical_points(build_three_source(1.0, 0.0, 0.0));
    REQUIRE(slit.size() == 1);
    CHECK(slit[0].location == Cplx(1.0));
    CHECK(slit[0].order == -1);

    // Roots of z^2 - z + 1, verified by back-substitution.
    QuadDiff qd = build_three_source(1.0, 1.0, 1.0);
    auto both = finite_critical_points(qd);
    REQUIRE(both.size() == 2);
    for (const auto& cp : both) {
        CHECK(std::abs(qd.numerator().eval(cp.location)) < 1e-12);
        CHECK(std::abs(cp.location - Cplx(0.5, std::copysign(std::sqrt(3.0) / 2.0,
                                                             cp.location.imag()))) < 1e-12);
    }
}

TEST_CASE("sqrt residues at the poles") {
    QuadDiff qd = build_three_source(2.0, 1.0, 0.0);
    CHECK(residue_sqrt(qd, SpherePoint(Cplx(0.0))) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(residue_sqrt(qd, SpherePoint(Cplx(1.0))) == doctest::Approx(0.5).epsilon(1e-10));
    QuadDiff big = build_three_source(3.0, 4.0, 5.0);
    CHECK(residue_sqrt(big, SpherePoint::infinity()) == doctest::Approx(2.5).epsilon(1e-10));
    CHECK_THROWS_AS(residue_sqrt(qd, SpherePoint(Cplx(0.5))), ParameterError);
    // The degenerate pole of (1,0,0) is simple: not a double pole.
    CHECK_THROWS_AS(residue_sqrt(build_three_source(1.0, 0.0, 0.0), SpherePoint(Cplx(1.0))),
                    ParameterError);
}

TEST_CASE("the real ray [4/3, inf) is a vertical trajectory") {
    QuadDiff qd = build_three_source(2.0, 1.0, 0.0);
    TraceResult tr = trace_vertical(qd, Cplx(4.0 / 3.0), Cplx(1.0), 1e-3, 50.0);
    CHECK(tr.end == TraceEnd::Escaped);
    for (const auto& p : tr.path.points) {
        CHECK(std::abs(p.imag()) < 1e-9);
        CHECK(p.real() >= 4.0 / 3.0 - 1e-12);
    }
}

TEST_CASE("the upper branch closes around z = 1") {
    QuadDiff qd = build_three_source(2.0, 1.0, 0.0);
    Cplx dir = std::polar(1.0, 2.0 * M_PI / 3.0);
    TraceResult tr = trace_vertical(qd, Cplx(4.0 / 3.0), dir, 1e-3, 50.0);
    REQUIRE(tr.end == TraceEnd::HitCriticalPoint);
    CHECK(tr.path.closed);
    double w1 = winding_number(tr.path, Cplx(1.0));
    double w0 = winding_number(tr.path, Cplx(0.0));
    CHECK(std::abs(std::abs(w1) - 1.0) < 1e-6);
    CHECK(std::abs(w0) < 1e-6);

    // Conjugation symmetry against the lower branch.
    TraceResult lower = trace_vertical(qd, Cplx(4.0 / 3.0), std::conj(dir), 1e-3, 50.0);
    PathCurve mirrored;
    mirrored.closed = lower.path.closed;
    for (const auto& p : lower.path.points) mirrored.points.push_back(std::conj(p));
    double worst = 0.0;
    for (const auto& p : tr.path.points)
        worst = std::max(worst, point_curve_distance(p, mirrored));
    for (const auto& p : mirrored.points)
        worst = std::max(worst, point_curve_distance(p, tr.path));
    CHECK(worst < 1e-6);
}

TEST_CASE("equal weights give the straight interface Re z = 1/2") {
    QuadDiff qd = build_three_source(1.0, 1.0, 0.0);
    TraceResult tr = trace_vertical(qd, Cplx(0.5, 0.0), Cplx(0.0, 1.0), 1e-3, 20.0);
    for (const auto& p : tr.path.points) CHECK(std::abs(p.real() - 0.5) < 1e-8);
    // The escape radius (20 for these poles) and max_arclen coincide here.
    CHECK(tr.arclength >= 19.9);
    CHECK((tr.end == TraceEnd::MaxLength || tr.end == TraceEnd::Escaped));
}

TEST_CASE("trace preconditions") {
    QuadDiff qd = build_three_source(2.0, 1.0, 0.0);
    CHECK_THROWS_AS(trace_vertical(qd, Cplx(0.0), Cplx(1.0), 1e-3, 10.0), SingularStartError);
    // At a regular point the direction must be vertical within 0.1 rad.
    CHECK_THROWS_AS(trace_vertical(qd, Cplx(0.5, 0.5), Cplx(1.0), 1e-3, 10.0), ParameterError);
}

TEST_CASE("equipotentials of a single source are trajectories: the circle") {
    // phi = (d/dz G_{D,0})^2 = 1/(4 z^2).
    QuadDiff qd(Polynomial({Cplx(1.0)}), {{Cplx(0.0), 1.0}}, 0.0, 0.25);
    TraceResult tr = trace_vertical(qd, Cplx(0.5, 0.0), Cplx(0.0, 1.0), 1e-3, 10.0);
    CHECK(tr.end == TraceEnd::Closed);
    for (const auto& p : tr.path.points) CHECK(std::abs(std::abs(p) - 0.5) < 1e-6);
}

TEST_CASE("level-set drift stays below 1e-6 per unit arclength") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> weight(0.3, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        QuadDiff qd = build_three_source(weight(gen), weight(gen), weight(gen));
        for (const auto& cp : finite_critical_points(qd)) {
            for (const auto& ray : separatrix_directions(qd, cp.location, cp.order)) {
                TraceResult tr = trace_vertical(qd, cp.location, ray, 1e-3, 10.0);
                double drift = testsupport::max_level_drift(qd, tr.path);
                CHECK(drift < 1e-6 * (1.0 + tr.arclength));
            }
        }
    }
}

TEST_CASE("separatrix directions are equally spaced") {
    QuadDiff qd = build_three_source(2.0, 1.0, 0.0);
    auto cps = finite_critical_points(qd);
    auto rays = separatrix_directions(qd, cps[0].location, cps[0].order);
    REQUIRE(rays.size() == 3);
    for (size_t k = 0; k < rays.size(); ++k) {
        double gap = std::arg(rays[(k + 1) % 3] / rays[k]);
        if (gap < 0) gap += 2.0 * M_PI;
        CHECK(gap == doctest::Approx(2.0 * M_PI / 3.0).epsilon(1e-6));
    }
    // One of the rays is the positive real direction.
    double best = 1e9;
    for (const auto& r : rays) best = std::min(best, std::abs(std::arg(r)));
    CHECK(best < 1e-9);
}

TEST_CASE("critical graph of the two-droplet example") {
    QuadDiff qd = build_three_source(2.0, 1.0, 0.0);
    CriticalGraph graph = critical_graph(qd);
    REQUIRE(graph.vertices.size() == 1);
    REQUIRE(graph.edges.size() == 2);
    int escaped = 0, closed = 0;
    for (const auto& e : graph.edges) {
        CHECK(e.status.empty());
        if (e.end == TraceEnd::Escaped) ++escaped;
        if (e.end == TraceEnd::HitCriticalPoint && e.path.closed) ++closed;
    }
    CHECK(escaped == 1);
    CHECK(closed == 1);

    CHECK(critical_graph(build_three_source(1.0, 1.0, 0.0)).vertices.empty());
}

TEST_CASE("critical graph with three sources: conjugate vertices, non-crossing edges") {
    QuadDiff qd = build_three_source(1.0, 1.0, 1.0);
    CriticalGraph graph = critical_graph(qd);
    REQUIRE(graph.vertices.size() == 2);
    CHECK(std::abs(graph.vertices[0].location - std::conj(graph.vertices[1].location)) < 1e-9);
    // Pairwise non-crossing away from the shared vertices.
    for (size_t a = 0; a < graph.edges.size(); ++a)
        for (size_t b = a + 1; b < graph.edges.size(); ++b) {
            const auto& pa = graph.edges[a].path;
            const auto& pb = graph.edges[b].path;
            for (size_t k = 0; k + 1 < pa.points.size(); k += 7) {
                Cplx mid = 0.5 * (pa.points[k] + pa.points[k + 1]);
                bool near_vertex = false;
                for (const auto& v : graph.vertices)
                    if (std::abs(mid - v.location) < 5e-3) near_vertex = true;
                if (near_vertex) continue;
                double d = point_curve_distance(mid, pb);
                CHECK(d > 1e-4);
            }
        }
}

TEST_CASE("residue consistency holds for random constructions") {
    std::mt19937_64 gen(57);
    std::uniform_real_distribution<double> weight(0.2, 4.0);
    for (int k = 0; k < 20; ++k) {
        double a0 = weight(gen), a1 = weight(gen), ai = weight(gen);
        QuadDiff qd = build_three_source(a0, a1, ai);  // construction re-checks residues
        CHECK(residue_sqrt(qd, SpherePoint(Cplx(0.0))) == doctest::Approx(a0 / 2).epsilon(1e-10));
        CHECK(residue_sqrt(qd, SpherePoint(Cplx(1.0))) == doctest::Approx(a1 / 2).epsilon(1e-10));
        CHECK(residue_sqrt(qd, SpherePoint::infinity()) == doctest::Approx(ai / 2).epsilon(1e-10));
    }
}
