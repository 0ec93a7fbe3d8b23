#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hslab/path_curve.hpp"
#include "hslab/poly.hpp"

namespace hslab {

// Meromorphic quadratic differential in rational form,
//   phi(z) dz^2 = factor * numerator(z) / prod_k (z - p_k)^2 dz^2,
// with declared double poles p_k carrying intended source weights. A declared
// weight of 0 marks a pole that degenerates to a simple pole against a
// numerator zero at the same location.
class QuadDiff {
public:
    struct DoublePole {
        Cplx location;
        double weight;  // intended |Res(sqrt(phi))| * 2; 0 for a degenerate (simple) pole
    };

    QuadDiff(Polynomial numerator, std::vector<DoublePole> poles, double inf_weight,
             double factor = 0.25);

    Cplx eval(Cplx z) const;
    // phi pulled back under z = 1/w:  phi(1/w) / w^4.
    Cplx eval_inverted(Cplx w) const;

    const Polynomial& numerator() const { return num_; }
    const std::vector<DoublePole>& poles() const { return poles_; }
    double inf_weight() const { return inf_weight_; }
    double factor() const { return factor_; }

    // Radius beyond which every trajectory is considered escaped.
    double escape_radius() const;

    // Verifies |Res(sqrt(phi))| == weight/2 at every declared positive-weight
    // double pole (and at infinity when declared), to tol. Construction calls
    // this; it throws ParameterError on mismatch.
    void check_residues(double tol = 1e-10) const;

private:
    Polynomial num_;
    std::vector<DoublePole> poles_;
    double inf_weight_;
    double factor_;
};

// The unique quadratic differential on the sphere with double poles at
// 0, 1, infinity and square-root residues a0/2, a1/2, a_inf/2:
//   [a0^2 + (a1^2 - a0^2 - a_inf^2) z + a_inf^2 z^2] / (4 z^2 (z-1)^2).
QuadDiff build_three_source(double a0, double a1, double a_inf);

// Zeros of phi (with net order after cancellation against declared poles)
// plus simple poles, as (location, order) with order >= 1 for zeros and -1
// for simple poles.
struct CriticalPoint {
    Cplx location;
    int order;
};
std::vector<CriticalPoint> finite_critical_points(const QuadDiff& qd);

// |Res(sqrt(phi))| at a declared double pole (finite or infinity), by a
// numeric contour integral with branch continuation. The contour radius
// halves on branch mismatch and fails after 8 halvings.
double residue_sqrt(const QuadDiff& qd, const SpherePoint& pole);

// The m+2 vertical separatrix directions at a zero of order m (one direction
// for a simple pole, m = -1).
std::vector<Cplx> separatrix_directions(const QuadDiff& qd, Cplx at, int order);

enum class TraceEnd { Closed, HitCriticalPoint, Escaped, MaxLength, None };

struct TraceResult {
    PathCurve path;
    TraceEnd end = TraceEnd::None;
    std::optional<size_t> end_vertex;  // index into finite_critical_points when HitCriticalPoint
    double arclength = 0.0;
};

// Follow the vertical trajectory (arg(phi dz^2) = pi) from `start` in the
// given direction: adaptive RK4 on the unit tangent field with one Newton
// re-projection per step onto the level set of Re int sqrt(phi).
// Terminates on closure, on entering a step-ball around a critical point
// (the exact critical point is appended), on escape, or at max_arclen.
TraceResult trace_vertical(const QuadDiff& qd, Cplx start, Cplx direction, double step,
                           double max_arclen);

struct CriticalGraphEdge {
    size_t from_vertex;
    PathCurve path;
    TraceEnd end = TraceEnd::None;
    std::optional<size_t> to_vertex;
    std::string status;  // empty on success, error text otherwise
};

struct CriticalGraph {
    std::vector<CriticalPoint> vertices;
    std::vector<CriticalGraphEdge> edges;
};

// Trace all separatrices from every finite critical point, deduplicating
// coincident edges (Hausdorff distance below 10 * step).
CriticalGraph critical_graph(const QuadDiff& qd, double step = 1e-3, double max_arclen = 0.0);

}  // namespace hslab
