#include "hslab/quad_diff.hpp"

#include <algorithm>
#include <cmath>

namespace hslab {

namespace {

constexpr double kCoincideTol = 1e-8;

Cplx sqrt_matched(Cplx value, Cplx reference) {
    Cplx w = std::sqrt(value);
    if (std::real(w * std::conj(reference)) < 0.0) w = -w;
    return w;
}

double angle_between(Cplx a, Cplx b) {
    double d = std::arg(b / a);
    return std::abs(d);
}

}  // namespace

QuadDiff::QuadDiff(Polynomial numerator, std::vector<DoublePole> poles, double inf_weight,
                   double factor)
    : num_(std::move(numerator)), poles_(std::move(poles)), inf_weight_(inf_weight), factor_(factor) {
    if (num_.is_zero()) throw DegenerateError("quadratic differential with zero numerator");
    if (!(factor_ > 0)) throw ParameterError("normalization factor must be positive");
    for (const auto& p : poles_) {
        if (p.weight < 0) throw ParameterError("pole weights must be nonnegative");
        if (p.weight == 0.0 && std::abs(num_.eval(p.location)) > 1e-9)
            throw ParameterError("degenerate pole requires a numerator zero at its location");
    }
    if (inf_weight_ < 0) throw ParameterError("weight at infinity must be nonnegative");
    check_residues();
}

Cplx QuadDiff::eval(Cplx z) const {
    Cplx den = 1.0;
    for (const auto& p : poles_) {
        Cplx d = z - p.location;
        den *= d * d;
    }
    return factor_ * num_.eval(z) / den;
}

Cplx QuadDiff::eval_inverted(Cplx w) const {
    // phi(1/w)/w^4 = factor * w^(2P-n-4) * rev(num)(w) / prod (1 - p_k w)^2,
    // with rev(num)(w) = sum c_k w^(n-k).
    int n = num_.degree();
    int P = static_cast<int>(poles_.size());
    Cplx rev = 0.0;
    for (int k = 0; k <= n; ++k) rev += num_.coeffs()[k] * std::pow(w, double(n - k));
    Cplx den = 1.0;
    for (const auto& p : poles_) {
        Cplx d = 1.0 - p.location * w;
        den *= d * d;
    }
    int e = 2 * P - n - 4;
    Cplx we = (e >= 0) ? std::pow(w, double(e)) : 1.0 / std::pow(w, double(-e));
    return factor_ * we * rev / den;
}

double QuadDiff::escape_radius() const {
    double m = 0.0;
    for (const auto& p : poles_) m = std::max(m, std::abs(p.location));
    for (const auto& r : num_.roots()) m = std::max(m, std::abs(r));
    return 10.0 * (1.0 + m);
}

void QuadDiff::check_residues(double tol) const {
    for (const auto& p : poles_) {
        if (p.weight <= 0) continue;
        double res = residue_sqrt(*this, SpherePoint(p.location));
        if (std::abs(res - p.weight / 2.0) > tol)
            throw ParameterError("declared pole weight inconsistent with sqrt residue");
    }
    if (inf_weight_ > 0) {
        double res = residue_sqrt(*this, SpherePoint::infinity());
        if (std::abs(res - inf_weight_ / 2.0) > tol)
            throw ParameterError("declared weight at infinity inconsistent with sqrt residue");
    }
}

QuadDiff build_three_source(double a0, double a1, double a_inf) {
    if (!(a0 > 0)) throw ParameterError("a0 must be positive");
    if (a1 < 0 || a_inf < 0) throw ParameterError("weights must be nonnegative");
    Polynomial num({Cplx(a0 * a0), Cplx(a1 * a1 - a0 * a0 - a_inf * a_inf), Cplx(a_inf * a_inf)});
    std::vector<QuadDiff::DoublePole> poles{{Cplx(0.0), a0}, {Cplx(1.0), a1}};
    return QuadDiff(std::move(num), std::move(poles), a_inf, 0.25);
}

std::vector<CriticalPoint> finite_critical_points(const QuadDiff& qd) {
    if (qd.numerator().is_zero()) throw DegenerateError("zero numerator");
    std::vector<Cplx> roots = qd.numerator().roots();

    // Cluster coincident roots to recover multiplicities.
    std::vector<CriticalPoint> clusters;
    for (Cplx r : roots) {
        bool merged = false;
        for (auto& c : clusters) {
            if (std::abs(r - c.location) < kCoincideTol) {
                c.location = (c.location * double(c.order) + r) / double(c.order + 1);
                c.order += 1;
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({r, 1});
    }

    std::vector<CriticalPoint> out;
    for (auto& c : clusters) {
        int pole_order = 0;
        for (const auto& p : qd.poles())
            if (std::abs(c.location - p.location) < kCoincideTol) {
                pole_order = 2;
                c.location = p.location;  // snap to the exact declared location
                break;
            }
        int net = c.order - pole_order;
        if (net != 0) out.push_back({c.location, net});
    }
    // Declared poles with no numerator zero stay double poles: not finite
    // critical points. Sort for deterministic downstream ordering.
    std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });
    return out;
}

double residue_sqrt(const QuadDiff& qd, const SpherePoint& pole) {
    const int kNodes = 2048;
    const int kMaxHalvings = 8;

    // Distances to the other singular/zero locations bound the contour.
    auto contour_integral = [&](auto eval_fn, double r) -> std::optional<Cplx> {
        Cplx first, prev;
        Cplx acc = 0.0;
        for (int j = 0; j <= kNodes; ++j) {
            double theta = 2.0 * M_PI * j / kNodes;
            Cplx offset = std::polar(r, theta);
            Cplx w = std::sqrt(eval_fn(offset));
            if (j == 0) {
                first = w;
            } else {
                if (std::real(w * std::conj(prev)) < 0.0) w = -w;
            }
            prev = w;
            if (j == kNodes) {
                // Branch must close up after a full loop.
                if (std::abs(w - first) > 1e-6 * (1.0 + std::abs(first))) return std::nullopt;
                break;
            }
            acc += w * offset;
        }
        return acc / double(kNodes);
    };

    double r0;
    std::function<Cplx(Cplx)> eval_fn;
    if (pole.is_infinity()) {
        if (!(qd.inf_weight() > 0)) throw ParameterError("infinity is not a declared double pole");
        double dmin = 0.25;
        for (const auto& p : qd.poles())
            if (std::abs(p.location) > 0) dmin = std::min(dmin, 0.45 / std::abs(p.location));
        for (const auto& z : qd.numerator().roots())
            if (std::abs(z) > 0) dmin = std::min(dmin, 0.45 / std::abs(z));
        r0 = dmin;
        eval_fn = [&qd](Cplx w) { return qd.eval_inverted(w); };
    } else {
        Cplx p0 = pole.value();
        const QuadDiff::DoublePole* found = nullptr;
        for (const auto& p : qd.poles())
            if (std::abs(p.location - p0) < kCoincideTol) found = &p;
        if (!found || found->weight <= 0) throw ParameterError("not a declared double pole");
        p0 = found->location;
        double dmin = 0.5;
        for (const auto& p : qd.poles())
            if (std::abs(p.location - p0) > kCoincideTol)
                dmin = std::min(dmin, 0.45 * std::abs(p.location - p0));
        for (const auto& z : qd.numerator().roots())
            if (std::abs(z - p0) > kCoincideTol) dmin = std::min(dmin, 0.45 * std::abs(z - p0));
        r0 = dmin;
        eval_fn = [&qd, p0](Cplx offset) { return qd.eval(p0 + offset); };
    }

    double r = r0;
    for (int h = 0; h <= kMaxHalvings; ++h) {
        auto res = contour_integral(eval_fn, r);
        if (res) return std::abs(*res);
        r *= 0.5;
    }
    throw BranchError("residue contour failed to close after 8 halvings");
}

std::vector<Cplx> separatrix_directions(const QuadDiff& qd, Cplx at, int order) {
    // Leading coefficient c with phi(z) ~ c (z - at)^order.
    // Deflate the numerator by its zeros at `at`, divide by the other pole factors.
    std::vector<Cplx> coeffs = qd.numerator().coeffs();
    int m_num = order + (([&] {
                    for (const auto& p : qd.poles())
                        if (std::abs(p.location - at) < kCoincideTol) return 2;
                    return 0;
                })());
    for (int k = 0; k < m_num; ++k) {
        // Synthetic division by (z - at).
        std::vector<Cplx> q(coeffs.size() - 1);
        Cplx carry = coeffs.back();
        for (size_t i = coeffs.size() - 1; i-- > 0;) {
            q[i] = carry;
            carry = coeffs[i] + carry * at;
        }
        coeffs = std::move(q);
    }
    Cplx c = Polynomial(coeffs).eval(at) * qd.factor();
    for (const auto& p : qd.poles()) {
        if (std::abs(p.location - at) < kCoincideTol) continue;
        Cplx d = at - p.location;
        c /= d * d;
    }
    int rays = order + 2;
    std::vector<Cplx> dirs(rays);
    for (int k = 0; k < rays; ++k) {
        double theta = (M_PI - std::arg(c) + 2.0 * M_PI * k) / double(rays);
        dirs[k] = std::polar(1.0, theta);
    }
    return dirs;
}

namespace {

struct FieldEval {
    const QuadDiff& qd;
    // Unit tangent v with phi v^2 negative real, oriented along ref.
    Cplx operator()(Cplx z, Cplx ref) const {
        Cplx w = std::sqrt(qd.eval(z));
        Cplx v = Cplx(0, 1) * std::conj(w) / std::abs(w);
        if (std::real(v * std::conj(ref)) < 0.0) v = -v;
        return v;
    }
};

// One classical RK4 step of dz/ds = field(z), carrying the direction as the
// sign reference through the stages.
Cplx rk4_step(const FieldEval& field, Cplx z, Cplx dir, double h) {
    Cplx k1 = field(z, dir);
    Cplx k2 = field(z + 0.5 * h * k1, k1);
    Cplx k3 = field(z + 0.5 * h * k2, k2);
    Cplx k4 = field(z + h * k3, k3);
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Gauss-Legendre 3-point nodes on [0,1].
constexpr double kGlX[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kGlW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Integral of sqrt(phi) along the chord a -> b with branch continuity
// starting from w_ref; returns the updated reference as well.
Cplx integrate_chord(const QuadDiff& qd, Cplx a, Cplx b, Cplx& w_ref, int subdivisions = 1) {
    Cplx total = 0.0;
    Cplx prev = w_ref;
    for (int s = 0; s < subdivisions; ++s) {
        Cplx sa = a + (b - a) * (double(s) / subdivisions);
        Cplx sb = a + (b - a) * (double(s + 1) / subdivisions);
        Cplx dz = sb - sa;
        for (int i = 0; i < 3; ++i) {
            Cplx node = sa + kGlX[i] * dz;
            Cplx w = sqrt_matched(qd.eval(node), prev);
            prev = w;
            total += kGlW[i] * w * dz;
        }
    }
    w_ref = prev;
    return total;
}

}  // namespace

TraceResult trace_vertical(const QuadDiff& qd, Cplx start, Cplx direction, double step,
                           double max_arclen) {
    if (!(step > 0) || !(max_arclen > 0)) throw ParameterError("step and max_arclen must be positive");
    for (const auto& p : qd.poles())
        if (std::abs(start - p.location) < kBoundaryTol)
            throw SingularStartError("trace started at a pole");
    direction /= std::abs(direction);

    auto cps = finite_critical_points(qd);
    double escape = qd.escape_radius();
    FieldEval field{qd};

    TraceResult result;
    result.path.points.push_back(start);

    // A start at a critical point leaves along one of the equal-angle rays;
    // elsewhere the direction must already be vertical to 0.1 rad.
    Cplx z = start;
    Cplx dir = direction;
    bool from_critical = false;
    for (const auto& cp : cps) {
        if (std::abs(start - cp.location) < kCoincideTol) {
            from_critical = true;
            auto rays = separatrix_directions(qd, cp.location, cp.order);
            const Cplx* best = nullptr;
            double best_angle = 1e9;
            for (const auto& r : rays) {
                double a = angle_between(direction, r);
                if (a < best_angle) {
                    best_angle = a;
                    best = &r;
                }
            }
            if (best_angle > 0.1)
                throw ParameterError("direction is not an admissible separatrix ray");
            dir = *best;
            z = cp.location;
            break;
        }
    }
    if (!from_critical) {
        double phase = std::arg(qd.eval(start) * direction * direction);
        double dev = std::abs(std::remainder(phase - M_PI, 2.0 * M_PI));
        if (dev > 0.1) throw ParameterError("direction is not vertical at the start point");
        dir = field(start, direction);
    }

    Cplx psi = 0.0;   // int sqrt(phi) from the start along the traced path
    Cplx w_ref;       // current branch of sqrt(phi)
    double arclen = 0.0;
    const double approach = 1e-4 * step;  // resolution of critical-point endpoints

    if (from_critical) {
        // Leave the zero by a tiny radial offset; the adaptive controller
        // resolves the curvature on the way out. The skipped stub of
        // int sqrt(phi) is O(offset^{(m+2)/2}), far below tracing tolerance.
        Cplx z1 = z + approach * dir;
        w_ref = std::sqrt(qd.eval(z1));
        if (std::real((Cplx(0, 1) * std::conj(w_ref)) * std::conj(dir)) < 0.0) w_ref = -w_ref;
        Cplx wtmp = w_ref;
        Cplx prev_node = z + (1e-3 * approach) * dir;
        Cplx acc = 0.0;
        for (int k = 9; k >= 0; --k) {
            Cplx node = z + approach * dir * std::pow(0.5, double(k));
            acc += integrate_chord(qd, prev_node, node, wtmp, 2);
            prev_node = node;
        }
        psi = acc;
        w_ref = wtmp;
        arclen = approach;
        z = z1;
        result.path.points.push_back(z);
    } else {
        w_ref = std::sqrt(qd.eval(z));
        if (std::real((Cplx(0, 1) * std::conj(w_ref)) * std::conj(dir)) < 0.0) w_ref = -w_ref;
    }

    const Cplx start_dir = dir;
    double h = from_critical ? approach : step;
    const double kMinStep = 1e-14;
    size_t guard = 0;
    const size_t kGuardMax = 50'000'000;
    std::optional<size_t> approaching;  // critical point currently being resolved

    while (true) {
        if (++guard > kGuardMax) throw StepError("trace step budget exhausted");

        if (approaching) {
            double d = std::abs(z - cps[*approaching].location);
            h = std::min(h, std::max(0.3 * d, 0.5 * approach));
        }
        Cplx z_full = rk4_step(field, z, dir, h);
        Cplx z_half = rk4_step(field, z, dir, 0.5 * h);
        Cplx dir_half = field(z_half, dir);
        z_half = rk4_step(field, z_half, dir_half, 0.5 * h);
        double err = std::abs(z_full - z_half);
        if (err > 1e-10 * (1.0 + std::abs(z)) && h > kMinStep) {
            h *= 0.5;
            if (h <= kMinStep) throw StepError("adaptive step underflow");
            continue;
        }

        Cplx z_new = z_half;
        Cplx w_before = w_ref;
        Cplx dpsi = integrate_chord(qd, z, z_new, w_ref);
        psi += dpsi;

        // One Newton correction back onto the level set Re(psi) = 0.
        Cplx w_new = sqrt_matched(qd.eval(z_new), w_ref);
        double f = psi.real();
        Cplx delta = -f * std::conj(w_new) / std::norm(w_new);
        z_new += delta;
        psi += w_new * delta;
        w_ref = sqrt_matched(qd.eval(z_new), w_new);

        arclen += std::abs(z_new - z);
        Cplx dir_new = field(z_new, dir);
        z = z_new;
        dir = dir_new;
        result.path.points.push_back(z);

        if (err < 1e-13 * (1.0 + std::abs(z))) h = std::min(2.0 * h, step);

        // Termination, tested after the point is committed. Entering the
        // step-ball of a critical point switches to a refinement mode that
        // walks the endpoint in before snapping to the exact location.
        if (arclen > 2.0 * step) {
            bool stopped = false;
            if (!approaching) {
                for (size_t ci = 0; ci < cps.size(); ++ci)
                    if (std::abs(z - cps[ci].location) < step) {
                        approaching = ci;
                        break;
                    }
            }
            if (approaching) {
                double d = std::abs(z - cps[*approaching].location);
                if (d <= approach) {
                    result.end = TraceEnd::HitCriticalPoint;
                    result.end_vertex = *approaching;
                    const Cplx loc = cps[*approaching].location;
                    if (std::abs(loc - result.path.points.front()) < kBoundaryTol) {
                        result.path.points.pop_back();
                        result.path.closed = true;
                    } else {
                        result.path.points.back() = loc;
                    }
                    stopped = true;
                } else if (d > 2.0 * step) {
                    // A passing trajectory: terminate on ball entry per the
                    // contract, at the point where it left the neighborhood.
                    result.end = TraceEnd::HitCriticalPoint;
                    result.end_vertex = *approaching;
                    stopped = true;
                }
            }
            if (stopped) break;
        }
        if (arclen > 10.0 * step && std::abs(z - start) < step &&
            angle_between(dir, start_dir) < 0.05) {
            result.path.points.pop_back();
            result.path.closed = true;
            result.end = TraceEnd::Closed;
            break;
        }
        if (std::abs(z) > escape) {
            result.end = TraceEnd::Escaped;
            break;
        }
        if (arclen >= max_arclen) {
            result.end = TraceEnd::MaxLength;
            break;
        }

        (void)w_before;
    }
    result.arclength = arclen;
    return result;
}

namespace {

double sampled_hausdorff(const PathCurve& a, const PathCurve& b) {
    double d = 0.0;
    for (const auto& p : a.points) d = std::max(d, point_curve_distance(p, b));
    for (const auto& p : b.points) d = std::max(d, point_curve_distance(p, a));
    return d;
}

}  // namespace

CriticalGraph critical_graph(const QuadDiff& qd, double step, double max_arclen) {
    CriticalGraph graph;
    graph.vertices = finite_critical_points(qd);
    if (max_arclen <= 0) max_arclen = 4.0 * qd.escape_radius();

    for (size_t vi = 0; vi < graph.vertices.size(); ++vi) {
        const auto& v = graph.vertices[vi];
        auto rays = separatrix_directions(qd, v.location, v.order);
        for (const auto& ray : rays) {
            CriticalGraphEdge edge;
            edge.from_vertex = vi;
            try {
                TraceResult tr = trace_vertical(qd, v.location, ray, step, max_arclen);
                edge.path = std::move(tr.path);
                edge.end = tr.end;
                edge.to_vertex = tr.end_vertex;
            } catch (const Error& e) {
                edge.status = e.what();
                graph.edges.push_back(std::move(edge));
                continue;
            }
            bool duplicate = false;
            for (const auto& existing : graph.edges) {
                if (!existing.status.empty() || existing.path.points.empty()) continue;
                if (sampled_hausdorff(existing.path, edge.path) < 10.0 * step) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) graph.edges.push_back(std::move(edge));
        }
    }
    return graph;
}

}  // namespace hslab
