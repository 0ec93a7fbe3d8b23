#include "hslab/greens_surface.hpp"

#include <algorithm>
#include <cmath>

namespace hslab {

GreensSurface GreensSurface::strip(double a) {
    if (!(a > 0)) throw ParameterError("strip weight must be positive");
    GreensSurface s;
    s.param_ = a;
    return s;
}

GreensSurface GreensSurface::assemble(double rect_width, std::vector<GreensSurface> children) {
    if (!(rect_width > 0)) throw ParameterError("rectangle width must be positive");
    if (children.empty()) throw ParameterError("assembly requires at least one child");
    GreensSurface s;
    s.param_ = rect_width;
    s.children_ = std::move(children);
    return s;
}

double GreensSurface::strip_weight() const {
    if (!is_strip()) throw AddressError("not a half-strip");
    return param_;
}

double GreensSurface::rect_width() const {
    if (is_strip()) throw AddressError("not an assembly");
    return param_;
}

double GreensSurface::total_weight() const {
    if (is_strip()) return param_;
    double s = 0.0;
    for (const auto& c : children_) s += c.total_weight();
    return s;
}

double greens_value(const GreensSurface& T, const SurfacePoint& p) {
    const GreensSurface* node = &T;
    double offset = 0.0;  // accumulated rectangle widths along the path
    for (size_t idx : p.path) {
        if (node->is_strip()) throw AddressError("path descends below a half-strip");
        if (idx >= node->children().size()) throw AddressError("child index out of range");
        offset += node->rect_width();
        node = &node->children()[idx];
    }
    double x = p.local.real();
    double y = p.local.imag();
    if (y < -kBoundaryTol || y > node->boundary_height() + kBoundaryTol)
        throw AddressError("local Im coordinate outside the polygon");
    if (node->is_strip()) {
        if (x > kBoundaryTol) throw AddressError("half-strip requires Re <= 0");
    } else {
        if (x > kBoundaryTol || x < -node->rect_width() - kBoundaryTol)
            throw AddressError("rectangle requires -b <= Re <= 0");
    }
    return -2.0 * (x - offset);
}

GreensSurface from_weighted_tree(const WeightedTree& tree) {
    if (tree.is_leaf()) return GreensSurface::strip(tree.value);
    std::vector<GreensSurface> children;
    children.reserve(tree.children.size());
    for (const auto& c : tree.children) children.push_back(from_weighted_tree(c));
    return GreensSurface::assemble(tree.value, std::move(children));
}

WeightedTree to_weighted_tree(const GreensSurface& surface) {
    WeightedTree t;
    if (surface.is_strip()) {
        t.value = surface.strip_weight();
        return t;
    }
    t.value = surface.rect_width();
    for (const auto& c : surface.children()) t.children.push_back(to_weighted_tree(c));
    return t;
}

ValidationReport validate_greens_type(const GreensTypeSurface& s) {
    ValidationReport report;
    const double tol = 1e-9;
    auto issue = [&](ValidationIssue::Kind kind, std::string msg) {
        report.issues.push_back({kind, std::move(msg)});
    };

    std::vector<std::vector<std::pair<double, double>>> covered(s.pieces.size());

    for (size_t pi = 0; pi < s.pairings.size(); ++pi) {
        const auto& pr = s.pairings[pi];
        std::string tag = "pairing " + std::to_string(pi);
        if (pr.piece_a >= s.pieces.size() || pr.piece_b >= s.pieces.size()) {
            issue(ValidationIssue::Kind::OutOfRange, tag + ": piece index out of range");
            continue;
        }
        double ha = s.pieces[pr.piece_a].boundary_height();
        double hb = s.pieces[pr.piece_b].boundary_height();
        if (pr.a_lo < -tol || pr.a_hi > ha + tol || pr.b_lo < -tol || pr.b_hi > hb + tol ||
            pr.a_lo >= pr.a_hi || pr.b_lo >= pr.b_hi) {
            issue(ValidationIssue::Kind::OutOfRange, tag + ": interval outside the boundary side");
            continue;
        }
        double la = pr.a_hi - pr.a_lo, lb = pr.b_hi - pr.b_lo;
        if (std::abs(la - lb) > tol)
            issue(ValidationIssue::Kind::LengthMismatch, tag + ": intervals have unequal length");
        // A minus-translation z -> -z + offset keeps the boundary line Re = 0
        // only for purely imaginary offsets; otherwise the glued pieces would
        // sit on the same side of the segment.
        if (std::abs(pr.offset.real()) > tol)
            issue(ValidationIssue::Kind::OrientationViolation,
                  tag + ": offset has a horizontal component");
        // The map must carry [i a_lo, i a_hi] onto [i b_lo, i b_hi] reversed.
        double im = pr.offset.imag();
        if (std::abs((im - pr.a_hi) - pr.b_lo) > tol || std::abs((im - pr.a_lo) - pr.b_hi) > tol)
            issue(ValidationIssue::Kind::NonInvolutive,
                  tag + ": minus-translation does not map the declared intervals onto each other");
        covered[pr.piece_a].push_back({pr.a_lo, pr.a_hi});
        covered[pr.piece_b].push_back({pr.b_lo, pr.b_hi});
    }

    for (size_t k = 0; k < s.pieces.size(); ++k) {
        auto& ivs = covered[k];
        std::sort(ivs.begin(), ivs.end());
        double cursor = 0.0;
        std::string tag = "piece " + std::to_string(k);
        for (const auto& [lo, hi] : ivs) {
            if (lo > cursor + tol) {
                issue(ValidationIssue::Kind::CoverageGap, tag + ": boundary side not fully paired");
            } else if (lo < cursor - tol) {
                issue(ValidationIssue::Kind::Overlap, tag + ": boundary intervals overlap");
            }
            cursor = std::max(cursor, hi);
        }
        if (cursor < s.pieces[k].boundary_height() - tol)
            issue(ValidationIssue::Kind::CoverageGap, tag + ": boundary side not fully paired");
    }
    return report;
}

}  // namespace hslab
