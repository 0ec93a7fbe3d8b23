#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hslab/complex_types.hpp"

namespace hslab {

// Recursive partial translation surface: either a half-strip
// {Re <= 0, 0 <= Im <= pi a} or a rectangle of width b with child surfaces
// glued along its left side, bottom to top in list order. Every surface has
// one unpaired vertical boundary side of length pi * (total source weight).
class GreensSurface {
public:
    static GreensSurface strip(double a);
    static GreensSurface assemble(double rect_width, std::vector<GreensSurface> children);

    bool is_strip() const { return children_.empty(); }
    // Leaf weight for strips; for assemblies the width of the rectangle.
    double strip_weight() const;
    double rect_width() const;
    const std::vector<GreensSurface>& children() const { return children_; }

    // Sum of all leaf weights; the boundary side has length pi * this.
    double total_weight() const;
    double boundary_height() const { return M_PI * total_weight(); }

private:
    GreensSurface() = default;
    double param_ = 0.0;  // strip weight a, or rectangle width b
    std::vector<GreensSurface> children_;
};

// Address of a point: the child-index path into the tree plus a local
// coordinate in the addressed polygon (strip: Re <= 0; rectangle:
// -b <= Re <= 0), both with 0 <= Im <= pi * (polygon weight).
struct SurfacePoint {
    std::vector<size_t> path;
    Cplx local;
};

// The canonical Green's function -2 x_T: x_T is 0 on the unpaired boundary
// side and decreases by each rectangle width when passing into children.
double greens_value(const GreensSurface& T, const SurfacePoint& p);

// Nested-divisor tree: leaves carry source weights, internal nodes carry
// rectangle widths.
struct WeightedTree {
    double value = 0.0;  // leaf weight or node width
    std::vector<WeightedTree> children;

    bool is_leaf() const { return children.empty(); }
};

GreensSurface from_weighted_tree(const WeightedTree& tree);
WeightedTree to_weighted_tree(const GreensSurface& surface);

// Half-translation surface of Green's type: Green's surfaces glued along
// their boundary sides by minus-translations z -> -z + offset.
struct GreensTypeSurface {
    struct Pairing {
        size_t piece_a;
        double a_lo, a_hi;  // interval on piece_a's boundary side, as Im-coordinates
        size_t piece_b;
        double b_lo, b_hi;
        Cplx offset;        // the minus-translation z -> -z + offset
    };
    std::vector<GreensSurface> pieces;
    std::vector<Pairing> pairings;
};

struct ValidationIssue {
    enum class Kind { LengthMismatch, CoverageGap, Overlap, NonInvolutive, OrientationViolation, OutOfRange };
    Kind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool valid() const { return issues.empty(); }
};

ValidationReport validate_greens_type(const GreensTypeSurface& s);

}  // namespace hslab
