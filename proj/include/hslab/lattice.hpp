#pragma once

#include <array>
#include <cstdint>

#include "hslab/complex_types.hpp"
#include "hslab/rng.hpp"

namespace hslab {

// Square-tiled substrate: the full plane or a flat torus with a rectangular
// fundamental domain. Cells are dual-lattice vertices (square centers);
// cell (i,j) maps to the continuum point origin + mesh * (i+1/2, j+1/2).
struct TiledSurface {
    enum class Kind { Plane, Torus };
    Kind kind = Kind::Plane;
    double mesh = 1.0;
    int width_cells = 0;   // torus only
    int height_cells = 0;  // torus only
    Cplx origin{0.0};      // continuum coordinates of the lattice origin

    static TiledSurface plane(double mesh, Cplx origin = 0.0);
    static TiledSurface torus(int width_cells, int height_cells, double mesh, Cplx origin = 0.0);

    bool is_torus() const { return kind == Kind::Torus; }
    Cplx cell_center(struct CellId c) const;
    Cplx vertex_point(struct VertexId v) const;
};

struct CellId {
    int i = 0, j = 0;
    bool operator==(const CellId&) const = default;
};

struct VertexId {  // primal lattice vertex
    int i = 0, j = 0;
    bool operator==(const VertexId&) const = default;
};

// Primal edge between two adjacent primal vertices, stored canonically as a
// base vertex plus a direction flag (horizontal: base -> base+(1,0);
// vertical: base -> base+(0,1)). Wrapped on the torus.
struct PrimalEdge {
    VertexId base;
    bool horizontal = false;
    bool operator==(const PrimalEdge&) const = default;
};

// Step directions, in the draw order of walk_step: +x, -x, +y, -y.
inline constexpr std::array<std::pair<int, int>, 4> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

CellId wrap_cell(const TiledSurface& s, int i, int j);
VertexId wrap_vertex(const TiledSurface& s, int i, int j);

// The four dual-adjacent cells, wrapped on the torus.
std::array<CellId, 4> neighbors(const TiledSurface& s, CellId c);

// The unique primal edge separating two adjacent cells.
PrimalEdge separating_edge(const TiledSurface& s, CellId a, CellId b);

// Uniform step to one of the four neighbors; consumes exactly one rng draw.
CellId walk_step(const TiledSurface& s, CellId c, Rng& rng);

// Cell containing a continuum point. A point on a lattice line belongs to
// several cells; the tie-break picks the cell whose center is smallest
// lexicographically by (x, then y).
CellId cell_of_point(const TiledSurface& s, Cplx p);

}  // namespace hslab
