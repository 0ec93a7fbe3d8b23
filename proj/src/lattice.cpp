#include "hslab/lattice.hpp"

#include <cmath>

namespace hslab {

TiledSurface TiledSurface::plane(double mesh, Cplx origin) {
    if (!(mesh > 0)) throw ParameterError("mesh must be positive");
    TiledSurface s;
    s.kind = Kind::Plane;
    s.mesh = mesh;
    s.origin = origin;
    return s;
}

TiledSurface TiledSurface::torus(int width_cells, int height_cells, double mesh, Cplx origin) {
    if (!(mesh > 0)) throw ParameterError("mesh must be positive");
    if (width_cells < 4 || height_cells < 4)
        throw ParameterError("torus needs at least 4 cells per dimension");
    TiledSurface s;
    s.kind = Kind::Torus;
    s.mesh = mesh;
    s.width_cells = width_cells;
    s.height_cells = height_cells;
    s.origin = origin;
    return s;
}

Cplx TiledSurface::cell_center(CellId c) const {
    return origin + mesh * Cplx(c.i + 0.5, c.j + 0.5);
}

Cplx TiledSurface::vertex_point(VertexId v) const { return origin + mesh * Cplx(v.i, v.j); }

namespace {
int wrap(int v, int n) {
    int m = v % n;
    return m < 0 ? m + n : m;
}
}  // namespace

CellId wrap_cell(const TiledSurface& s, int i, int j) {
    if (!s.is_torus()) return {i, j};
    return {wrap(i, s.width_cells), wrap(j, s.height_cells)};
}

VertexId wrap_vertex(const TiledSurface& s, int i, int j) {
    if (!s.is_torus()) return {i, j};
    return {wrap(i, s.width_cells), wrap(j, s.height_cells)};
}

std::array<CellId, 4> neighbors(const TiledSurface& s, CellId c) {
    std::array<CellId, 4> out;
    for (size_t k = 0; k < 4; ++k)
        out[k] = wrap_cell(s, c.i + kSteps[k].first, c.j + kSteps[k].second);
    return out;
}

PrimalEdge separating_edge(const TiledSurface& s, CellId a, CellId b) {
    auto nbrs = neighbors(s, a);
    int dir = -1;
    for (int k = 0; k < 4; ++k)
        if (nbrs[k] == b) dir = k;
    if (dir < 0) throw AdjacencyError("cells are not adjacent");
    switch (dir) {
        case 0: return {wrap_vertex(s, a.i + 1, a.j), false};  // b east: vertical edge
        case 1: return {wrap_vertex(s, a.i, a.j), false};      // b west
        case 2: return {wrap_vertex(s, a.i, a.j + 1), true};   // b north: horizontal edge
        default: return {wrap_vertex(s, a.i, a.j), true};      // b south
    }
}

CellId walk_step(const TiledSurface& s, CellId c, Rng& rng) {
    int d = rng.direction4();
    return wrap_cell(s, c.i + kSteps[d].first, c.j + kSteps[d].second);
}

CellId cell_of_point(const TiledSurface& s, Cplx p) {
    double u = (p.real() - s.origin.real()) / s.mesh;
    double v = (p.imag() - s.origin.imag()) / s.mesh;
    double fu = std::floor(u), fv = std::floor(v);
    int i = int(fu), j = int(fv);
    // On a lattice line the smaller-center cell wins (x first, then y).
    if (u == fu) i -= 1;
    if (v == fv) j -= 1;
    CellId c = wrap_cell(s, i, j);
    if (s.is_torus()) {
        if (u < 0 || u > s.width_cells || v < 0 || v > s.height_cells)
            throw DomainError("point outside the fundamental domain");
    }
    return c;
}

}  // namespace hslab
