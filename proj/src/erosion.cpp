#include "hslab/erosion.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace hslab {

namespace {

uint64_t vkey(VertexId v) {
    return (uint64_t(uint32_t(v.i)) << 32) | uint64_t(uint32_t(v.j));
}
uint64_t ckey(CellId c) {
    return (uint64_t(uint32_t(c.i)) << 32) | uint64_t(uint32_t(c.j));
}

// Vertex directions in counterclockwise slot order: E, N, W, S.
constexpr int kVDx[4] = {1, 0, -1, 0};
constexpr int kVDy[4] = {0, 1, 0, -1};

VertexId vstep(const TiledSurface& s, VertexId v, int dir) {
    return wrap_vertex(s, v.i + kVDx[dir], v.j + kVDy[dir]);
}

// Direction slot from a to b (adjacent, wrapped), or -1.
int vdir(const TiledSurface& s, VertexId a, VertexId b) {
    for (int d = 0; d < 4; ++d)
        if (vstep(s, a, d) == b) return d;
    return -1;
}

std::array<VertexId, 4> cell_corners(const TiledSurface& s, CellId c) {
    return {wrap_vertex(s, c.i, c.j), wrap_vertex(s, c.i + 1, c.j),
            wrap_vertex(s, c.i + 1, c.j + 1), wrap_vertex(s, c.i, c.j + 1)};
}

uint64_t edge_key(const TiledSurface& s, VertexId a, VertexId b) {
    int d = vdir(s, a, b);
    if (d < 0) throw AdjacencyError("vertices are not adjacent");
    VertexId base = (d == 0 || d == 1) ? a : b;
    bool horizontal = (d == 0 || d == 2);
    return vkey(base) * 2 + (horizontal ? 1 : 0);
}

// Adjacent back-and-forth pairs removed to a fixed point, including across
// the cyclic seam. May return fewer than 4 vertices (degenerate walk).
std::vector<VertexId> cancel_spurs(std::vector<VertexId> walk) {
    std::vector<VertexId> st;
    st.reserve(walk.size());
    for (const auto& v : walk) {
        if (st.size() >= 2 && st[st.size() - 2] == v)
            st.pop_back();
        else
            st.push_back(v);
    }
    bool changed = true;
    while (changed && st.size() >= 3) {
        changed = false;
        size_t n = st.size();
        if (st[n - 2] == st[0]) {
            st.pop_back();
            st.pop_back();
            changed = true;
            continue;
        }
        if (st[n - 1] == st[1]) {
            st.erase(st.begin(), st.begin() + 2);
            changed = true;
        }
    }
    return st;
}

// Structural check of a single closed walk: adjacency, no repeated
// undirected edge, no transversal self-crossing at repeated vertices.
std::optional<std::string> validate_walk(const TiledSurface& s, const std::vector<VertexId>& walk) {
    size_t n = walk.size();
    if (n < 4) return "walk has fewer than 4 vertices";
    std::unordered_set<uint64_t> edges;
    edges.reserve(2 * n);
    std::unordered_map<uint64_t, std::vector<std::pair<int, int>>> passages;
    for (size_t k = 0; k < n; ++k) {
        VertexId a = walk[k], b = walk[(k + 1) % n];
        int d = vdir(s, a, b);
        if (d < 0) return "consecutive vertices not adjacent";
        if (!edges.insert(edge_key(s, a, b)).second) return "repeated interface edge";
        VertexId prev = walk[(k + n - 1) % n];
        int din = vdir(s, a, prev);
        passages[vkey(a)].push_back({din, d});
    }
    for (const auto& [key, ps] : passages) {
        if (ps.size() <= 1) continue;
        if (ps.size() > 2) return "vertex visited more than twice";
        auto [a1, a2] = ps[0];
        auto [b1, b2] = ps[1];
        auto inside = [&](int t) { return ((t - a1 + 4) % 4) < ((a2 - a1 + 4) % 4) && t != a1; };
        if (inside(b1) != inside(b2)) return "interface crosses itself at a vertex";
    }
    return std::nullopt;
}

// Replace the traversal of edge {p,q} in the walk by the three-edge path
// around cell v on the far side. Returns false if the walk has no such edge.
bool splice_around(const TiledSurface& s, std::vector<VertexId>& walk, VertexId p, VertexId q,
                   CellId v) {
    size_t n = walk.size();
    for (size_t k = 0; k < n; ++k) {
        VertexId a = walk[k], b = walk[(k + 1) % n];
        if (!((a == p && b == q) || (a == q && b == p))) continue;
        auto corners = cell_corners(s, v);
        VertexId others[2];
        int cnt = 0;
        for (const auto& c : corners)
            if (!(c == a) && !(c == b)) others[cnt++] = c;
        if (cnt != 2) throw InvariantViolation("separating edge is not a side of the end cell");
        VertexId r = (vdir(s, a, others[0]) >= 0) ? others[0] : others[1];
        VertexId t = (r == others[0]) ? others[1] : others[0];
        walk.insert(walk.begin() + long(k) + 1, {r, t});
        return true;
    }
    return false;
}

struct WalkOutcome {
    CellId from, to;
    int64_t steps;
};

WalkOutcome random_walk_to_crossing(const ErosionState& state, CellId start, int32_t me, Rng& rng,
                                    int64_t max_steps, std::vector<CellId>* record) {
    const OwnershipGrid& g = state.ownership;
    int64_t steps = 0;
    int ui = start.i, uj = start.j;
    if (record) record->push_back(start);
    if (g.is_torus()) {
        const int W = g.width(), H = g.height();
        const int32_t* data = g.data();
        for (;;) {
            if (++steps > max_steps) throw WalkOverflowError("walk exceeded the step cap");
            int d = rng.direction4();
            int vi = ui + kSteps[d].first, vj = uj + kSteps[d].second;
            if (vi < 0) vi += W; else if (vi >= W) vi -= W;
            if (vj < 0) vj += H; else if (vj >= H) vj -= H;
            if (record) record->push_back({vi, vj});
            if (data[size_t(vj) * W + vi] != me) return {{ui, uj}, {vi, vj}, steps};
            ui = vi;
            uj = vj;
        }
    }
    const int32_t* data = g.data();
    const int x0 = g.min_i(), y0 = g.min_j(), W = g.width();
    for (;;) {
        if (++steps > max_steps) throw WalkOverflowError("walk exceeded the step cap");
        int d = rng.direction4();
        int vi = ui + kSteps[d].first, vj = uj + kSteps[d].second;
        if (record) record->push_back({vi, vj});
        if (data[size_t(vj - y0) * W + (vi - x0)] != me) return {{ui, uj}, {vi, vj}, steps};
        ui = vi;
        uj = vj;
    }
}

ErosionEvent process_capture(ErosionState& state, int source, WalkOutcome wo,
                             const EventOptions& opts, std::vector<CellId>&& walk_record) {
    ErosionEvent ev;
    ev.time = state.clock;
    ev.source = source;
    ev.walk_length = wo.steps;
    ev.end_cell = wo.to;
    ev.walk = std::move(walk_record);
    const int me = state.sources[source].droplet;
    ev.previous_owner = state.owner(wo.to);

    if (state.is_source_cell(wo.to)) {
        ev.outcome = ErosionEvent::Outcome::NoOpSource;
        return ev;
    }

    PrimalEdge e = separating_edge(state.surface, wo.from, wo.to);
    VertexId p = e.base;
    VertexId q = vstep(state.surface, e.base, e.horizontal ? 0 : 1);

    auto reject = [&](const std::string& why) {
        ev.outcome = ErosionEvent::Outcome::NoOpRejected;
        ev.reject_reason = why;
        return ev;
    };

    std::vector<VertexId> mine = state.droplets[me].interface;
    if (opts.record_interfaces) ev.pre_interface = mine;
    if (!splice_around(state.surface, mine, p, q, wo.to))
        throw InvariantViolation("crossed edge missing from the firing interface");
    mine = cancel_spurs(std::move(mine));
    if (mine.size() < 4) return reject("capture degenerates the firing interface");
    if (auto why = validate_walk(state.surface, mine)) return reject("firing droplet: " + *why);

    const int32_t loser = ev.previous_owner;
    std::vector<VertexId> theirs;
    if (loser != kFree) {
        if (state.droplets[loser].cell_count <= 1)
            return reject("capture would annihilate the losing droplet");
        theirs = state.droplets[loser].interface;
        if (opts.record_interfaces) ev.pre_loser_interface = theirs;
        if (!splice_around(state.surface, theirs, p, q, wo.to))
            throw InvariantViolation("shared edge missing from the losing interface");
        theirs = cancel_spurs(std::move(theirs));
        if (theirs.size() < 4) return reject("capture degenerates the losing interface");
        if (auto why = validate_walk(state.surface, theirs))
            return reject("losing droplet: " + *why);
    }

    state.ownership.set(wo.to, me);
    state.droplets[me].interface = std::move(mine);
    state.droplets[me].cell_count += 1;
    if (loser != kFree) {
        state.droplets[loser].interface = std::move(theirs);
        state.droplets[loser].cell_count -= 1;
    }
    if (opts.record_interfaces) {
        ev.post_interface = state.droplets[me].interface;
        if (loser != kFree) ev.post_loser_interface = state.droplets[loser].interface;
    }
    ev.outcome = ErosionEvent::Outcome::Capture;
    return ev;
}

}  // namespace

OwnershipGrid::OwnershipGrid(const TiledSurface& surface) : torus_(surface.is_torus()) {
    if (torus_) {
        width_ = surface.width_cells;
        height_ = surface.height_cells;
        data_.assign(size_t(width_) * height_, kFree);
    } else {
        min_i_ = -16;
        min_j_ = -16;
        width_ = 32;
        height_ = 32;
        data_.assign(size_t(width_) * height_, kFree);
    }
}

void OwnershipGrid::set(CellId c, int32_t owner) {
    if (torus_) {
        data_[size_t(c.j) * width_ + c.i] = owner;
        return;
    }
    // Keep owned cells at least two cells away from the box edge so walks
    // never index outside.
    if (c.i < min_i_ + 2 || c.j < min_j_ + 2 || c.i >= min_i_ + width_ - 2 ||
        c.j >= min_j_ + height_ - 2)
        expand_to(c);
    data_[size_t(c.j - min_j_) * width_ + (c.i - min_i_)] = owner;
}

void OwnershipGrid::expand_to(CellId c) {
    int grow = std::max({64, width_ / 2, height_ / 2});
    int nmin_i = std::min(min_i_, c.i - grow);
    int nmin_j = std::min(min_j_, c.j - grow);
    int nmax_i = std::max(min_i_ + width_, c.i + grow);
    int nmax_j = std::max(min_j_ + height_, c.j + grow);
    int nw = nmax_i - nmin_i, nh = nmax_j - nmin_j;
    std::vector<int32_t> ndata(size_t(nw) * nh, kFree);
    for (int j = 0; j < height_; ++j)
        for (int i = 0; i < width_; ++i)
            ndata[size_t(j + min_j_ - nmin_j) * nw + (i + min_i_ - nmin_i)] =
                data_[size_t(j) * width_ + i];
    data_ = std::move(ndata);
    min_i_ = nmin_i;
    min_j_ = nmin_j;
    width_ = nw;
    height_ = nh;
}

bool ErosionState::is_source_cell(CellId c) const {
    for (const auto& s : sources)
        if (s.cell == c) return true;
    return false;
}

namespace {

// Boundary of a finite cell set as a directed closed walk with the interior
// on the left. At corner-touch vertices the leftmost turn keeps passages
// from crossing. Throws when the boundary has several components.
std::vector<VertexId> trace_boundary(const TiledSurface& s, const std::vector<CellId>& cells) {
    std::unordered_set<uint64_t> inset;
    for (const auto& c : cells) inset.insert(ckey(c));
    auto in_set = [&](int i, int j) { return inset.count(ckey(wrap_cell(s, i, j))) > 0; };

    // Directed boundary edges keyed by start vertex (slot = out direction).
    std::unordered_map<uint64_t, std::array<bool, 4>> out_edges;
    size_t edge_count = 0;
    auto add_edge = [&](VertexId from, int dir) {
        out_edges[vkey(from)][dir] = true;
        ++edge_count;
    };
    for (const auto& c : cells) {
        auto corners = cell_corners(s, c);
        if (!in_set(c.i, c.j - 1)) add_edge(corners[0], 0);  // bottom side, eastwards
        if (!in_set(c.i + 1, c.j)) add_edge(corners[1], 1);  // right side, northwards
        if (!in_set(c.i, c.j + 1)) add_edge(corners[2], 2);  // top side, westwards
        if (!in_set(c.i - 1, c.j)) add_edge(corners[3], 3);  // left side, southwards
    }

    // Start at the south-west extreme: its corner cannot be a touch vertex,
    // so the initial in/out pairing is unambiguous.
    const CellId* start_cell = nullptr;
    for (const auto& c : cells) {
        if (in_set(c.i, c.j - 1)) continue;
        if (!start_cell || c.j < start_cell->j || (c.j == start_cell->j && c.i < start_cell->i))
            start_cell = &c;
    }
    if (!start_cell) throw InvariantViolation("cell set has no exposed boundary");
    VertexId start = cell_corners(s, *start_cell)[0];

    std::vector<VertexId> walk;
    walk.reserve(edge_count);
    VertexId at = start;
    int incoming = 0;  // the first edge out of `start` is its eastward bottom side
    for (size_t used = 0; used < edge_count; ++used) {
        auto it = out_edges.find(vkey(at));
        if (it == out_edges.end())
            throw InvariantViolation("cell set boundary has several components");
        int dir = -1;
        // Leftmost turn first: +1 (left), 0 (straight), -1 (right).
        for (int turn : {1, 0, 3}) {
            int cand = (incoming + turn) % 4;
            if (it->second[cand]) {
                dir = cand;
                break;
            }
        }
        if (dir < 0) throw InvariantViolation("cell set boundary has several components");
        it->second[dir] = false;
        if (!it->second[0] && !it->second[1] && !it->second[2] && !it->second[3])
            out_edges.erase(it);
        walk.push_back(at);
        at = vstep(s, at, dir);
        incoming = dir;
    }
    if (!(at == start)) throw InvariantViolation("boundary trace did not close");
    return walk;
}

}  // namespace

ErosionState init_circles(const TiledSurface& surface, const std::vector<CircleSpec>& specs) {
    ErosionState state;
    state.surface = surface;
    state.ownership = OwnershipGrid(surface);

    std::vector<std::vector<CellId>> cellsets;
    for (const auto& spec : specs) {
        if (!(spec.radius > 0)) throw ParameterError("circle radius must be positive");
        std::vector<CellId> cells;
        int ic = int(std::floor((spec.center.real() - surface.origin.real()) / surface.mesh));
        int jc = int(std::floor((spec.center.imag() - surface.origin.imag()) / surface.mesh));
        int rad = int(std::ceil(spec.radius / surface.mesh)) + 1;
        for (int j = jc - rad; j <= jc + rad; ++j)
            for (int i = ic - rad; i <= ic + rad; ++i) {
                CellId c = wrap_cell(surface, i, j);
                if (std::abs(surface.cell_center(c) - spec.center) <= spec.radius)
                    cells.push_back(c);
            }
        if (surface.is_torus() && 2 * rad >= std::min(surface.width_cells, surface.height_cells))
            throw ParameterError("circle too large for the torus");
        cellsets.push_back(std::move(cells));
    }

    for (size_t d = 0; d < specs.size(); ++d) {
        for (const auto& c : cellsets[d]) {
            if (state.ownership.get(c) != kFree)
                throw OverlapError("discretized droplets overlap");
            state.ownership.set(c, int32_t(d));
        }
    }

    for (size_t d = 0; d < specs.size(); ++d) {
        DropletState droplet;
        droplet.cell_count = int64_t(cellsets[d].size());
        droplet.interface = trace_boundary(surface, cellsets[d]);
        for (const auto& atom : specs[d].divisor.atoms) {
            if (atom.point.is_infinity()) throw ParameterError("source points must be finite");
            CellId sc = cell_of_point(surface, atom.point.value());
            if (state.ownership.get(sc) != int32_t(d))
                throw SourceOutsideError("source cell not inside its droplet");
            droplet.source_cells.push_back(sc);
            droplet.source_rates.push_back(atom.weight);
            state.sources.push_back({int(d), sc, atom.weight});
        }
        state.droplets.push_back(std::move(droplet));
    }

    auto report = check_invariants(state);
    if (!report.ok) throw InvariantViolation("initial state invalid: " + report.violations.front());
    return state;
}

EventScheduler::EventScheduler(const ErosionState& state, ScheduleMode mode, uint64_t seed)
    : mode_(mode) {
    double n = 1.0 / state.surface.mesh;
    scale_ = n * n;
    size_t m = state.sources.size();
    if (m == 0) throw ParameterError("no sources");
    rates_.resize(m);
    next_time_.resize(m);
    counts_.assign(m, 0);
    for (size_t k = 0; k < m; ++k) {
        rates_[k] = state.sources[k].rate * scale_;
        streams_.emplace_back(seed, k);
    }
    for (size_t k = 0; k < m; ++k) {
        if (mode_ == ScheduleMode::RoundRobin) {
            counts_[k] = uint64_t(std::floor(state.clock * rates_[k])) + 1;
            next_time_[k] = double(counts_[k]) / rates_[k];
        } else {
            next_time_[k] = state.clock + streams_[k].exponential(rates_[k]);
        }
    }
}

std::pair<double, int> EventScheduler::next() {
    int best = 0;
    for (size_t k = 1; k < next_time_.size(); ++k)
        if (next_time_[k] < next_time_[best]) best = int(k);
    double t = next_time_[best];
    if (mode_ == ScheduleMode::RoundRobin) {
        counts_[best] += 1;
        next_time_[best] = double(counts_[best]) / rates_[best];
    } else {
        next_time_[best] = t + streams_[best].exponential(rates_[best]);
    }
    return {t, best};
}

ErosionEvent apply_event(ErosionState& state, int source, Rng& rng, const EventOptions& opts) {
    const SourceRef& src = state.sources.at(source);
    std::vector<CellId> record;
    WalkOutcome wo = random_walk_to_crossing(state, src.cell, src.droplet, rng,
                                             opts.max_walk_steps,
                                             opts.record_walk ? &record : nullptr);
    return process_capture(state, source, wo, opts, std::move(record));
}

ErosionEvent apply_event_scripted(ErosionState& state, int source, const std::vector<CellId>& walk,
                                  const EventOptions& opts) {
    const SourceRef& src = state.sources.at(source);
    if (walk.empty() || !(walk.front() == src.cell))
        throw ParameterError("scripted walk must start at the source cell");
    const int me = src.droplet;
    for (size_t k = 1; k < walk.size(); ++k) {
        auto nbrs = neighbors(state.surface, walk[k - 1]);
        if (std::find(nbrs.begin(), nbrs.end(), walk[k]) == nbrs.end())
            throw ParameterError("scripted walk steps must be adjacent");
        if (state.owner(walk[k]) != me) {
            std::vector<CellId> record(walk.begin(), walk.begin() + long(k) + 1);
            return process_capture(state, source, {walk[k - 1], walk[k], int64_t(k)}, opts,
                                   std::move(record));
        }
    }
    throw ParameterError("scripted walk never crosses the droplet interface");
}

std::pair<ErosionState, ErosionEvent> single_event(const ErosionState& state, int source, Rng& rng,
                                                   const EventOptions& opts) {
    ErosionState copy = state;
    ErosionEvent ev = apply_event(copy, source, rng, opts);
    return {std::move(copy), std::move(ev)};
}

std::vector<VertexId> remove_slits(const TiledSurface& surface, std::vector<VertexId> walk) {
    auto cleaned = cancel_spurs(std::move(walk));
    if (cleaned.size() < 4) throw EmptyInterfaceError("slit removal consumed the walk");
    if (auto why = validate_walk(surface, cleaned))
        throw InvariantViolation("slit removal left an invalid walk: " + *why);
    return cleaned;
}

std::vector<CellId> cells_from_walk(const TiledSurface& surface,
                                    const std::vector<VertexId>& walk) {
    size_t n = walk.size();
    if (n < 4) throw EmptyInterfaceError("walk too short");

    // Lift to the plane; on the torus the lift must close up (null-homotopy).
    std::vector<VertexId> lift(n);
    lift[0] = walk[0];
    for (size_t k = 1; k < n; ++k) {
        int d = vdir(surface, walk[k - 1], walk[k]);
        if (d < 0) throw InvariantViolation("walk steps not adjacent");
        lift[k] = {lift[k - 1].i + kVDx[d], lift[k - 1].j + kVDy[d]};
    }
    int dclose = vdir(surface, walk[n - 1], walk[0]);
    if (dclose < 0) throw InvariantViolation("walk does not close");
    VertexId end{lift[n - 1].i + kVDx[dclose], lift[n - 1].j + kVDy[dclose]};
    if (!(end == lift[0]))
        throw InvariantViolation("torus interface is not null-homotopic");

    // Row toggles from vertical edges, even-odd interior.
    std::map<int, std::vector<int>> rows;  // j -> edge x positions
    for (size_t k = 0; k < n; ++k) {
        VertexId a = lift[k], b = lift[(k + 1) % n];
        if (a.i == b.i) rows[std::min(a.j, b.j)].push_back(a.i);
    }
    std::vector<CellId> cells;
    for (auto& [j, xs] : rows) {
        std::sort(xs.begin(), xs.end());
        if (xs.size() % 2 != 0) throw InvariantViolation("odd crossing count in a row");
        for (size_t k = 0; k + 1 < xs.size(); k += 2)
            for (int i = xs[k]; i < xs[k + 1]; ++i) cells.push_back(wrap_cell(surface, i, j));
    }
    return cells;
}

InvariantReport check_invariants(const ErosionState& state) {
    InvariantReport report;
    auto fail = [&](const std::string& msg) {
        report.ok = false;
        report.violations.push_back(msg);
    };

    std::unordered_map<uint64_t, std::pair<int, int>> edge_users;  // key -> (droplet, count)
    for (size_t d = 0; d < state.droplets.size(); ++d) {
        const auto& walk = state.droplets[d].interface;
        std::string tag = "droplet " + std::to_string(d);
        if (auto why = validate_walk(state.surface, walk)) {
            fail(tag + ": " + *why);  // I1
            continue;
        }
        // I3 / duality: interior of the walk reproduces the ownership map.
        std::vector<CellId> cells;
        try {
            cells = cells_from_walk(state.surface, walk);
        } catch (const Error& e) {
            fail(tag + ": " + e.what());
            continue;
        }
        std::unordered_set<uint64_t> seen;
        for (const auto& c : cells)
            if (!seen.insert(ckey(c)).second) fail(tag + ": interior cell repeated (not embedded)");
        if (int64_t(cells.size()) != state.droplets[d].cell_count)
            fail(tag + ": interior size disagrees with the cell count");
        for (const auto& c : cells)
            if (state.owner(c) != int32_t(d)) fail(tag + ": interior cell not owned");
        // Positive orientation (interior on the left) via the lifted shoelace.
        {
            long long area2 = 0;
            long long x = 0, y = 0;
            size_t n = walk.size();
            for (size_t k = 0; k < n; ++k) {
                int dd = vdir(state.surface, walk[k], walk[(k + 1) % n]);
                long long nx = x + kVDx[dd], ny = y + kVDy[dd];
                area2 += x * ny - nx * y;
                x = nx;
                y = ny;
            }
            if (area2 <= 0) fail(tag + ": interface is not positively oriented");
        }
        // I4
        for (const auto& sc : state.droplets[d].source_cells)
            if (state.owner(sc) != int32_t(d)) fail(tag + ": source cell not owned");
        // I5 bookkeeping
        size_t n = walk.size();
        for (size_t k = 0; k < n; ++k) {
            uint64_t ek = edge_key(state.surface, walk[k], walk[(k + 1) % n]);
            auto [it, fresh] = edge_users.try_emplace(ek, std::make_pair(int(d), 1));
            if (!fresh) {
                if (it->second.first == int(d)) fail(tag + ": edge repeated within one droplet");
                it->second.second += 1;
                if (it->second.second > 2) fail("edge shared by more than two interfaces");
            }
        }
    }

    // I2: ownership counts must add up (droplets disjoint by map construction).
    // Verified through the per-droplet interior checks above.
    return report;
}

RunSummary run(ErosionState& state, double t_end, const RunOptions& opts,
               std::vector<Snapshot>* snapshots) {
    if (t_end < state.clock) throw ParameterError("t_end precedes the state clock");
    RunSummary summary;
    EventScheduler scheduler(state, opts.mode, opts.seed);
    std::vector<double> snap_times = opts.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    size_t snap_idx = 0;

    EventOptions ev_opts;
    for (;;) {
        auto [t, source] = scheduler.next();
        while (snapshots && snap_idx < snap_times.size() && snap_times[snap_idx] < t &&
               snap_times[snap_idx] <= t_end) {
            double st = snap_times[snap_idx++];
            double saved = state.clock;
            state.clock = st;
            snapshots->push_back({st, state});
            state.clock = saved;
        }
        if (t > t_end) break;
        state.clock = t;
        ErosionEvent ev = apply_event(state, source, scheduler.stream(source), ev_opts);
        summary.events += 1;
        switch (ev.outcome) {
            case ErosionEvent::Outcome::Capture: summary.captures += 1; break;
            case ErosionEvent::Outcome::NoOpSource: summary.noop_source += 1; break;
            case ErosionEvent::Outcome::NoOpRejected: summary.noop_rejected += 1; break;
        }
        if (opts.event_sink) opts.event_sink(ev);
        if (opts.check_invariants_every &&
            summary.events % opts.check_invariants_every == 0) {
            summary.invariant_checks += 1;
            auto rep = check_invariants(state);
            if (!rep.ok) {
                std::ostringstream replay;
                replay << "event " << summary.events << " source " << ev.source << " end ("
                       << ev.end_cell.i << "," << ev.end_cell.j << ")";
                throw InvariantViolation(rep.violations.front(), replay.str());
            }
        }
    }
    while (snapshots && snap_idx < snap_times.size() && snap_times[snap_idx] <= t_end) {
        double st = snap_times[snap_idx++];
        double saved = state.clock;
        state.clock = st;
        snapshots->push_back({st, state});
        state.clock = saved;
    }
    state.clock = t_end;
    return summary;
}

DiscreteEnergyReport discrete_energy(const ErosionState& state) {
    DiscreteEnergyReport report;
    for (size_t d = 0; d < state.droplets.size(); ++d) {
        const auto& droplet = state.droplets[d];
        std::vector<CellId> cells = cells_from_walk(state.surface, droplet.interface);
        std::sort(cells.begin(), cells.end(), [](CellId a, CellId b) {
            return a.j != b.j ? a.j < b.j : a.i < b.i;
        });
        std::unordered_map<uint64_t, int> index;
        for (size_t k = 0; k < cells.size(); ++k) index[ckey(cells[k])] = int(k);
        const int n = int(cells.size());
        if (n == 0) throw SolveError("empty droplet");

        Eigen::SparseMatrix<double> m(n, n);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(size_t(n) * 5);
        for (int k = 0; k < n; ++k) {
            trip.emplace_back(k, k, 1.0);
            for (const auto& nb : neighbors(state.surface, cells[k])) {
                auto it = index.find(ckey(nb));
                if (it != index.end()) trip.emplace_back(k, it->second, -0.25);
            }
        }
        m.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(m);
        if (solver.info() != Eigen::Success) throw SolveError("killed-walk system is singular");

        // One solve per distinct source cell.
        std::unordered_map<uint64_t, Eigen::VectorXd> columns;
        for (const auto& sc : droplet.source_cells) {
            uint64_t key = ckey(sc);
            if (columns.count(key)) continue;
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
            rhs[index.at(key)] = 1.0;
            columns[key] = solver.solve(rhs);
        }
        double energy = 0.0;
        for (size_t j = 0; j < droplet.source_cells.size(); ++j)
            for (size_t k = 0; k < droplet.source_cells.size(); ++k) {
                const auto& col = columns.at(ckey(droplet.source_cells[k]));
                energy += droplet.source_rates[j] * droplet.source_rates[k] *
                          col[index.at(ckey(droplet.source_cells[j]))];
            }
        report.droplets.push_back({int(d), energy, droplet.cell_count});
        report.total += energy;
    }
    return report;
}

}  // namespace hslab
