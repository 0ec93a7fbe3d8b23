#include "hslab/erosion.hpp"

#include <doctest.h>

#include "hslab/serialize.hpp"

using namespace hslab;

namespace {

WeightedDivisor source_at(Cplx p, double w) {
    WeightedDivisor d;
    d.add(SpherePoint(p), w);
    return d;
}

// Two single-cell droplets on a 6x6 unit-mesh torus, sources on the cells.
ErosionState tiny_torus_state() {
    TiledSurface torus = TiledSurface::torus(6, 6, 1.0);
    std::vector<CircleSpec> specs;
    specs.push_back({torus.cell_center({2, 2}), 0.3, source_at(torus.cell_center({2, 2}), 1.0)});
    specs.push_back({torus.cell_center({4, 4}), 0.3, source_at(torus.cell_center({4, 4}), 1.0)});
    return init_circles(torus, specs);
}

std::vector<CircleSpec> fig8_specs() {
    std::vector<CircleSpec> specs;
    specs.push_back({Cplx(0.0), 0.2, source_at(Cplx(0.0), 2.0)});
    specs.push_back({Cplx(1.0, 0.0), 0.2, source_at(Cplx(1.0, 0.0), 1.0)});
    return specs;
}

ErosionState fig8_state(double mesh = 1.0 / 20.0) {
    return init_circles(TiledSurface::plane(mesh), fig8_specs());
}

ErosionState fig9_state(double mesh = 1.0 / 40.0) {
    int n = int(std::lround(2.0 / mesh));
    TiledSurface torus = TiledSurface::torus(n, n, mesh, Cplx(-0.5, -1.0));
    std::vector<CircleSpec> specs;
    specs.push_back({Cplx(0.0), 0.2, source_at(Cplx(0.0), 2.0)});
    specs.push_back({Cplx(1.0, 0.0), 0.2, source_at(Cplx(1.0, 0.0), 1.0)});
    return init_circles(torus, specs);
}

}  // namespace

TEST_CASE("init_circles produces valid admissible states") {
    ErosionState fig8 = fig8_state();
    CHECK(fig8.droplets.size() == 2);
    CHECK(check_invariants(fig8).ok);
    // Mesh 1/20, radius 0.2: the discretized disc holds ~ pi r^2 N^2 cells.
    CHECK(fig8.droplets[0].cell_count > 30);
    CHECK(fig8.droplets[0].cell_count < 70);
    CHECK(fig8.sources[0].cell == CellId{-1, -1});
    CHECK(fig8.sources[1].cell == CellId{19, -1});

    ErosionState fig9 = fig9_state();
    CHECK(check_invariants(fig9).ok);
    CHECK(fig9.sources[0].cell == CellId{19, 39});
    CHECK(fig9.sources[1].cell == CellId{59, 39});

    ErosionState tiny = tiny_torus_state();
    CHECK(tiny.droplets[0].cell_count == 1);
    CHECK(check_invariants(tiny).ok);

    // Overlapping circles are rejected.
    std::vector<CircleSpec> overlap;
    overlap.push_back({Cplx(0.0), 0.3, source_at(Cplx(0.0), 1.0)});
    overlap.push_back({Cplx(0.2, 0.0), 0.3, source_at(Cplx(0.2, 0.0), 1.0)});
    CHECK_THROWS_AS(init_circles(TiledSurface::plane(1.0 / 20.0), overlap), OverlapError);

    std::vector<CircleSpec> outside;
    outside.push_back({Cplx(0.0), 0.2, source_at(Cplx(0.9, 0.0), 1.0)});
    CHECK_THROWS_AS(init_circles(TiledSurface::plane(1.0 / 20.0), outside), SourceOutsideError);
}

TEST_CASE("round-robin schedule fires lexicographically at ties") {
    ErosionState state = tiny_torus_state();
    state.sources[0].rate = 2.0;
    state.sources[1].rate = 1.0;
    EventScheduler sched(state, ScheduleMode::RoundRobin, 1);
    std::vector<std::pair<double, int>> seq;
    for (int k = 0; k < 6; ++k) seq.push_back(sched.next());
    std::vector<std::pair<double, int>> expect{
        {0.5, 0}, {1.0, 0}, {1.0, 1}, {1.5, 0}, {2.0, 0}, {2.0, 1}};
    CHECK(seq == expect);
}

TEST_CASE("poisson clocks have the right statistics") {
    ErosionState state = tiny_torus_state();
    // Single source: inter-event times with empirical mean 1/a.
    state.sources.resize(1);
    state.sources[0].rate = 2.5;
    EventScheduler sched(state, ScheduleMode::PoissonClocks, 3);
    double prev = 0.0, sum = 0.0;
    const int n = 100'000;
    for (int k = 0; k < n; ++k) {
        auto [t, s] = sched.next();
        sum += t - prev;
        prev = t;
    }
    double mean = sum / n;
    double sigma = (1.0 / 2.5) / std::sqrt(double(n));
    CHECK(std::abs(mean - 1.0 / 2.5) < 3.0 * sigma);

    // Two sources superpose to rate a + b.
    ErosionState state2 = tiny_torus_state();
    state2.sources[0].rate = 2.0;
    state2.sources[1].rate = 1.0;
    EventScheduler sched2(state2, ScheduleMode::PoissonClocks, 4);
    double t = 0.0;
    int count = 0;
    while (true) {
        auto [tt, s] = sched2.next();
        if (tt > 100.0) break;
        t = tt;
        ++count;
    }
    (void)t;
    CHECK(std::abs(count - 300.0) < 4.0 * std::sqrt(300.0));
}

TEST_CASE("scripted event ending on a source square is a no-op") {
    TiledSurface torus = TiledSurface::torus(6, 6, 1.0);
    std::vector<CircleSpec> specs;
    specs.push_back({torus.cell_center({2, 2}), 0.3, source_at(torus.cell_center({2, 2}), 1.0)});
    specs.push_back({torus.cell_center({3, 2}), 0.3, source_at(torus.cell_center({3, 2}), 1.0)});
    ErosionState state = init_circles(torus, specs);
    std::string before = snapshot_to_json(state).dump();
    ErosionEvent ev = apply_event_scripted(state, 0, {{2, 2}, {3, 2}});
    CHECK(ev.outcome == ErosionEvent::Outcome::NoOpSource);
    CHECK(snapshot_to_json(state).dump() == before);
}

TEST_CASE("golden fixture: one-step capture of a free cell on the 6x6 torus") {
    ErosionState state = tiny_torus_state();
    std::vector<VertexId> pre{{2, 2}, {3, 2}, {3, 3}, {2, 3}};
    CHECK(state.droplets[0].interface == pre);
    ErosionEvent ev = apply_event_scripted(state, 0, {{2, 2}, {3, 2}});
    CHECK(ev.outcome == ErosionEvent::Outcome::Capture);
    CHECK(ev.previous_owner == kFree);
    // Hand-derived reroute: the interface bulges around the captured square.
    std::vector<VertexId> post{{2, 2}, {3, 2}, {4, 2}, {4, 3}, {3, 3}, {2, 3}};
    CHECK(state.droplets[0].interface == post);
    CHECK(state.droplets[0].cell_count == 2);
    CHECK(state.owner({3, 2}) == 0);
    CHECK(check_invariants(state).ok);
}

TEST_CASE("golden fixture: capture with slit removal on the losing droplet") {
    TiledSurface torus = TiledSurface::torus(8, 8, 1.0);
    std::vector<CircleSpec> specs;
    specs.push_back({torus.cell_center({3, 5}), 0.3, source_at(torus.cell_center({3, 5}), 1.0)});
    specs.push_back({torus.cell_center({4, 4}), 0.3, source_at(torus.cell_center({4, 4}), 1.0)});
    ErosionState state = init_circles(torus, specs);
    // Grow droplet 1 into the vertical domino (4,4)+(4,5).
    REQUIRE(apply_event_scripted(state, 1, {{4, 4}, {4, 5}}).outcome ==
            ErosionEvent::Outcome::Capture);
    REQUIRE(state.droplets[1].cell_count == 2);
    std::vector<VertexId> pre_loser{{4, 4}, {5, 4}, {5, 5}, {5, 6}, {4, 6}, {4, 5}};
    CHECK(state.droplets[1].interface == pre_loser);

    ErosionEvent ev = apply_event_scripted(state, 0, {{3, 5}, {4, 5}});
    CHECK(ev.outcome == ErosionEvent::Outcome::Capture);
    CHECK(ev.previous_owner == 1);
    // The loser's spur cancels down to the unit square around (4,4):
    // interface shortened by 2 edges.
    std::vector<VertexId> post_loser{{4, 4}, {5, 4}, {5, 5}, {4, 5}};
    CHECK(state.droplets[1].interface == post_loser);
    std::vector<VertexId> post_winner{{3, 5}, {4, 5}, {5, 5}, {5, 6}, {4, 6}, {3, 6}};
    CHECK(state.droplets[0].interface == post_winner);
    CHECK(check_invariants(state).ok);
}

TEST_CASE("remove_slits handles spurs, nesting, and fixed points") {
    TiledSurface plane = TiledSurface::plane(1.0);
    std::vector<VertexId> spur{{0, 0}, {1, 0}, {1, 1}, {2, 1}, {1, 1}, {0, 1}};
    auto cleaned = remove_slits(plane, spur);
    std::vector<VertexId> expect{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(cleaned == expect);

    std::vector<VertexId> nested{{0, 0}, {1, 0}, {1, 1}, {2, 1}, {3, 1}, {2, 1}, {1, 1}, {0, 1}};
    CHECK(remove_slits(plane, nested) == expect);

    CHECK(remove_slits(plane, expect) == expect);

    std::vector<VertexId> all_slit{{0, 0}, {1, 0}};
    CHECK_THROWS_AS(remove_slits(plane, all_slit), EmptyInterfaceError);
}

TEST_CASE("source squares protect droplets from annihilation") {
    TiledSurface torus = TiledSurface::torus(6, 6, 1.0);
    std::vector<CircleSpec> specs;
    specs.push_back({torus.cell_center({2, 2}), 0.3, source_at(torus.cell_center({2, 2}), 1.0)});
    specs.push_back({torus.cell_center({4, 2}), 0.3, source_at(torus.cell_center({4, 2}), 1.0)});
    ErosionState state = init_circles(torus, specs);
    ErosionEvent grow = apply_event_scripted(state, 0, {{2, 2}, {2, 3}});
    CHECK(grow.outcome == ErosionEvent::Outcome::Capture);
    // Droplet 1 marches over and takes droplet 0's non-source cell.
    CHECK(apply_event_scripted(state, 1, {{4, 2}, {3, 2}}).outcome ==
          ErosionEvent::Outcome::Capture);
    CHECK(apply_event_scripted(state, 1, {{4, 2}, {3, 2}, {3, 3}}).outcome ==
          ErosionEvent::Outcome::Capture);
    ErosionEvent take = apply_event_scripted(state, 1, {{4, 2}, {3, 2}, {3, 3}, {2, 3}});
    CHECK(take.outcome == ErosionEvent::Outcome::Capture);
    CHECK(take.previous_owner == 0);
    CHECK(state.droplets[0].cell_count == 1);
    // A droplet's last cell always carries its source, so the event that
    // would annihilate it ends on a source square and is a no-op.
    ErosionEvent last = apply_event_scripted(state, 1, {{4, 2}, {3, 2}, {2, 2}});
    CHECK(last.outcome == ErosionEvent::Outcome::NoOpSource);
    CHECK(state.droplets[0].cell_count == 1);
    CHECK(check_invariants(state).ok);
}

TEST_CASE("channel-merge captures are rejected as no-ops") {
    // One droplet owns two arms separated by a one-cell free channel; a
    // capture of the middle channel cell would force the interface through
    // the same edge twice, so it must be rejected and leave the state alone.
    TiledSurface torus = TiledSurface::torus(12, 12, 1.0);
    std::vector<CircleSpec> specs;
    specs.push_back({torus.cell_center({4, 4}), 0.3, source_at(torus.cell_center({4, 4}), 1.0)});
    ErosionState state = init_circles(torus, specs);
    // Grow an U-shape around the free cell (5,5): arms (4,4..6) and (6,4..6)
    // plus the bottom (5,4).
    for (auto cell : std::vector<CellId>{{4, 5}, {4, 6}, {5, 4}, {6, 4}, {6, 5}, {6, 6}}) {
        // Script a walk along owned cells to the target.
        std::vector<CellId> walk{{4, 4}};
        // Simple manual paths within the growing droplet.
        if (cell == CellId{4, 5}) walk = {{4, 4}, {4, 5}};
        if (cell == CellId{4, 6}) walk = {{4, 4}, {4, 5}, {4, 6}};
        if (cell == CellId{5, 4}) walk = {{4, 4}, {5, 4}};
        if (cell == CellId{6, 4}) walk = {{4, 4}, {5, 4}, {6, 4}};
        if (cell == CellId{6, 5}) walk = {{4, 4}, {5, 4}, {6, 4}, {6, 5}};
        if (cell == CellId{6, 6}) walk = {{4, 4}, {5, 4}, {6, 4}, {6, 5}, {6, 6}};
        ErosionEvent ev = apply_event_scripted(state, 0, walk);
        REQUIRE(ev.outcome == ErosionEvent::Outcome::Capture);
    }
    REQUIRE(check_invariants(state).ok);
    std::string before = snapshot_to_json(state).dump();
    // Capturing (5,6) would trap the free cell (5,5) as a hole: the bulge
    // traverses an arm boundary edge a second time, non-adjacently, so the
    // event is rejected and the state untouched.
    ErosionEvent pinch = apply_event_scripted(state, 0, {{4, 4}, {4, 5}, {4, 6}, {5, 6}});
    CHECK(pinch.outcome == ErosionEvent::Outcome::NoOpRejected);
    CHECK(snapshot_to_json(state).dump() == before);
    CHECK(check_invariants(state).ok);
    // The channel bottom (5,5) merges the arms without trapping anything:
    // the doubled edges cancel as cascaded spurs and the capture stands.
    ErosionEvent bottom = apply_event_scripted(state, 0, {{4, 4}, {4, 5}, {5, 5}});
    CHECK(bottom.outcome == ErosionEvent::Outcome::Capture);
    CHECK(check_invariants(state).ok);
    // Now (5,6) is the channel's only free cell, still open at the top.
    ErosionEvent top = apply_event_scripted(state, 0, {{4, 4}, {4, 5}, {4, 6}, {5, 6}});
    CHECK(top.outcome == ErosionEvent::Outcome::Capture);
    CHECK(check_invariants(state).ok);
}

TEST_CASE("runs are deterministic and respect the event budget") {
    // Round-robin, rate 2 source, mesh 1/5: exactly floor(2 * 25) events
    // by t = 1 under the N^2 scaling.
    TiledSurface plane = TiledSurface::plane(0.2);
    std::vector<CircleSpec> specs;
    specs.push_back({Cplx(0.0), 0.45, source_at(Cplx(0.0), 2.0)});
    ErosionState state = init_circles(plane, specs);
    RunOptions opts;
    opts.mode = ScheduleMode::RoundRobin;
    opts.seed = 5;
    RunSummary summary = run(state, 1.0, opts);
    CHECK(summary.events == 50);

    // Identical seeds give bit-identical snapshot streams.
    auto run_once = [](uint64_t seed) {
        ErosionState st = fig8_state(1.0 / 10.0);
        RunOptions ro;
        ro.mode = ScheduleMode::PoissonClocks;
        ro.seed = seed;
        ro.snapshot_times = {0.5, 1.0};
        std::vector<Snapshot> snaps;
        run(st, 1.0, ro, &snaps);
        std::string out;
        for (const auto& s : snaps) out += snapshot_to_json(s.state).dump();
        return out;
    };
    CHECK(run_once(42) == run_once(42));
    CHECK(run_once(42) != run_once(43));
}

TEST_CASE("invariants hold along short runs of the reference setups") {
    for (bool torus : {false, true}) {
        ErosionState state = torus ? fig9_state(1.0 / 20.0) : fig8_state();
        RunOptions opts;
        opts.mode = ScheduleMode::PoissonClocks;
        opts.seed = 11;
        opts.check_invariants_every = 100;
        int64_t captures[2] = {0, 0}, losses[2] = {0, 0};
        int64_t init[2] = {state.droplets[0].cell_count, state.droplets[1].cell_count};
        opts.event_sink = [&](const ErosionEvent& ev) {
            if (ev.outcome == ErosionEvent::Outcome::Capture) {
                ++captures[ev.source];  // one source per droplet here
                if (ev.previous_owner >= 0) ++losses[ev.previous_owner];
            }
        };
        double t_end = 1000.0 / (3.0 * 400.0);
        RunSummary summary = run(state, t_end, opts);
        CHECK(summary.events >= 990);
        CHECK(check_invariants(state).ok);
        // Exact bookkeeping: growth is own captures minus cells lost to the
        // other droplet; in particular a droplet never shrinks on its own event.
        for (int d = 0; d < 2; ++d)
            CHECK(state.droplets[d].cell_count == init[d] + captures[d] - losses[d]);
    }
}

TEST_CASE("ownership-interface duality is exact after events") {
    ErosionState state = fig8_state(1.0 / 10.0);
    RunOptions opts;
    opts.seed = 17;
    run(state, 3.0, opts);
    for (size_t d = 0; d < state.droplets.size(); ++d) {
        auto cells = cells_from_walk(state.surface, state.droplets[d].interface);
        CHECK(int64_t(cells.size()) == state.droplets[d].cell_count);
        for (const auto& c : cells) CHECK(state.owner(c) == int32_t(d));
    }
}

TEST_CASE("discrete energy: absorbing chains solved by hand") {
    // Single-cell droplet, weight a: the only visit is the start, G = 1.
    TiledSurface torus = TiledSurface::torus(6, 6, 1.0);
    std::vector<CircleSpec> one;
    one.push_back({torus.cell_center({2, 2}), 0.3, source_at(torus.cell_center({2, 2}), 3.0)});
    ErosionState s1 = init_circles(torus, one);
    DiscreteEnergyReport r1 = discrete_energy(s1);
    CHECK(r1.total == doctest::Approx(9.0).epsilon(1e-12));

    // 3x3 square, source at the centre, weight 1: G(centre,centre) = 3/2
    // from the 9-state absorbing chain.
    TiledSurface plane = TiledSurface::plane(1.0);
    std::vector<CircleSpec> nine;
    nine.push_back({plane.cell_center({1, 1}), 1.45, source_at(plane.cell_center({1, 1}), 1.0)});
    ErosionState s9 = init_circles(plane, nine);
    REQUIRE(s9.droplets[0].cell_count == 9);
    DiscreteEnergyReport r9 = discrete_energy(s9);
    CHECK(r9.total == doctest::Approx(1.5).epsilon(1e-12));

    // Quadratic homogeneity: doubling all weights scales the energy by 4.
    std::vector<CircleSpec> nine2 = nine;
    nine2[0].divisor = source_at(plane.cell_center({1, 1}), 2.0);
    ErosionState s9b = init_circles(plane, nine2);
    CHECK(discrete_energy(s9b).total == doctest::Approx(4.0 * r9.total).epsilon(1e-12));
}

TEST_CASE("snapshot serialization round-trips") {
    ErosionState state = fig8_state(1.0 / 10.0);
    RunOptions opts;
    opts.seed = 23;
    run(state, 1.0, opts);
    Json j = snapshot_to_json(state);
    ErosionState back = snapshot_from_json(j);
    CHECK(snapshot_to_json(back).dump() == j.dump());
    CHECK(check_invariants(back).ok);
}
