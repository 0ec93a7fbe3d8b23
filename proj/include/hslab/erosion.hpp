#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hslab/lattice.hpp"

namespace hslab {

inline constexpr int32_t kFree = -1;

// Cell ownership backed by a dense grid: fixed-size on the torus, an
// auto-expanding offset box on the plane. Unset plane cells read as Free.
class OwnershipGrid {
public:
    OwnershipGrid() = default;
    explicit OwnershipGrid(const TiledSurface& surface);

    int32_t get(CellId c) const {
        if (torus_) return data_[size_t(c.j) * width_ + c.i];
        if (c.i < min_i_ || c.j < min_j_ || c.i >= min_i_ + width_ || c.j >= min_j_ + height_)
            return kFree;
        return data_[size_t(c.j - min_j_) * width_ + (c.i - min_i_)];
    }
    void set(CellId c, int32_t owner);

    bool is_torus() const { return torus_; }
    // Raw access for the walk inner loop.
    const int32_t* data() const { return data_.data(); }
    int min_i() const { return min_i_; }
    int min_j() const { return min_j_; }
    int width() const { return width_; }
    int height() const { return height_; }

private:
    void expand_to(CellId c);
    bool torus_ = false;
    int min_i_ = 0, min_j_ = 0;
    int width_ = 0, height_ = 0;
    std::vector<int32_t> data_;
};

struct DropletState {
    std::vector<VertexId> interface;  // directed closed walk, interior on the left
    std::vector<CellId> source_cells;
    std::vector<double> source_rates;
    int64_t cell_count = 0;
};

// Flattened source table; the flat index is the scheduler's lexicographic
// (droplet, source) order and the rng stream id.
struct SourceRef {
    int droplet;
    CellId cell;
    double rate;
};

struct ErosionState {
    TiledSurface surface;
    OwnershipGrid ownership;
    std::vector<DropletState> droplets;
    std::vector<SourceRef> sources;
    double clock = 0.0;  // macroscopic time (N^2 events per unit rate per unit time)

    int32_t owner(CellId c) const { return ownership.get(c); }
    bool is_source_cell(CellId c) const;
};

struct CircleSpec {
    Cplx center;
    double radius;
    WeightedDivisor divisor;
};

// Discretize circles into cell sets, trace their boundary walks, and verify
// admissibility (disjoint droplets, sources inside).
ErosionState init_circles(const TiledSurface& surface, const std::vector<CircleSpec>& specs);

enum class ScheduleMode { PoissonClocks, RoundRobin };

// Event schedule over the flattened sources. Rates are scaled by N^2
// (N = 1/mesh) so that `time` is macroscopic. RoundRobin fires source k at
// times m / (rate_k N^2) with lexicographic tie-breaking; PoissonClocks
// draws exponential gaps from each source's own rng stream.
class EventScheduler {
public:
    EventScheduler(const ErosionState& state, ScheduleMode mode, uint64_t seed);
    // Next (time, flat source index); advances the schedule.
    std::pair<double, int> next();
    Rng& stream(int source) { return streams_[source]; }

private:
    ScheduleMode mode_;
    double scale_;  // N^2
    std::vector<double> rates_;
    std::vector<double> next_time_;
    std::vector<uint64_t> counts_;
    std::vector<Rng> streams_;
};

struct ErosionEvent {
    enum class Outcome { Capture, NoOpSource, NoOpRejected };
    double time = 0.0;
    int source = -1;
    int64_t walk_length = 0;
    Outcome outcome = Outcome::Capture;
    CellId end_cell{};
    int32_t previous_owner = kFree;
    std::string reject_reason;
    std::vector<CellId> walk;  // recorded when requested
    std::vector<VertexId> pre_interface, post_interface;          // firing droplet
    std::vector<VertexId> pre_loser_interface, post_loser_interface;
};

struct EventOptions {
    bool record_walk = false;
    bool record_interfaces = false;
    int64_t max_walk_steps = 1'000'000'000;
};

// One clock ring of the given source: walk until the first crossing of the
// firing droplet's own interface, then capture the end square with interface
// rerouting and slit removal. Captures that would break the single-interface
// topology (merge a droplet across a channel, disconnect or annihilate the
// loser, evict a source) are rejected as logged no-ops.
ErosionEvent apply_event(ErosionState& state, int source, Rng& rng, const EventOptions& opts = {});

// Same, with the walk replaced by a prescribed cell sequence (replay and
// golden-fixture path). The sequence must start at the source cell.
ErosionEvent apply_event_scripted(ErosionState& state, int source, const std::vector<CellId>& walk,
                                  const EventOptions& opts = {});

// Copying wrapper over apply_event.
std::pair<ErosionState, ErosionEvent> single_event(const ErosionState& state, int source, Rng& rng,
                                                   const EventOptions& opts = {});

// Deletes adjacent back-and-forth edge pairs (v -> w -> v) to a fixed point.
// Throws EmptyInterfaceError when cancellation consumes the whole walk and
// InvariantViolation when the result still crosses itself.
std::vector<VertexId> remove_slits(const TiledSurface& surface, std::vector<VertexId> walk);

struct InvariantReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// Full I1-I5 plus ownership/interface duality check.
InvariantReport check_invariants(const ErosionState& state);

struct RunSummary {
    uint64_t events = 0;
    uint64_t captures = 0;
    uint64_t noop_source = 0;
    uint64_t noop_rejected = 0;
    uint64_t invariant_checks = 0;
};

struct RunOptions {
    ScheduleMode mode = ScheduleMode::PoissonClocks;
    uint64_t seed = 1;
    std::vector<double> snapshot_times;
    uint64_t check_invariants_every = 0;  // 0: never
    std::function<void(const ErosionEvent&)> event_sink;
};

struct Snapshot {
    double time;
    ErosionState state;
};

// Apply events in time order until t_end (macroscopic). Snapshots capture the
// state after the last event at or before each requested time.
RunSummary run(ErosionState& state, double t_end, const RunOptions& opts,
               std::vector<Snapshot>* snapshots = nullptr);

struct DiscreteEnergyReport {
    struct PerDroplet {
        int droplet;
        double energy;
        int64_t cells;
    };
    std::vector<PerDroplet> droplets;
    double total = 0.0;
};

// Killed-random-walk Green's energy: per droplet, solve (I - Q) g = e_source
// on its cells (killing on crossing the interface) and assemble
// sum_{j != k} a_j a_k G(z_j, z_k) + sum_j a_j^2 G(z_j, z_j). The diagonal
// replaces the reduced modulus up to a mesh-dependent additive constant, so
// cross-state comparisons are reported alongside droplet sizes.
DiscreteEnergyReport discrete_energy(const ErosionState& state);

// Interior cells of a directed closed walk (even-odd rule; on the torus the
// walk is lifted to the plane first and must be null-homotopic).
std::vector<CellId> cells_from_walk(const TiledSurface& surface, const std::vector<VertexId>& walk);

}  // namespace hslab
