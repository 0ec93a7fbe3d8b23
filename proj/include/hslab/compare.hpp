#pragma once

#include <optional>
#include <string>

#include "hslab/erosion.hpp"
#include "hslab/path_curve.hpp"

namespace hslab {

// Symmetric Hausdorff distance between densely resampled polylines; the
// resampling step is the minimum segment length of either curve and
// distances are measured point-to-segment.
double hausdorff(const PathCurve& a, const PathCurve& b);

// Hausdorff minimized over the torus deck group (integer translations of
// the fundamental domain).
double hausdorff_torus(const PathCurve& a, const PathCurve& b, double period_x, double period_y);

// Interface vertex cycle of a droplet in continuum coordinates. On the
// torus the walk is lifted to the plane (unrolled across the cuts).
PathCurve lattice_interface_to_curve(const ErosionState& state, int droplet);

struct ConvergenceConfig {
    std::vector<double> meshes;
    std::vector<uint64_t> seeds;
    double t_end = 1.0;
    ScheduleMode mode = ScheduleMode::PoissonClocks;
    // Initial condition builder inputs (plane or torus circles).
    bool torus = false;
    Cplx torus_origin{0.0};
    double torus_width = 0.0, torus_height = 0.0;
    std::vector<CircleSpec> circles;
    int compare_droplet = 1;
    std::optional<PathCurve> target;         // continuum curve, when available
    std::vector<double> stabilization_times; // pairs (t, 2t) both simulated when set
    int threads = 0;                         // 0: HSLAB_THREADS or hardware
};

struct ComparisonRow {
    double mesh;
    std::vector<uint64_t> seeds;
    std::vector<double> distances;       // vs target, per seed (empty if no target)
    std::vector<double> stabilization;   // per seed: hausdorff(interface(t), interface(2t))
    double median = 0.0, q1 = 0.0, q3 = 0.0;
    std::vector<int64_t> cell_counts;    // per seed, droplet order flattened
};

struct ComparisonReport {
    ConvergenceConfig config;
    std::vector<ComparisonRow> rows;
};

// Fan (mesh, seed) cells out to a worker pool, run erosion to t_end, compare
// against the target, and reduce in deterministic (mesh, seed) order.
ComparisonReport convergence_study(const ConvergenceConfig& config);

double median_of(std::vector<double> values);
double quartile_of(std::vector<double> values, double q);

// Worker-pool size: explicit override, else HSLAB_THREADS, else hardware.
int resolve_threads(int requested);

}  // namespace hslab
