#include "hslab/compare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace hslab {

namespace {

double directed_hausdorff(const std::vector<Cplx>& samples, const PathCurve& target) {
    double worst = 0.0;
    for (const auto& p : samples) worst = std::max(worst, point_curve_distance(p, target));
    return worst;
}

double min_segment_length(const PathCurve& c) {
    double m = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < c.segment_count(); ++k)
        m = std::min(m, std::abs(c.segment_end(k) - c.segment_start(k)));
    return m;
}

}  // namespace

double hausdorff(const PathCurve& a, const PathCurve& b) {
    if (a.points.empty() || b.points.empty()) throw EmptyCurveError("hausdorff of an empty curve");
    double step = std::min(min_segment_length(a), min_segment_length(b));
    if (!std::isfinite(step) || step <= 0) step = 1e-3;
    auto sa = resample(a, step);
    auto sb = resample(b, step);
    return std::max(directed_hausdorff(sa, b), directed_hausdorff(sb, a));
}

double hausdorff_torus(const PathCurve& a, const PathCurve& b, double period_x, double period_y) {
    double best = std::numeric_limits<double>::infinity();
    for (int kx = -2; kx <= 2; ++kx)
        for (int ky = -2; ky <= 2; ++ky) {
            PathCurve shifted = b;
            Cplx delta(kx * period_x, ky * period_y);
            for (auto& p : shifted.points) p += delta;
            best = std::min(best, hausdorff(a, shifted));
        }
    return best;
}

PathCurve lattice_interface_to_curve(const ErosionState& state, int droplet) {
    if (droplet < 0 || size_t(droplet) >= state.droplets.size())
        throw MissingDropletError("no such droplet");
    const auto& walk = state.droplets[droplet].interface;
    const TiledSurface& s = state.surface;
    PathCurve out;
    out.closed = true;
    out.points.reserve(walk.size());
    if (!s.is_torus()) {
        for (const auto& v : walk) out.points.push_back(s.vertex_point(v));
        return out;
    }
    // Lift across the torus cuts so the polyline is an honest closed curve.
    int x = walk[0].i, y = walk[0].j;
    out.points.push_back(s.origin + s.mesh * Cplx(x, y));
    for (size_t k = 1; k < walk.size(); ++k) {
        int di = walk[k].i - walk[k - 1].i;
        int dj = walk[k].j - walk[k - 1].j;
        if (di > 1) di -= s.width_cells;
        if (di < -1) di += s.width_cells;
        if (dj > 1) dj -= s.height_cells;
        if (dj < -1) dj += s.height_cells;
        x += di;
        y += dj;
        out.points.push_back(s.origin + s.mesh * Cplx(x, y));
    }
    return out;
}

double median_of(std::vector<double> values) { return quartile_of(std::move(values), 0.5); }

double quartile_of(std::vector<double> values, double q) {
    if (values.empty()) throw ParameterError("quartile of an empty sample");
    std::sort(values.begin(), values.end());
    double pos = q * double(values.size() - 1);
    size_t lo = size_t(std::floor(pos));
    size_t hi = size_t(std::ceil(pos));
    double frac = pos - double(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HSLAB_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

namespace {

struct CellResult {
    std::optional<double> distance;
    std::optional<double> stabilization;
    std::vector<int64_t> cell_counts;
};

TiledSurface make_surface(const ConvergenceConfig& cfg, double mesh) {
    if (!cfg.torus) return TiledSurface::plane(mesh);
    int w = int(std::lround(cfg.torus_width / mesh));
    int h = int(std::lround(cfg.torus_height / mesh));
    return TiledSurface::torus(w, h, mesh, cfg.torus_origin);
}

CellResult run_cell(const ConvergenceConfig& cfg, double mesh, uint64_t seed) {
    TiledSurface surface = make_surface(cfg, mesh);
    ErosionState state = init_circles(surface, cfg.circles);
    RunOptions opts;
    opts.mode = cfg.mode;
    opts.seed = seed;

    double t_last = cfg.t_end;
    std::vector<double> snap_times{cfg.t_end};
    for (double t : cfg.stabilization_times) {
        snap_times.push_back(t);
        snap_times.push_back(2.0 * t);
        t_last = std::max(t_last, 2.0 * t);
    }
    opts.snapshot_times = snap_times;
    std::vector<Snapshot> snapshots;
    run(state, t_last, opts, &snapshots);

    CellResult result;
    // Distance of the configured droplet's interface at t_end to the target.
    if (cfg.target) {
        const ErosionState* at_t = nullptr;
        for (const auto& snap : snapshots)
            if (snap.time == cfg.t_end) at_t = &snap.state;
        if (!at_t) at_t = &state;
        PathCurve curve = lattice_interface_to_curve(*at_t, cfg.compare_droplet);
        if (cfg.torus)
            result.distance = hausdorff_torus(curve, *cfg.target, cfg.torus_width, cfg.torus_height);
        else
            result.distance = hausdorff(curve, *cfg.target);
    }
    if (!cfg.stabilization_times.empty()) {
        double worst = 0.0;
        for (double t : cfg.stabilization_times) {
            const ErosionState *s1 = nullptr, *s2 = nullptr;
            for (const auto& snap : snapshots) {
                if (snap.time == t) s1 = &snap.state;
                if (snap.time == 2.0 * t) s2 = &snap.state;
            }
            if (!s1 || !s2) continue;
            PathCurve c1 = lattice_interface_to_curve(*s1, cfg.compare_droplet);
            PathCurve c2 = lattice_interface_to_curve(*s2, cfg.compare_droplet);
            double d = cfg.torus ? hausdorff_torus(c1, c2, cfg.torus_width, cfg.torus_height)
                                 : hausdorff(c1, c2);
            worst = std::max(worst, d);
        }
        result.stabilization = worst;
    }
    for (const auto& droplet : state.droplets) result.cell_counts.push_back(droplet.cell_count);
    return result;
}

}  // namespace

ComparisonReport convergence_study(const ConvergenceConfig& config) {
    if (config.meshes.empty() || config.seeds.empty())
        throw ParameterError("convergence study needs meshes and seeds");
    struct Job {
        size_t mesh_idx;
        size_t seed_idx;
    };
    std::vector<Job> jobs;
    for (size_t m = 0; m < config.meshes.size(); ++m)
        for (size_t s = 0; s < config.seeds.size(); ++s) jobs.push_back({m, s});

    std::vector<CellResult> results(jobs.size());
    std::atomic<size_t> cursor{0};
    int nthreads = std::min<int>(resolve_threads(config.threads), int(jobs.size()));
    std::vector<std::thread> pool;
    std::vector<std::string> errors(jobs.size());
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                size_t k = cursor.fetch_add(1);
                if (k >= jobs.size()) return;
                try {
                    results[k] = run_cell(config, config.meshes[jobs[k].mesh_idx],
                                          config.seeds[jobs[k].seed_idx]);
                } catch (const std::exception& e) {
                    errors[k] = e.what();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (!err.empty()) throw Error(ErrorKind::Numerical, "convergence cell failed: " + err);

    // Deterministic ordered reduce: jobs are already (mesh, seed) sorted.
    ComparisonReport report;
    report.config = config;
    for (size_t m = 0; m < config.meshes.size(); ++m) {
        ComparisonRow row;
        row.mesh = config.meshes[m];
        for (size_t s = 0; s < config.seeds.size(); ++s) {
            const CellResult& r = results[m * config.seeds.size() + s];
            row.seeds.push_back(config.seeds[s]);
            if (r.distance) row.distances.push_back(*r.distance);
            if (r.stabilization) row.stabilization.push_back(*r.stabilization);
            for (int64_t c : r.cell_counts) row.cell_counts.push_back(c);
        }
        if (!row.distances.empty()) {
            row.median = median_of(row.distances);
            row.q1 = quartile_of(row.distances, 0.25);
            row.q3 = quartile_of(row.distances, 0.75);
        } else if (!row.stabilization.empty()) {
            row.median = median_of(row.stabilization);
            row.q1 = quartile_of(row.stabilization, 0.25);
            row.q3 = quartile_of(row.stabilization, 0.75);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace hslab
