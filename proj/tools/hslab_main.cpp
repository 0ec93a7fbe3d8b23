// Command-line surface: one verb per workflow. Outputs are CSV/JSON/SVG and
// every file-producing run writes the fully resolved configuration next to
// its outputs. Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 invariant violation.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "hslab/compare.hpp"
#include "hslab/quad_diff.hpp"
#include "hslab/serialize.hpp"
#include "hslab/stationary.hpp"
#include "hslab/svg.hpp"

namespace fs = std::filesystem;
using namespace hslab;

namespace {

Cplx parse_complex(const std::string& s) {
    double re = 0, im = 0;
    if (std::sscanf(s.c_str(), "%lf,%lf", &re, &im) < 1)
        throw ConfigError("expected 're,im': " + s);
    return {re, im};
}

// "re,im,w;re,im,w;inf,w" -> weighted divisor.
WeightedDivisor parse_divisor(const std::string& s) {
    WeightedDivisor d;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        if (item.rfind("inf,", 0) == 0) {
            d.add(SpherePoint::infinity(), std::stod(item.substr(4)));
            continue;
        }
        double re, im, w;
        if (std::sscanf(item.c_str(), "%lf,%lf,%lf", &re, &im, &w) != 3)
            throw ConfigError("expected 're,im,w': " + item);
        d.add(SpherePoint(Cplx(re, im)), w);
    }
    if (d.atoms.empty()) throw ConfigError("empty divisor");
    return d;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);
}

void write_echo(const std::string& dir, const Json& cfg) {
    ensure_dir(dir);
    write_text_file(dir + "/effective_config.json", cfg.dump(2) + "\n");
}

Json curve_meta(const PathCurve& c) {
    return Json{{"points", c.points.size()}, {"closed", c.closed}, {"length", c.length()}};
}

struct EndName {
    const char* operator()(TraceEnd e) const {
        switch (e) {
            case TraceEnd::Closed: return "closed";
            case TraceEnd::HitCriticalPoint: return "critical-point";
            case TraceEnd::Escaped: return "escape";
            case TraceEnd::MaxLength: return "max-arclength";
            default: return "none";
        }
    }
};

int cmd_trace_qd(double a0, double a1, double ainf, double step, double max_arclen,
                 const std::string& out_dir) {
    QuadDiff qd = build_three_source(a0, a1, ainf);
    CriticalGraph graph = critical_graph(qd, step, max_arclen);

    Json cfg{{"command", "trace-qd"}, {"a0", a0},     {"a1", a1},
             {"ainf", ainf},          {"step", step}, {"max_arclen", max_arclen},
             {"out_dir", out_dir}};
    write_echo(out_dir, cfg);

    Json summary;
    summary["schema"] = "hslab.trace/1";
    Json verts = Json::array();
    for (const auto& v : graph.vertices)
        verts.push_back({{"re", v.location.real()}, {"im", v.location.imag()}, {"order", v.order}});
    summary["critical_points"] = verts;
    Json edges = Json::array();
    std::vector<StyledCurve> curves;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    for (size_t k = 0; k < graph.edges.size(); ++k) {
        const auto& e = graph.edges[k];
        std::string name = "edge_" + std::to_string(k) + ".csv";
        if (e.status.empty()) write_text_file(out_dir + "/" + name, curve_to_csv(e.path));
        edges.push_back({{"file", name},
                         {"end", EndName{}(e.end)},
                         {"status", e.status},
                         {"curve", e.status.empty() ? curve_meta(e.path) : Json()}});
        CurveStyle style;
        style.stroke = colors[k % 5];
        curves.push_back({e.path, style});
    }
    summary["edges"] = edges;
    write_text_file(out_dir + "/trace.json", summary.dump(2) + "\n");
    emit_svg(curves, std::nullopt, out_dir + "/trace.svg");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_lemniscate(const std::string& neg, const std::string& pos, double level,
                   const std::string& seed, const std::string& out_dir) {
    LevelPotential R;
    R.neg = parse_divisor(neg);
    if (!pos.empty()) R.pos = parse_divisor(pos);
    LevelCurve lc = trace_level(R, level, parse_complex(seed));
    Json cfg{{"command", "lemniscate"}, {"neg", neg},   {"pos", pos},
             {"level", level},          {"seed", seed}, {"out_dir", out_dir}};
    write_echo(out_dir, cfg);
    write_text_file(out_dir + "/level_curve.csv", curve_to_csv(lc.curve));
    CurveStyle style;
    style.stroke = "#1f77b4";
    emit_svg({{lc.curve, style}}, std::nullopt, out_dir + "/level_curve.svg");
    Json summary{{"schema", "hslab.level/1"},
                 {"level", lc.level},
                 {"jordan", lc.jordan},
                 {"separates", lc.separates},
                 {"curve", curve_meta(lc.curve)}};
    write_text_file(out_dir + "/level.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_four_droplet(double x1, double x2, double a, double b, const std::string& out_dir) {
    FourDropletSpec spec(x1, x2, a, b);
    LogPotential lp = spec.as_log_potential();
    // Seed the level-0 interface on the sign change along the real axis.
    double lo = 0.5 * (x1 + x2), hi = x2 - 1e-4;
    if (spec.value(Cplx(lo)) < 0) std::swap(lo, hi);
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (spec.value(Cplx(mid)) > 0 ? lo : hi) = mid;
    }
    LevelCurve lc = trace_level(lp, 0.0, Cplx(0.5 * (lo + hi), 0.0));

    Json cfg{{"command", "four-droplet"}, {"x1", x1}, {"x2", x2},
             {"a", a},                    {"b", b},   {"out_dir", out_dir}};
    write_echo(out_dir, cfg);
    write_text_file(out_dir + "/interface.csv", curve_to_csv(lc.curve));

    std::vector<StyledCurve> curves;
    PathCurve circle;
    circle.closed = true;
    for (int k = 0; k < 720; ++k) circle.points.push_back(std::polar(1.0, 2 * M_PI * k / 720.0));
    CurveStyle circle_style;
    circle_style.stroke = "#888888";
    circle_style.dash = "0.03,0.03";
    curves.push_back({circle, circle_style});
    CurveStyle iface_style;
    iface_style.stroke = "#d62728";
    curves.push_back({lc.curve, iface_style});
    emit_svg(curves, std::nullopt, out_dir + "/four_droplet.svg");

    Json summary{{"schema", "hslab.fourdroplet/1"},
                 {"interface", curve_meta(lc.curve)},
                 {"jordan", lc.jordan}};
    write_text_file(out_dir + "/four_droplet.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_energy(const std::string& center, double radius, const std::string& divisor,
               const std::string& out_dir) {
    Json result;
    result["schema"] = "hslab.energy/1";
    if (!center.empty())
        result["circle_pair"] = reduced_energy_circle_pair(parse_complex(center), radius);
    if (!divisor.empty())
        result["unit_disc"] = reduced_energy_general(MoebiusMap::identity(), parse_divisor(divisor));
    std::cout << result.dump(2) << "\n";
    if (!out_dir.empty()) {
        write_echo(out_dir, Json{{"command", "energy"},
                                 {"center", center},
                                 {"radius", radius},
                                 {"divisor", divisor},
                                 {"out_dir", out_dir}});
        write_text_file(out_dir + "/energy.json", result.dump(2) + "\n");
    }
    return 0;
}

int cmd_variation(const std::string& center, double radius, const std::string& d_str,
                  const std::string& dstar_str, const std::string& out_dir) {
    Circle circle{parse_complex(center), radius};
    WeightedDivisor d = parse_divisor(d_str);
    WeightedDivisor dstar = parse_divisor(dstar_str);
    double gradient = hadamard_gradient_quadrature(circle, d, dstar);
    auto [area, perim] = area_perimeter_variation(circle, d, dstar);
    Json result{{"schema", "hslab.variation/1"},
                {"gradient", gradient},
                {"area_variation", area},
                {"perimeter_variation", perim}};
    std::cout << result.dump(2) << "\n";
    if (!out_dir.empty()) {
        write_echo(out_dir, Json{{"command", "variation"},
                                 {"center", center},
                                 {"radius", radius},
                                 {"d", d_str},
                                 {"dstar", dstar_str},
                                 {"out_dir", out_dir}});
        write_text_file(out_dir + "/variation.json", result.dump(2) + "\n");
    }
    return 0;
}

// Fig. 10-style layout: nested rectangles, strips truncated at x_min.
void surface_layout(const GreensSurface& s, double x_right, double y0, double x_min,
                    std::vector<StyledCurve>& out, int depth) {
    const char* palette[] = {"#9ecae1", "#a1d99b", "#fdae6b", "#bcbddc", "#fc9272"};
    double height = s.boundary_height();
    double x_left = s.is_strip() ? x_min : x_right - s.rect_width();
    PathCurve rect;
    rect.closed = true;
    rect.points = {Cplx(x_left, y0), Cplx(x_right, y0), Cplx(x_right, y0 + height),
                   Cplx(x_left, y0 + height)};
    CurveStyle style;
    style.fill = palette[depth % 5];
    style.stroke = "#333333";
    style.stroke_width = 0.02;
    out.push_back({rect, style});
    if (s.is_strip()) return;
    double y = y0;
    for (const auto& child : s.children()) {
        surface_layout(child, x_left, y, x_min, out, depth + 1);
        y += child.boundary_height();
    }
}

int cmd_surface(const std::string& tree_json, const std::string& pairings_json, double x_min,
                const std::string& out_dir) {
    Json cfg{{"command", "surface"},
             {"tree", tree_json},
             {"pairings", pairings_json},
             {"x_min", x_min},
             {"out_dir", out_dir}};
    write_echo(out_dir, cfg);
    Json result;
    result["schema"] = "hslab.surface-report/1";
    std::vector<StyledCurve> curves;
    if (!tree_json.empty()) {
        WeightedTree tree = tree_from_json(Json::parse(read_text_file(tree_json)));
        GreensSurface surface = from_weighted_tree(tree);
        result["boundary_height"] = surface.boundary_height();
        result["tree"] = tree_to_json(to_weighted_tree(surface));
        surface_layout(surface, 0.0, 0.0, x_min, curves, 0);
    }
    if (!pairings_json.empty()) {
        GreensTypeSurface gts = surface_from_json(Json::parse(read_text_file(pairings_json)));
        ValidationReport report = validate_greens_type(gts);
        Json issues = Json::array();
        for (const auto& issue : report.issues) issues.push_back(issue.message);
        result["valid"] = report.valid();
        result["issues"] = issues;
        if (curves.empty()) {
            double y = 0.0;
            for (const auto& piece : gts.pieces) {
                surface_layout(piece, 0.0, y, x_min, curves, 0);
                y += piece.boundary_height() + 1.0;
            }
        }
    }
    if (!curves.empty()) emit_svg(curves, std::nullopt, out_dir + "/surface.svg");
    write_text_file(out_dir + "/surface.json", result.dump(2) + "\n");
    std::cout << result.dump(2) << "\n";
    return 0;
}

TiledSurface surface_from_config(const Json& cfg) {
    double mesh = cfg.at("mesh").get<double>();
    if (cfg.value("surface", "plane") == "torus") {
        Cplx origin = parse_complex(cfg.value("origin", "0,0"));
        double width = cfg.at("width").get<double>();
        double height = cfg.at("height").get<double>();
        return TiledSurface::torus(int(std::lround(width / mesh)),
                                   int(std::lround(height / mesh)), mesh, origin);
    }
    return TiledSurface::plane(mesh);
}

std::vector<CircleSpec> circles_from_config(const Json& cfg) {
    std::vector<CircleSpec> specs;
    for (const auto& c : cfg.at("circles")) {
        CircleSpec spec;
        spec.center = Cplx(c.at("center")[0].get<double>(), c.at("center")[1].get<double>());
        spec.radius = c.at("radius").get<double>();
        for (const auto& s : c.at("sources"))
            spec.divisor.add(SpherePoint(Cplx(s.at("point")[0].get<double>(),
                                              s.at("point")[1].get<double>())),
                             s.at("weight").get<double>());
        specs.push_back(std::move(spec));
    }
    return specs;
}

int cmd_erode(Json cfg, const std::string& out_dir) {
    cfg["command"] = "erode";
    cfg["out_dir"] = out_dir;
    write_echo(out_dir, cfg);

    TiledSurface surface = surface_from_config(cfg);
    ErosionState state = init_circles(surface, circles_from_config(cfg));

    RunOptions opts;
    opts.mode = cfg.value("mode", "poisson") == "roundrobin" ? ScheduleMode::RoundRobin
                                                             : ScheduleMode::PoissonClocks;
    opts.seed = cfg.value("seed", 1ULL);
    opts.check_invariants_every = cfg.value("check_every", 0ULL);
    if (cfg.contains("snapshots"))
        for (const auto& t : cfg["snapshots"]) opts.snapshot_times.push_back(t.get<double>());

    std::string events_csv = event_csv_header();
    opts.event_sink = [&](const ErosionEvent& ev) { events_csv += event_csv_row(ev); };

    std::vector<Snapshot> snapshots;
    RunSummary summary = run(state, cfg.at("t_end").get<double>(), opts, &snapshots);

    for (const auto& snap : snapshots) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_t%.6g.json", snap.time);
        write_text_file(out_dir + "/" + name, snapshot_to_json(snap.state).dump() + "\n");
    }
    write_text_file(out_dir + "/final.json", snapshot_to_json(state).dump() + "\n");
    write_text_file(out_dir + "/events.csv", events_csv);

    std::vector<StyledCurve> curves;
    for (size_t d = 0; d < state.droplets.size(); ++d) {
        CurveStyle style;
        style.stroke = d % 2 ? "#d62728" : "#1f77b4";
        style.stroke_width = state.surface.mesh / 4.0;
        curves.push_back({lattice_interface_to_curve(state, int(d)), style});
    }
    CellRaster raster;
    raster.state = &state;
    emit_svg(curves, raster, out_dir + "/final.svg");

    Json report{{"schema", "hslab.erode/1"},
                {"events", summary.events},
                {"captures", summary.captures},
                {"noop_source", summary.noop_source},
                {"noop_rejected", summary.noop_rejected},
                {"invariant_checks", summary.invariant_checks},
                {"clock", state.clock}};
    Json counts = Json::array();
    for (const auto& d : state.droplets) counts.push_back(d.cell_count);
    report["cell_counts"] = counts;
    write_text_file(out_dir + "/run.json", report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_compare(const Json& cfg, const std::string& out_dir) {
    ConvergenceConfig config;
    for (const auto& m : cfg.at("meshes")) config.meshes.push_back(m.get<double>());
    for (const auto& s : cfg.at("seeds")) config.seeds.push_back(s.get<uint64_t>());
    config.t_end = cfg.at("t_end").get<double>();
    config.mode = cfg.value("mode", "poisson") == "roundrobin" ? ScheduleMode::RoundRobin
                                                               : ScheduleMode::PoissonClocks;
    config.torus = cfg.value("surface", "plane") == "torus";
    if (config.torus) {
        config.torus_origin = parse_complex(cfg.value("origin", "0,0"));
        config.torus_width = cfg.at("width").get<double>();
        config.torus_height = cfg.at("height").get<double>();
    }
    config.circles = circles_from_config(cfg);
    config.compare_droplet = cfg.value("compare_droplet", 1);
    config.threads = cfg.value("threads", 0);
    if (cfg.contains("stabilization_times"))
        for (const auto& t : cfg["stabilization_times"])
            config.stabilization_times.push_back(t.get<double>());
    if (cfg.contains("target") && !cfg["target"].is_null()) {
        const Json& t = cfg["target"];
        if (t.at("kind") == "three-source-loop") {
            QuadDiff qd = build_three_source(t.at("a0").get<double>(), t.at("a1").get<double>(),
                                             t.value("ainf", 0.0));
            CriticalGraph graph = critical_graph(qd);
            for (const auto& e : graph.edges)
                if (e.path.closed) config.target = e.path;
            if (!config.target) throw ConfigError("three-source target has no closed loop");
        } else if (t.at("kind") == "csv") {
            PathCurve curve = curve_from_csv(read_text_file(t.at("path").get<std::string>()));
            curve.closed = true;
            config.target = curve;
        } else {
            throw ConfigError("unknown target kind");
        }
    }

    Json echo = cfg;
    echo["command"] = "compare";
    echo["out_dir"] = out_dir;
    echo["threads_resolved"] = resolve_threads(config.threads);
    write_echo(out_dir, echo);

    ComparisonReport report = convergence_study(config);
    write_text_file(out_dir + "/report.json", report_to_json(report).dump(2) + "\n");

    std::string csv = "mesh,seed,distance,stabilization\r\n";
    char buf[160];
    for (const auto& row : report.rows)
        for (size_t k = 0; k < row.seeds.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g,%llu,%.17g,%.17g\r\n", row.mesh,
                          static_cast<unsigned long long>(row.seeds[k]),
                          k < row.distances.size() ? row.distances[k] : -1.0,
                          k < row.stabilization.size() ? row.stabilization[k] : -1.0);
            csv += buf;
        }
    write_text_file(out_dir + "/report.csv", csv);
    std::cout << report_to_json(report).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"competitive Hele-Shaw laboratory"};
    app.require_subcommand(1);

    // trace-qd
    auto* trace = app.add_subcommand("trace-qd", "critical graph of a three-source differential");
    double a0 = 2.0, a1 = 1.0, ainf = 0.0, step = 1e-3, max_arclen = 0.0;
    std::string out_dir = "hslab_out";
    trace->add_option("--a0", a0);
    trace->add_option("--a1", a1);
    trace->add_option("--ainf", ainf);
    trace->add_option("--step", step);
    trace->add_option("--max-arclen", max_arclen);
    trace->add_option("--out-dir", out_dir);

    // lemniscate
    auto* lem = app.add_subcommand("lemniscate", "trace a level line of a log potential");
    std::string neg, pos, seed = "0.5,0";
    double level = 0.0;
    lem->add_option("--neg", neg)->required();
    lem->add_option("--pos", pos);
    lem->add_option("--level", level);
    lem->add_option("--seed", seed);
    lem->add_option("--out-dir", out_dir);

    // four-droplet
    auto* four = app.add_subcommand("four-droplet", "level-0 interfaces of the four-droplet family");
    double x1 = -0.9, x2 = 0.9, wa = 6.0, wb = 1.0;
    four->add_option("--x1", x1);
    four->add_option("--x2", x2);
    four->add_option("--a", wa);
    four->add_option("--b", wb);
    four->add_option("--out-dir", out_dir);

    // energy
    auto* energy = app.add_subcommand("energy", "reduced Green's energies");
    std::string center, divisor;
    double radius = 1.0;
    energy->add_option("--center", center);
    energy->add_option("--radius", radius);
    energy->add_option("--divisor", divisor);
    energy->add_option("--out-dir", out_dir);

    // variation
    auto* variation = app.add_subcommand("variation", "competitive Hele-Shaw variations on a circle");
    std::string vcenter = "0,0", vd, vdstar;
    double vradius = 1.0;
    variation->add_option("--center", vcenter);
    variation->add_option("--radius", vradius);
    variation->add_option("--d", vd)->required();
    variation->add_option("--dstar", vdstar)->required();
    variation->add_option("--out-dir", out_dir);

    // surface
    auto* surf = app.add_subcommand("surface", "Green's surfaces and gluing validation");
    std::string tree_file, pairings_file;
    double x_min = -40.0;
    surf->add_option("--tree", tree_file);
    surf->add_option("--pairings", pairings_file);
    surf->add_option("--x-min", x_min);
    surf->add_option("--out-dir", out_dir);

    // erode
    auto* erode = app.add_subcommand("erode", "run interface erosion");
    std::string config_file, surface_kind = "plane", origin = "0,0", circles_str;
    double mesh = 0.05, t_end = 1.0, width = 2.0, height = 2.0;
    uint64_t rng_seed = 1, check_every = 0;
    std::string mode = "poisson", snapshots_str;
    erode->add_option("--config", config_file);
    erode->add_option("--surface", surface_kind);
    erode->add_option("--mesh", mesh);
    erode->add_option("--origin", origin);
    erode->add_option("--width", width);
    erode->add_option("--height", height);
    erode->add_option("--circles", circles_str);
    erode->add_option("--t-end", t_end);
    erode->add_option("--seed", rng_seed);
    erode->add_option("--mode", mode);
    erode->add_option("--snapshots", snapshots_str);
    erode->add_option("--check-every", check_every);
    erode->add_option("--out-dir", out_dir);

    // compare
    auto* compare = app.add_subcommand("compare", "lattice-to-continuum convergence study");
    std::string compare_config;
    compare->add_option("--config", compare_config)->required();
    compare->add_option("--out-dir", out_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (trace->parsed()) return cmd_trace_qd(a0, a1, ainf, step, max_arclen, out_dir);
        if (lem->parsed()) return cmd_lemniscate(neg, pos, level, seed, out_dir);
        if (four->parsed()) return cmd_four_droplet(x1, x2, wa, wb, out_dir);
        if (energy->parsed()) return cmd_energy(center, radius, divisor, out_dir);
        if (variation->parsed()) return cmd_variation(vcenter, vradius, vd, vdstar, out_dir);
        if (surf->parsed()) return cmd_surface(tree_file, pairings_file, x_min, out_dir);
        if (erode->parsed()) {
            Json cfg;
            cfg["surface"] = surface_kind;
            cfg["mesh"] = mesh;
            cfg["origin"] = origin;
            cfg["width"] = width;
            cfg["height"] = height;
            cfg["t_end"] = t_end;
            cfg["seed"] = rng_seed;
            cfg["mode"] = mode;
            cfg["check_every"] = check_every;
            Json circles = Json::array();
            if (!circles_str.empty()) {
                // "cx,cy,r,sx,sy,w;..." one circle per item, source at (sx,sy).
                std::stringstream ss(circles_str);
                std::string item;
                while (std::getline(ss, item, ';')) {
                    double cx, cy, r, sx, sy, w;
                    if (std::sscanf(item.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &cx, &cy, &r, &sx,
                                    &sy, &w) != 6)
                        throw ConfigError("expected 'cx,cy,r,sx,sy,w': " + item);
                    circles.push_back({{"center", {cx, cy}},
                                       {"radius", r},
                                       {"sources", {{{"point", {sx, sy}}, {"weight", w}}}}});
                }
            }
            cfg["circles"] = circles;
            if (!snapshots_str.empty()) {
                Json snaps = Json::array();
                std::stringstream ss(snapshots_str);
                std::string item;
                while (std::getline(ss, item, ',')) snaps.push_back(std::stod(item));
                cfg["snapshots"] = snaps;
            }
            // A config file overrides the flags wholesale, field by field.
            if (!config_file.empty()) {
                Json file_cfg = Json::parse(read_text_file(config_file));
                for (auto it = file_cfg.begin(); it != file_cfg.end(); ++it)
                    cfg[it.key()] = it.value();
            }
            return cmd_erode(cfg, out_dir);
        }
        if (compare->parsed())
            return cmd_compare(Json::parse(read_text_file(compare_config)), out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::Config: return 2;
            case ErrorKind::Numerical: return 3;
            case ErrorKind::Invariant: return 4;
        }
    } catch (const Json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
