#include "hslab/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace hslab {

namespace {

Json surface_desc(const TiledSurface& s) {
    Json j;
    j["kind"] = s.is_torus() ? "torus" : "plane";
    j["mesh"] = s.mesh;
    j["origin"] = {s.origin.real(), s.origin.imag()};
    if (s.is_torus()) {
        j["width_cells"] = s.width_cells;
        j["height_cells"] = s.height_cells;
    }
    return j;
}

TiledSurface surface_from_desc(const Json& j) {
    Cplx origin(j["origin"][0].get<double>(), j["origin"][1].get<double>());
    if (j["kind"] == "torus")
        return TiledSurface::torus(j["width_cells"].get<int>(), j["height_cells"].get<int>(),
                                   j["mesh"].get<double>(), origin);
    return TiledSurface::plane(j["mesh"].get<double>(), origin);
}

}  // namespace

Json snapshot_to_json(const ErosionState& state) {
    Json j;
    j["schema"] = "hslab.snapshot/1";
    j["time"] = state.clock;
    j["mesh"] = state.surface.mesh;
    j["surface"] = surface_desc(state.surface);
    Json droplets = Json::array();
    for (size_t d = 0; d < state.droplets.size(); ++d) {
        const auto& droplet = state.droplets[d];
        Json jd;
        Json sources = Json::array();
        for (size_t k = 0; k < droplet.source_cells.size(); ++k)
            sources.push_back({{"cell", {droplet.source_cells[k].i, droplet.source_cells[k].j}},
                               {"rate", droplet.source_rates[k]}});
        jd["sources"] = sources;
        // Run-length encoding: rows of [j, i_start, length].
        auto cells = cells_from_walk(state.surface, droplet.interface);
        std::sort(cells.begin(), cells.end(), [](CellId a, CellId b) {
            return a.j != b.j ? a.j < b.j : a.i < b.i;
        });
        Json rows = Json::array();
        size_t k = 0;
        while (k < cells.size()) {
            size_t e = k;
            while (e + 1 < cells.size() && cells[e + 1].j == cells[k].j &&
                   cells[e + 1].i == cells[e].i + 1)
                ++e;
            rows.push_back({cells[k].j, cells[k].i, int(e - k + 1)});
            k = e + 1;
        }
        jd["cells"] = rows;
        Json iface = Json::array();
        for (const auto& v : droplet.interface) iface.push_back({v.i, v.j});
        jd["interface"] = iface;
        droplets.push_back(jd);
    }
    j["droplets"] = droplets;
    return j;
}

ErosionState snapshot_from_json(const Json& j) {
    if (j.value("schema", "") != "hslab.snapshot/1") throw ConfigError("unknown snapshot schema");
    ErosionState state;
    state.surface = surface_from_desc(j["surface"]);
    state.ownership = OwnershipGrid(state.surface);
    state.clock = j["time"].get<double>();
    int d = 0;
    for (const auto& jd : j["droplets"]) {
        DropletState droplet;
        for (const auto& row : jd["cells"]) {
            int cj = row[0].get<int>(), ci = row[1].get<int>(), len = row[2].get<int>();
            for (int i = ci; i < ci + len; ++i) {
                state.ownership.set(wrap_cell(state.surface, i, cj), d);
                droplet.cell_count += 1;
            }
        }
        for (const auto& v : jd["interface"])
            droplet.interface.push_back({v[0].get<int>(), v[1].get<int>()});
        for (const auto& src : jd["sources"]) {
            CellId cell{src["cell"][0].get<int>(), src["cell"][1].get<int>()};
            double rate = src["rate"].get<double>();
            droplet.source_cells.push_back(cell);
            droplet.source_rates.push_back(rate);
            state.sources.push_back({d, cell, rate});
        }
        state.droplets.push_back(std::move(droplet));
        ++d;
    }
    return state;
}

std::string event_csv_header() { return "time,source,walk_length,outcome\r\n"; }

std::string event_csv_row(const ErosionEvent& ev) {
    const char* outcome = "capture";
    if (ev.outcome == ErosionEvent::Outcome::NoOpSource) outcome = "noop_source";
    if (ev.outcome == ErosionEvent::Outcome::NoOpRejected) outcome = "noop_rejected";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%lld,%s\r\n", ev.time, ev.source,
                  static_cast<long long>(ev.walk_length), outcome);
    return buf;
}

std::string curve_to_csv(const PathCurve& curve) {
    std::ostringstream out;
    out << "index,re,im\r\n";
    char buf[80];
    for (size_t k = 0; k < curve.points.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\r\n", k, curve.points[k].real(),
                      curve.points[k].imag());
        out << buf;
    }
    return out.str();
}

PathCurve curve_from_csv(const std::string& csv) {
    PathCurve curve;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        double re = 0, im = 0;
        size_t idx;
        if (std::sscanf(line.c_str(), "%zu,%lf,%lf", &idx, &re, &im) != 3)
            throw ConfigError("malformed curve CSV row: " + line);
        curve.points.push_back({re, im});
    }
    return curve;
}

Json tree_to_json(const WeightedTree& t) {
    if (t.is_leaf()) return Json{{"weight", t.value}};
    Json j;
    j["width"] = t.value;
    Json kids = Json::array();
    for (const auto& c : t.children) kids.push_back(tree_to_json(c));
    j["children"] = kids;
    return j;
}

WeightedTree tree_from_json(const Json& j) {
    WeightedTree t;
    if (j.contains("weight")) {
        t.value = j["weight"].get<double>();
        return t;
    }
    t.value = j["width"].get<double>();
    for (const auto& c : j["children"]) t.children.push_back(tree_from_json(c));
    return t;
}

Json surface_to_json(const GreensTypeSurface& s) {
    Json j;
    j["schema"] = "hslab.surface/1";
    Json pieces = Json::array();
    for (const auto& p : s.pieces) pieces.push_back(tree_to_json(to_weighted_tree(p)));
    j["pieces"] = pieces;
    Json pairings = Json::array();
    for (const auto& p : s.pairings)
        pairings.push_back({{"i", p.piece_a},
                            {"interval", {p.a_lo, p.a_hi}},
                            {"j", p.piece_b},
                            {"interval_j", {p.b_lo, p.b_hi}},
                            {"offset", {p.offset.real(), p.offset.imag()}}});
    j["pairings"] = pairings;
    return j;
}

GreensTypeSurface surface_from_json(const Json& j) {
    if (j.value("schema", "") != "hslab.surface/1") throw ConfigError("unknown surface schema");
    GreensTypeSurface s;
    for (const auto& p : j["pieces"]) s.pieces.push_back(from_weighted_tree(tree_from_json(p)));
    for (const auto& p : j["pairings"]) {
        GreensTypeSurface::Pairing pairing;
        pairing.piece_a = p["i"].get<size_t>();
        pairing.a_lo = p["interval"][0].get<double>();
        pairing.a_hi = p["interval"][1].get<double>();
        pairing.piece_b = p["j"].get<size_t>();
        pairing.b_lo = p["interval_j"][0].get<double>();
        pairing.b_hi = p["interval_j"][1].get<double>();
        pairing.offset = Cplx(p["offset"][0].get<double>(), p["offset"][1].get<double>());
        s.pairings.push_back(pairing);
    }
    return s;
}

Json report_to_json(const ComparisonReport& r) {
    Json j;
    j["schema"] = "hslab.compare/1";
    Json cfg;
    cfg["meshes"] = r.config.meshes;
    cfg["seeds"] = r.config.seeds;
    cfg["t_end"] = r.config.t_end;
    cfg["mode"] = r.config.mode == ScheduleMode::RoundRobin ? "roundrobin" : "poisson";
    cfg["torus"] = r.config.torus;
    cfg["compare_droplet"] = r.config.compare_droplet;
    j["config"] = cfg;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json jr;
        jr["mesh"] = row.mesh;
        jr["seeds"] = row.seeds;
        jr["distances"] = row.distances;
        jr["stabilization"] = row.stabilization;
        jr["median"] = row.median;
        jr["q1"] = row.q1;
        jr["q3"] = row.q3;
        jr["cell_counts"] = row.cell_counts;
        rows.push_back(jr);
    }
    j["rows"] = rows;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open for writing: " + path);
    file << content;
    if (!file) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << file.rdbuf();
    return ss.str();
}

}  // namespace hslab
