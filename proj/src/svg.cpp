#include "hslab/svg.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hslab {

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct Box {
    double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
    void grow(double x, double y) {
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
    }
    bool empty() const { return minx > maxx; }
};

}  // namespace

std::string svg_document(const std::vector<StyledCurve>& curves,
                         const std::optional<CellRaster>& raster) {
    Box box;
    for (const auto& sc : curves)
        for (const auto& p : sc.curve.points) box.grow(p.real(), p.imag());
    std::vector<std::tuple<double, double, double, int>> cells;  // x, y, mesh, owner
    if (raster && raster->state) {
        const auto& st = *raster->state;
        for (size_t d = 0; d < st.droplets.size(); ++d)
            for (const auto& c : cells_from_walk(st.surface, st.droplets[d].interface)) {
                Cplx corner = st.surface.origin + st.surface.mesh * Cplx(c.i, c.j);
                cells.emplace_back(corner.real(), corner.imag(), st.surface.mesh, int(d));
                box.grow(corner.real(), corner.imag());
                box.grow(corner.real() + st.surface.mesh, corner.imag() + st.surface.mesh);
            }
    }
    if (box.empty()) box = Box{0, 0, 1, 1};
    double margin = 0.05 * std::max(box.maxx - box.minx, box.maxy - box.miny);
    if (margin <= 0) margin = 0.5;

    std::ostringstream out;
    // The y axis is flipped so mathematical coordinates read upright.
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\""
        << fmt9(box.minx - margin) << " " << fmt9(-(box.maxy + margin)) << " "
        << fmt9(box.maxx - box.minx + 2 * margin) << " " << fmt9(box.maxy - box.miny + 2 * margin)
        << "\">\n";
    if (raster && raster->state) {
        const auto& palette = raster->palette;
        for (const auto& [x, y, mesh, owner] : cells) {
            out << "<rect x=\"" << fmt9(x) << "\" y=\"" << fmt9(-(y + mesh)) << "\" width=\""
                << fmt9(mesh) << "\" height=\"" << fmt9(mesh) << "\" fill=\""
                << palette[size_t(owner) % palette.size()] << "\"/>\n";
        }
    }
    for (const auto& sc : curves) {
        if (sc.curve.points.empty()) continue;
        out << (sc.curve.closed ? "<polygon" : "<polyline") << " points=\"";
        for (size_t k = 0; k < sc.curve.points.size(); ++k) {
            if (k) out << " ";
            out << fmt9(sc.curve.points[k].real()) << "," << fmt9(-sc.curve.points[k].imag());
        }
        out << "\" fill=\"" << sc.style.fill << "\" stroke=\"" << sc.style.stroke
            << "\" stroke-width=\"" << fmt9(sc.style.stroke_width) << "\"";
        if (!sc.style.dash.empty()) out << " stroke-dasharray=\"" << sc.style.dash << "\"";
        out << "/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void emit_svg(const std::vector<StyledCurve>& curves, const std::optional<CellRaster>& raster,
              const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open for writing: " + path);
    file << svg_document(curves, raster);
    if (!file) throw IoError("write failed: " + path);
}

}  // namespace hslab
