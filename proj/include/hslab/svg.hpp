#pragma once

#include <optional>
#include <string>

#include "hslab/erosion.hpp"
#include "hslab/path_curve.hpp"

namespace hslab {

struct CurveStyle {
    std::string stroke = "#000000";
    double stroke_width = 0.01;
    std::string fill = "none";
    std::string dash;  // e.g. "0.02,0.02"
};

struct StyledCurve {
    PathCurve curve;
    CurveStyle style;
};

// Ownership raster drawn as cell rectangles underneath the curves.
struct CellRaster {
    const ErosionState* state = nullptr;
    std::vector<std::string> palette{"#9ecae1", "#a1d99b", "#fdae6b", "#bcbddc",
                                     "#fc9272", "#c7e9c0"};
};

// Standalone SVG 1.1 with an explicit viewBox; floats printed to 9
// significant digits so outputs are byte-stable.
void emit_svg(const std::vector<StyledCurve>& curves, const std::optional<CellRaster>& raster,
              const std::string& path);

std::string svg_document(const std::vector<StyledCurve>& curves,
                         const std::optional<CellRaster>& raster);

}  // namespace hslab
