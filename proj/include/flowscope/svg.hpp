#pragma once

#include "flowscope/layout.hpp"

#include <string>
#include <vector>

namespace flowscope {

struct SvgSize
{
  double width = 800.0;
  double height = 600.0;
};

// Deterministic SVG output: elements are emitted in layout order and every
// coordinate is printed with three decimals.

//! Ribbons are cubic curves between facing node edges; nodes are rects.
std::string render_svg(const SankeyLayout& layout, SvgSize size = {});
std::string render_svg(const RadialLayout& layout, SvgSize size = {});
std::string render_svg(const ViolinOutline& outline, SvgSize size = {});
std::string render_svg(const std::vector<TrendCell>& grid, SvgSize size = {});

//! Fixed three-decimal formatting used throughout the SVG output.
std::string format_coord(double v);

} // namespace flowscope
