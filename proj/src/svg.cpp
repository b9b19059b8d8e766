#include "flowscope/svg.hpp"

#include "flowscope/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace flowscope {

namespace {

constexpr double kMargin = 20.0;
constexpr double kNodeWidth = 10.0;

constexpr std::array<const char*, 10> kPalette = { "#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                                   "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                                                   "#9c755f", "#bab0ac" };

std::string escape(const std::string& text)
{
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* palette(int index)
{
  const auto n = static_cast<int>(kPalette.size());
  return kPalette[static_cast<std::size_t>(((index % n) + n) % n)];
}

void open_svg(std::ostringstream& out, SvgSize size)
{
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_coord(size.width)
      << "\" height=\"" << format_coord(size.height) << "\" viewBox=\"0 0 "
      << format_coord(size.width) << ' ' << format_coord(size.height) << "\">\n";
}

const char* trend_color(TrendColor c)
{
  switch (c) {
    case TrendColor::blue: return "#1f77b4";
    case TrendColor::red: return "#d62728";
    case TrendColor::light_blue: return "#9ecae1";
    case TrendColor::orange: return "#ff7f0e";
  }
  return "#9ecae1";
}

} // namespace

std::string format_coord(double v)
{
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, "non-finite coordinate in layout");
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") {
    s = "0.000";
  }
  return s;
}

std::string render_svg(const SankeyLayout& layout, SvgSize size)
{
  if (layout.nodes.empty() || layout.links.empty()) {
    throw Error(ErrorCode::EmptyFlow, "sankey layout has no flows to render");
  }
  int layers = layout.layer_count;
  for (const auto& n : layout.nodes) {
    layers = std::max(layers, n.layer + 1);
  }
  const double inner_w = size.width - 2 * kMargin - kNodeWidth;
  const double inner_h = size.height - 2 * kMargin;
  auto x_of = [&](int layer) {
    return layers > 1 ? kMargin + inner_w * layer / (layers - 1) : kMargin;
  };
  auto y_of = [&](double v) { return kMargin + v * inner_h; };

  std::ostringstream out;
  open_svg(out, size);
  out << "<g class=\"links\" fill-opacity=\"0.45\">\n";
  for (const auto& link : layout.links) {
    const auto& s = layout.nodes.at(link.source);
    const auto& t = layout.nodes.at(link.target);
    const double x0 = x_of(s.layer) + kNodeWidth;
    const double x1 = x_of(t.layer);
    const double xm = 0.5 * (x0 + x1);
    const double y0t = y_of(s.y + link.source_offset);
    const double y0b = y_of(s.y + link.source_offset + link.thickness);
    const double y1t = y_of(t.y + link.target_offset);
    const double y1b = y_of(t.y + link.target_offset + link.thickness);
    out << "<path d=\"M" << format_coord(x0) << ',' << format_coord(y0t) << " C"
        << format_coord(xm) << ',' << format_coord(y0t) << ' ' << format_coord(xm) << ','
        << format_coord(y1t) << ' ' << format_coord(x1) << ',' << format_coord(y1t) << " L"
        << format_coord(x1) << ',' << format_coord(y1b) << " C" << format_coord(xm) << ','
        << format_coord(y1b) << ' ' << format_coord(xm) << ',' << format_coord(y0b) << ' '
        << format_coord(x0) << ',' << format_coord(y0b) << " Z\" fill=\""
        << palette(s.color_index) << "\"><title>" << escape(s.label) << " → "
        << escape(t.label) << ": " << link.value << "</title></path>\n";
  }
  out << "</g>\n<g class=\"nodes\">\n";
  for (const auto& n : layout.nodes) {
    out << "<rect x=\"" << format_coord(x_of(n.layer)) << "\" y=\"" << format_coord(y_of(n.y))
        << "\" width=\"" << format_coord(kNodeWidth) << "\" height=\""
        << format_coord(n.height * inner_h) << "\" fill=\"" << palette(n.color_index)
        << "\"><title>" << escape(n.label) << ": " << n.value << "</title></rect>\n";
  }
  out << "</g>\n<g class=\"labels\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (const auto& n : layout.nodes) {
    const bool last = n.layer == layers - 1 && layers > 1;
    const double x = last ? x_of(n.layer) - 4.0 : x_of(n.layer) + kNodeWidth + 4.0;
    out << "<text x=\"" << format_coord(x) << "\" y=\""
        << format_coord(y_of(n.y + 0.5 * n.height)) << "\" dominant-baseline=\"middle\""
        << (last ? " text-anchor=\"end\"" : "") << '>' << escape(n.label) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string render_svg(const RadialLayout& layout, SvgSize size)
{
  if (layout.placements.empty()) {
    throw Error(ErrorCode::EmptyFlow, "radial layout has no nodes");
  }
  const double cx = 0.5 * size.width;
  const double cy = 0.5 * size.height;
  const double radius = 0.5 * std::min(size.width, size.height) - kMargin;
  auto px = [&](const RadialPlacement& p) { return cx + radius * p.radius * std::cos(p.angle); };
  auto py = [&](const RadialPlacement& p) { return cy + radius * p.radius * std::sin(p.angle); };
  double max_weight = 0.0;
  for (const auto& p : layout.placements) {
    if (p.weight) {
      max_weight = std::max(max_weight, *p.weight);
    }
  }

  std::ostringstream out;
  open_svg(out, size);
  out << "<g class=\"edges\" stroke=\"#999\" stroke-width=\"1\">\n";
  for (const auto& p : layout.placements) {
    if (!p.parent) {
      continue;
    }
    auto parent = std::find_if(layout.placements.begin(), layout.placements.end(),
                               [&](const auto& q) { return q.id == *p.parent; });
    if (parent == layout.placements.end()) {
      continue;
    }
    out << "<line x1=\"" << format_coord(px(*parent)) << "\" y1=\"" << format_coord(py(*parent))
        << "\" x2=\"" << format_coord(px(p)) << "\" y2=\"" << format_coord(py(p)) << "\"/>\n";
  }
  out << "</g>\n<g class=\"nodes\" fill=\"#4e79a7\">\n";
  for (const auto& p : layout.placements) {
    double r = 3.0;
    if (p.weight && max_weight > 0.0) {
      r += 5.0 * std::max(*p.weight, 0.0) / max_weight;
    }
    out << "<circle cx=\"" << format_coord(px(p)) << "\" cy=\"" << format_coord(py(p))
        << "\" r=\"" << format_coord(r) << "\"><title>" << escape(p.id) << "</title></circle>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string render_svg(const ViolinOutline& outline, SvgSize size)
{
  if (outline.points.size() < 3) {
    throw Error(ErrorCode::EmptyFlow, "violin outline has too few points");
  }
  double lo = outline.points.front().y;
  double hi = lo;
  double half = 0.0;
  for (const auto& p : outline.points) {
    lo = std::min(lo, p.y);
    hi = std::max(hi, p.y);
    half = std::max(half, std::abs(p.x));
  }
  half = std::max(half, 0.5 * outline.width);
  const double span = hi > lo ? hi - lo : 1.0;
  const double inner_h = size.height - 2 * kMargin;
  const double inner_half = 0.5 * size.width - kMargin;
  auto sx = [&](double x) { return 0.5 * size.width + (half > 0.0 ? x / half : 0.0) * inner_half; };
  auto sy = [&](double y) { return kMargin + (hi - y) / span * inner_h; };

  std::ostringstream out;
  open_svg(out, size);
  out << "<path d=\"";
  for (std::size_t i = 0; i < outline.points.size(); ++i) {
    out << (i == 0 ? "M" : " L") << format_coord(sx(outline.points[i].x)) << ','
        << format_coord(sy(outline.points[i].y));
  }
  out << " Z\" fill=\"#4e79a7\" fill-opacity=\"0.6\" stroke=\"#2f4b7c\"><title>"
      << escape(outline.category) << "</title></path>\n";
  const double qx = 0.15 * inner_half;
  for (std::size_t q = 0; q < 3; ++q) {
    const double y = sy(outline.quartiles[q]);
    out << "<line x1=\"" << format_coord(0.5 * size.width - qx) << "\" y1=\"" << format_coord(y)
        << "\" x2=\"" << format_coord(0.5 * size.width + qx) << "\" y2=\"" << format_coord(y)
        << "\" stroke=\"#222\" stroke-width=\"" << (q == 1 ? "2" : "1") << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_svg(const std::vector<TrendCell>& grid, SvgSize size)
{
  if (grid.empty()) {
    throw Error(ErrorCode::EmptyFlow, "trend grid has no cells");
  }
  std::ostringstream out;
  open_svg(out, size);
  for (const auto& cell : grid) {
    out << "<g class=\"cell\"><rect x=\"" << format_coord(cell.x * size.width) << "\" y=\""
        << format_coord(cell.y * size.height) << "\" width=\"" << format_coord(cell.w * size.width)
        << "\" height=\"" << format_coord(cell.h * size.height)
        << "\" fill=\"none\" stroke=\"#ddd\"/><polyline fill=\"none\" stroke-width=\"2\" stroke=\""
        << trend_color(cell.color) << "\" points=\"";
    for (std::size_t i = 0; i < cell.polyline.size(); ++i) {
      out << (i ? " " : "") << format_coord(cell.polyline[i].x * size.width) << ','
          << format_coord(cell.polyline[i].y * size.height);
    }
    out << "\"/><text x=\"" << format_coord((cell.x + 0.02) * size.width) << "\" y=\""
        << format_coord((cell.y + 0.08) * size.height)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << escape(cell.category)
        << "</text></g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

} // namespace flowscope
