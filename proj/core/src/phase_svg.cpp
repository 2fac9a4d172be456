#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "invaria/analysis.hpp"

namespace invaria::analysis {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Frame {
  double y_lo, y_hi, z_lo, z_hi;

  double px(double y) const {
    const double span = y_hi > y_lo ? y_hi - y_lo : 1.0;
    return kMargin + (y - y_lo) / span * (kWidth - 2 * kMargin);
  }
  double py(double z) const {
    const double span = z_hi > z_lo ? z_hi - z_lo : 1.0;
    return kHeight - kMargin - (z - z_lo) / span * (kHeight - 2 * kMargin);
  }
  bool inside(double y, double z) const {
    return y >= y_lo && y <= y_hi && z >= z_lo && z <= z_hi;
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_phase_svg(std::ostream& os, const PhaseGrid& grid,
                     const std::vector<FieldSample>& field,
                     const std::vector<PortraitTrace>& traces, const StabilityReport& report,
                     const std::string& title) {
  const Frame f{grid.y.lo, grid.y.hi, grid.z.lo, grid.z.hi};
  const double cell_y = grid.y.count > 1 ? (f.px(grid.y.hi) - f.px(grid.y.lo)) / (grid.y.count - 1)
                                         : kWidth;
  const double cell_z = grid.z.count > 1 ? (f.py(grid.z.lo) - f.py(grid.z.hi)) / (grid.z.count - 1)
                                         : kHeight;
  const double arrow = 0.4 * std::min(cell_y, cell_z);

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
        "viewBox=\"0 0 800 600\">\n";
  os << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<text x=\"400\" y=\"25\" text-anchor=\"middle\" font-size=\"16\">" << escape(title)
     << "</text>\n";

  // Axes
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(kHeight - kMargin) << "\" x2=\""
     << num(kWidth - kMargin) << "\" y2=\"" << num(kHeight - kMargin) << "\"/>\n";
  os << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(kMargin) << "\" x2=\"" << num(kMargin)
     << "\" y2=\"" << num(kHeight - kMargin) << "\"/>\n";
  os << "</g>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight - 12)
     << "\" text-anchor=\"middle\" font-size=\"14\">y</text>\n";
  os << "<text x=\"15\" y=\"" << num(kHeight / 2) << "\" font-size=\"14\">z</text>\n";
  os << "<text x=\"" << num(kMargin) << "\" y=\"" << num(kHeight - kMargin + 16)
     << "\" font-size=\"11\">" << num(f.y_lo) << "</text>\n";
  os << "<text x=\"" << num(kWidth - kMargin) << "\" y=\"" << num(kHeight - kMargin + 16)
     << "\" text-anchor=\"end\" font-size=\"11\">" << num(f.y_hi) << "</text>\n";
  os << "<text x=\"" << num(kMargin - 4) << "\" y=\"" << num(kHeight - kMargin)
     << "\" text-anchor=\"end\" font-size=\"11\">" << num(f.z_lo) << "</text>\n";
  os << "<text x=\"" << num(kMargin - 4) << "\" y=\"" << num(kMargin + 4)
     << "\" text-anchor=\"end\" font-size=\"11\">" << num(f.z_hi) << "</text>\n";

  // Direction field: unit arrows in screen space.
  os << "<g stroke=\"steelblue\" stroke-width=\"1\">\n";
  for (const auto& s : field) {
    if (s.magnitude == 0.0) continue;
    const double x0 = f.px(s.y), y0 = f.py(s.z);
    const double x1 = x0 + arrow * s.ny, y1 = y0 - arrow * s.nz;
    const double ang = std::atan2(y1 - y0, x1 - x0);
    const double head = 0.35 * arrow;
    os << "<path d=\"M" << num(x0) << ' ' << num(y0) << " L" << num(x1) << ' ' << num(y1) << " M"
       << num(x1 - head * std::cos(ang - 0.5)) << ' ' << num(y1 - head * std::sin(ang - 0.5))
       << " L" << num(x1) << ' ' << num(y1) << " L" << num(x1 - head * std::cos(ang + 0.5)) << ' '
       << num(y1 - head * std::sin(ang + 0.5)) << "\" fill=\"none\"/>\n";
  }
  os << "</g>\n";

  os << "<g stroke=\"purple\" stroke-width=\"1.5\" fill=\"none\">\n";
  for (const auto& tr : traces) {
    std::string d;
    bool pen_down = false;
    for (const auto& pt : tr.points) {
      if (!f.inside(pt[0], pt[1])) {
        pen_down = false;
        continue;
      }
      d += pen_down ? " L" : " M";
      d += num(f.px(pt[0])) + ' ' + num(f.py(pt[1]));
      pen_down = true;
    }
    if (!d.empty()) os << "<path d=\"" << d.substr(1) << "\"/>\n";
  }
  os << "</g>\n";

  for (const Equilibrium* e : {&report.e1, &report.e2}) {
    if (!f.inside(e->point[0], e->point[1])) continue;
    const double x = f.px(e->point[0]), y = f.py(e->point[1]);
    os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"5\" fill=\"red\"/>\n";
    os << "<text x=\"" << num(x + 8) << "\" y=\"" << num(y - 8) << "\" font-size=\"12\">"
       << (e->kind == EquilibriumKind::E1 ? "E1" : "E2") << " (" << num(e->point[0]) << ", "
       << num(e->point[1]) << ") " << to_string(e->classification) << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace invaria::analysis
