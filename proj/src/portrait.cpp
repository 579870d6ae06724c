#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "polyvf/cli.hpp"

namespace polyvf {

namespace {

struct Canvas {
  double half, unit;  // pixel half-size and pixels per length unit

  double x(cplx z) const { return half + z.real() * unit; }
  double y(cplx z) const { return half - z.imag() * unit; }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string points(const Canvas& c, const std::vector<cplx>& path) {
  std::string out;
  double lx = 1e300, ly = 1e300;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double px = c.x(path[i]), py = c.y(path[i]);
    const bool last = i + 1 == path.size();
    if (!last && std::hypot(px - lx, py - ly) < 0.5) continue;
    if (!out.empty()) out += ' ';
    out += fmt("%.2f", px) + "," + fmt("%.2f", py);
    lx = px;
    ly = py;
  }
  return out;
}

std::vector<cplx> streamline(const Polynomial& p, cplx z, double dir, double view) {
  const double h = view / 150.0;
  auto f = [&](cplx w) {
    const cplx v = p(w);
    const double a = std::abs(v);
    return a > 0 ? dir * v / a : cplx(0.0);
  };
  std::vector<cplx> out{z};
  for (int i = 0; i < 400; ++i) {
    const cplx k1 = f(z), k2 = f(z + 0.5 * h * k1), k3 = f(z + 0.5 * h * k2), k4 = f(z + h * k3);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(z);
    if (std::abs(z) > 1.2 * view) break;
    bool near = false;
    for (const auto& r : p.roots()) near = near || std::abs(z - r.position) < 0.5 * h;
    if (near) break;
  }
  return out;
}

}  // namespace

std::string render_portrait(const Polynomial& p, const PortraitOptions& opts) {
  const auto g = trace_all(p, opts.trace, 1);
  const double view = opts.view_factor * p.root_scale();
  const Canvas c{opts.size / 2.0, opts.size / (2.0 * view)};
  const std::string sz = std::to_string(opts.size);

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + sz + "\" height=\"" + sz +
                    "\" viewBox=\"0 0 " + sz + " " + sz + "\">\n";
  svg += "<style>.separatrix{fill:none;stroke-width:1.6}.landing{stroke:#1f4e9c}"
         ".homoclinic{stroke:#b03a2e;stroke-width:2.4}.uncertain{stroke:#777;stroke-dasharray:5 4}"
         ".stream{fill:none;stroke:#bbb;stroke-width:0.6}.sink{fill:#1f4e9c}.source{fill:#b03a2e}"
         ".center{fill:white;stroke:black;stroke-width:1.5}.multiple{fill:#6a3d9a}"
         "text{font:12px sans-serif}</style>\n";
  svg += "<clipPath id=\"view\"><rect width=\"" + sz + "\" height=\"" + sz + "\"/></clipPath>\n";
  svg += "<rect width=\"" + sz + "\" height=\"" + sz + "\" fill=\"white\"/>\n";
  svg += "<circle cx=\"" + fmt("%.2f", c.half) + "\" cy=\"" + fmt("%.2f", c.half) + "\" r=\"" +
         fmt("%.2f", 0.92 * c.half) + "\" fill=\"none\" stroke=\"#ddd\"/>\n";

  svg += "<g clip-path=\"url(#view)\">\n";
  if (opts.streamlines > 0) {
    const int n = opts.streamlines;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const cplx z0(view * (2.0 * (a + 0.5) / n - 1.0), view * (2.0 * (b + 0.5) / n - 1.0));
        for (double dir : {1.0, -1.0})
          svg += "<polyline class=\"stream\" points=\"" + points(c, streamline(p, z0, dir, view)) + "\"/>\n";
      }
  }
  for (const auto& t : g.traces) {
    const std::string kind(to_string(t.outcome));
    svg += "<polyline class=\"separatrix " + kind + "\" data-index=\"" + std::to_string(t.index) + "\" points=\"" +
           points(c, t.path) + "\"/>\n";
  }
  svg += "</g>\n";

  for (const auto& e : g.equilibria) {
    const std::string kind(to_string(e.kind));
    const std::string cx = fmt("%.2f", c.x(e.position)), cy = fmt("%.2f", c.y(e.position));
    if (e.kind == EquilibriumKind::Multiple)
      svg += "<rect class=\"equilibrium multiple\" x=\"" + fmt("%.2f", c.x(e.position) - 5) + "\" y=\"" +
             fmt("%.2f", c.y(e.position) - 5) + "\" width=\"10\" height=\"10\"/>\n";
    else
      svg += "<circle class=\"equilibrium " + kind + "\" cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"5\"/>\n";
  }

  const int ends = 2 * (p.degree() - 1);
  for (int l = 0; l < ends; ++l) {
    const cplx at = std::polar(0.96 * view, std::numbers::pi * l / (p.degree() - 1));
    svg += "<text class=\"end\" x=\"" + fmt("%.2f", c.x(at)) + "\" y=\"" + fmt("%.2f", c.y(at)) +
           "\" text-anchor=\"middle\">e" + std::to_string(l) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace polyvf
