#include "polyvf/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include <array>

#include <boost/numeric/odeint.hpp>
#include <json.hpp>

namespace polyvf {

namespace {

namespace odeint = boost::numeric::odeint;

constexpr double kPi = std::numbers::pi;

int mod(int a, int n) { return ((a % n) + n) % n; }

bool left_of(const Face& f, const IndexPair& chord, int n) {
  const int s = f.segments.front();
  return mod(s - chord.second, n) < mod(chord.first - chord.second, n);
}

// Counter-clockwise arc at infinity from the direction of `from` to that of `to`.
void append_arc(std::vector<cplx>& loop, cplx from, cplx to) {
  const double r = 0.5 * (std::abs(from) + std::abs(to));
  const double a0 = std::arg(from);
  double span = std::fmod(std::arg(to) - a0, 2 * kPi);
  if (span <= 0) span += 2 * kPi;
  const int n = std::max(8, static_cast<int>(span / 0.05));
  for (int i = 1; i < n; ++i) loop.push_back(std::polar(r, a0 + span * i / n));
  loop.push_back(to);
}

int winding(const std::vector<cplx>& loop, cplx z) {
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const cplx a = loop[i] - z, b = loop[(i + 1) % loop.size()] - z;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2 * kPi)));
}

std::size_t arc_index(const std::vector<cplx>& path, double frac) {
  std::vector<double> acc(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) acc[i] = acc[i - 1] + std::abs(path[i] - path[i - 1]);
  const double target = frac * acc.back();
  const auto it = std::lower_bound(acc.begin(), acc.end(), target);
  return std::min<std::size_t>(it - acc.begin(), path.size() - 2);
}

double nearest_root_distance(const Polynomial& p, cplx z) {
  double best = INFINITY;
  for (const auto& r : p.roots()) best = std::min(best, std::abs(z - r.position));
  return best;
}

// Roots strictly inside the loop through infinity described by the chord.
std::vector<int> expected_sides(const FaceStructure& fs, const std::vector<int>& face_root, const IndexPair& chord,
                                int n_roots, int n) {
  std::vector<int> side(n_roots, 0);
  for (std::size_t f = 0; f < fs.faces.size(); ++f)
    if (left_of(fs.faces[f], chord, n)) side[face_root[f]] = 1;
  return side;
}

using State = std::array<double, 3>;

// Follows dz/ds = v(z)/|v(z)| * (distance to the nearest root), tracking the
// flow time sigma of v itself, and hands each step to `stop(prev, z, sigma)`.
// False when the budget runs out first.
template <class Field, class Stop>
bool follow(const Polynomial& p, cplx z0, Field v, Stop stop, std::vector<cplx>& out) {
  auto rhs = [&](const State& x, State& dx, double) {
    const cplx z(x[0], x[1]);
    const cplx w = v(z);
    const double aw = std::abs(w);
    if (aw == 0.0) {
      dx = {0.0, 0.0, 0.0};
      return;
    }
    const double g = nearest_root_distance(p, z);
    const cplx u = w / aw * g;
    dx = {u.real(), u.imag(), g / aw};
  };
  auto stepper = odeint::make_dense_output(1e-12, 1e-10, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(State{z0.real(), z0.imag(), 0.0}, 0.0, 1e-3);
  cplx prev = z0;
  for (int step = 0; step < 200000; ++step) {
    stepper.do_step(rhs);
    const State& s = stepper.current_state();
    const cplx z(s[0], s[1]);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    if (stop(prev, z, s[2])) return true;
    out.push_back(z);
    prev = z;
  }
  return false;
}

// Intersection parameter of segments a-b and c-e, or -1.
double cross_at(cplx a, cplx b, cplx c, cplx e) {
  const cplx r = b - a, s = e - c, q = c - a;
  const double den = r.real() * s.imag() - r.imag() * s.real();
  if (den == 0.0) return -1.0;
  const double t = (q.real() * s.imag() - q.imag() * s.real()) / den;
  const double u = (q.real() * r.imag() - q.imag() * r.real()) / den;
  return (t >= 0 && t <= 1 && u >= 0 && u <= 1) ? t : -1.0;
}

// Segments of all traced paths, grouped in chunks with bounding boxes.
class PathIndex {
 public:
  explicit PathIndex(const std::vector<SeparatrixTrace>& traces) : traces_(traces) {
    for (const auto& t : traces) {
      for (std::size_t m = 0; m + 1 < t.path.size(); m += kChunk) {
        Chunk c{t.index, m, std::min(m + kChunk, t.path.size() - 1), INFINITY, -INFINITY, INFINITY, -INFINITY};
        for (std::size_t i = c.begin; i <= c.end; ++i) {
          c.lo_x = std::min(c.lo_x, t.path[i].real());
          c.hi_x = std::max(c.hi_x, t.path[i].real());
          c.lo_y = std::min(c.lo_y, t.path[i].imag());
          c.hi_y = std::max(c.hi_y, t.path[i].imag());
        }
        chunks_.push_back(c);
      }
    }
  }

  // Traced segment crossed first when walking from a to b.
  bool crossing(cplx a, cplx b, int& trace, std::size_t& seg, cplx& at) const {
    const double lo_x = std::min(a.real(), b.real()), hi_x = std::max(a.real(), b.real());
    const double lo_y = std::min(a.imag(), b.imag()), hi_y = std::max(a.imag(), b.imag());
    double best = 2.0;
    for (const auto& c : chunks_) {
      if (c.hi_x < lo_x || c.lo_x > hi_x || c.hi_y < lo_y || c.lo_y > hi_y) continue;
      const auto& path = traces_[c.trace].path;
      for (std::size_t m = c.begin; m < c.end; ++m) {
        const double s = cross_at(a, b, path[m], path[m + 1]);
        if (s >= 0 && s < best) {
          best = s;
          trace = c.trace;
          seg = m;
        }
      }
    }
    if (best > 1.0) return false;
    at = a + best * (b - a);
    return true;
  }

 private:
  static constexpr std::size_t kChunk = 32;
  struct Chunk {
    int trace;
    std::size_t begin, end;
    double lo_x, hi_x, lo_y, hi_y;
  };
  const std::vector<SeparatrixTrace>& traces_;
  std::vector<Chunk> chunks_;
};

// Integral of dz/P from end e_k to end e_j inside their alpha-omega zone. In
// rectifying coordinates the zone is a strip with s_k on its lower edge and
// s_j on the upper edge next to the source. The path runs in along s_k,
// climbs a little into the zone (along iP, which is vertical there), follows
// a trajectory back towards the source, climbs again until it meets s_j, and
// leaves along s_j. Climbing from too far out meets a different separatrix;
// then start deeper. Every candidate path must separate the roots the way
// the class says, which is checked by winding numbers.
cplx transversal_integral(const Polynomial& p, const std::vector<SeparatrixTrace>& traces, const PathIndex& index,
                          int k, int j, const std::vector<int>& expected) {
  static const double fracs[] = {1.0 / 3, 0.6, 0.15};
  static const double depths[] = {0.1, 1e-2, 1e-3, 1e-4};
  static const double heights[] = {0.05, 0.005, 0.0005};
  const SeparatrixTrace& tk = traces[k];
  const SeparatrixTrace& tj = traces[j];
  const auto& roots = p.roots();
  const cplx src = roots[tj.root].position;
  double sep = INFINITY;
  for (std::size_t r = 0; r < roots.size(); ++r)
    if (static_cast<int>(r) != tj.root) sep = std::min(sep, std::abs(roots[r].position - src));
  // The zone is at most as high as the cylinder around a simple end point,
  // whose period is 2 pi i Res. Multiple roots have no such cylinder.
  double cylinder = INFINITY;
  for (int r : {tj.root, tk.root})
    if (roots[r].multiplicity == 1) cylinder = std::min(cylinder, 2 * kPi * std::abs(residue(p, roots[r].position).real()));
  if (!std::isfinite(cylinder)) cylinder = 2 * kPi * std::pow(p.root_scale(), 1 - p.degree());
  const auto P = [&p](cplx z) { return p(z); };
  const auto up = [&](cplx z) { return cplx(0, 1) * P(z); };

  for (double hf : heights) {
    const double h0 = hf * cylinder;
    for (double f1 : fracs) {
      const std::size_t i1 = arc_index(tk.path, f1);
      std::vector<cplx> head(tk.path.begin(), tk.path.begin() + i1 + 1);
      if (!follow(p, head.back(), up, [&](cplx, cplx, double sigma) { return sigma >= h0; }, head)) continue;
      for (double depth : depths) {
        const double rho = depth * sep;
        if (std::abs(head.back() - src) < 2 * rho) continue;
        std::vector<cplx> poly = head;
        if (!follow(
                p, poly.back(), [&](cplx z) { return -P(z); },
                [&](cplx, cplx z, double) { return std::abs(z - src) < rho; }, poly))
          continue;

        int hit_trace = -1;
        std::size_t hit = 0;
        cplx meet{};
        const bool met = follow(
            p, poly.back(), up,
            [&](cplx a, cplx b, double sigma) {
              // Skip the first stretch: the climb starts h0 above the lower edge.
              return sigma > 0.5 * h0 && index.crossing(a, b, hit_trace, hit, meet);
            },
            poly);
        if (!met || hit_trace != j) continue;
        poly.push_back(meet);
        for (std::size_t i = hit + 1; i-- > 0;) poly.push_back(tj.path[i]);

        std::vector<cplx> loop = poly;
        append_arc(loop, tj.path.front(), tk.path.front());
        loop.pop_back();
        bool ok = true;
        for (std::size_t r = 0; r < roots.size() && ok; ++r) ok = winding(loop, roots[r].position) == expected[r];
        if (!ok) continue;
        try {
          return -tk.tail_time + path_time_integral(p, poly) + tj.tail_time;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::PathThroughSingularity) throw;
        }
      }
    }
  }
  throw Error(ErrorKind::CrossingPathHitsSingularity,
              "no crossing path between s" + std::to_string(k) + " and s" + std::to_string(j) + " stays in its zone");
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void check_metric_graph(const MetricGraph& m) {
  if (static_cast<int>(m.taus.size()) != m.cls.h())
    throw Error(ErrorKind::InvalidInput, "expected " + std::to_string(m.cls.h()) + " tau values");
  if (static_cast<int>(m.alphas.size()) != m.cls.s())
    throw Error(ErrorKind::InvalidInput, "expected " + std::to_string(m.cls.s()) + " alpha values");
  for (double t : m.taus)
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidInput, "tau must be positive");
  for (cplx a : m.alphas)
    if (!(a.imag() > 0.0) || !std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw Error(ErrorKind::InvalidInput, "alpha must lie in the upper half plane");
}

std::vector<cplx> invariant_list(const MetricGraph& m) {
  std::vector<cplx> v(m.alphas.begin(), m.alphas.end());
  for (double t : m.taus) v.emplace_back(t, 0.0);
  return v;
}

double invariant_distance(const MetricGraph& a, const MetricGraph& b) {
  if (!(a.cls == b.cls)) return INFINITY;
  const auto va = invariant_list(a), vb = invariant_list(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double scale = std::max(std::abs(va[i]), std::abs(vb[i]));
    if (scale > 0) worst = std::max(worst, std::abs(va[i] - vb[i]) / scale);
  }
  return worst;
}

SeparatrixData separatrix_data(const SeparatrixGraphNumeric& g) {
  SeparatrixData data;
  data.d = g.poly.degree();
  data.n_roots = static_cast<int>(g.poly.roots().size());
  const int n = 2 * (data.d - 1);
  if (static_cast<int>(g.traces.size()) != n) throw Error(ErrorKind::InconsistentGraph, "wrong number of traces");
  data.partner.assign(n, -1);
  data.root.assign(n, -1);
  for (const auto& t : g.traces) {
    if (t.outcome == TraceOutcome::Uncertain)
      throw Error(ErrorKind::InconsistentGraph, "s" + std::to_string(t.index) + " is uncertain: " + t.diagnostic);
    if (t.outcome == TraceOutcome::Homoclinic)
      data.partner[t.index] = t.partner;
    else
      data.root[t.index] = t.root;
  }

  // Separatrices cannot cross, so they reach each root in the same
  // counter-clockwise order as their ends at infinity.
  for (int r = 0; r < data.n_roots; ++r) {
    std::vector<std::pair<double, int>> arr;
    for (const auto& t : g.traces)
      if (t.outcome == TraceOutcome::Landing && t.root == r)
        arr.push_back({std::arg(t.pivot - g.poly.roots()[r].position), t.index});
    if (arr.size() < 3) continue;
    std::sort(arr.begin(), arr.end());
    int descents = 0;
    for (std::size_t i = 0; i < arr.size(); ++i)
      if (arr[(i + 1) % arr.size()].second < arr[i].second) ++descents;
    if (descents != 1)
      throw Error(ErrorKind::InconsistentGraph,
                  "separatrices arrive at root " + std::to_string(r) + " out of order");
  }
  return data;
}

Classification analyze_graph(const Polynomial& p, const SeparatrixGraphNumeric& g) {
  Classification out;
  out.graph = g;
  out.data = separatrix_data(g);
  try {
    out.cls = class_from_data(out.data);
  } catch (const Error& e) {
    throw Error(ErrorKind::InconsistentGraph, e.what());
  }
  const int n = out.cls.n_ends();
  const FaceStructure fs = faces_of(out.cls);
  const auto& roots = p.roots();
  out.face_root.assign(fs.faces.size(), -1);
  std::vector<int> root_face(roots.size(), -1);
  auto bind = [&](int f, int r) {
    if ((out.face_root[f] >= 0 && out.face_root[f] != r) || (root_face[r] >= 0 && root_face[r] != f))
      throw Error(ErrorKind::InconsistentGraph, "landing pattern does not match the faces of the class");
    out.face_root[f] = r;
    root_face[r] = f;
  };
  for (int l = 0; l < n; ++l)
    if (out.data.root[l] >= 0) bind(fs.face_of_segment[l], out.data.root[l]);

  // Centers: match the set of homoclinic loops surrounding each remaining root.
  std::vector<std::vector<cplx>> loops;
  for (const auto& pr : out.cls.round) {
    const auto& t = g.traces[pr.first];
    std::vector<cplx> loop = t.path;
    append_arc(loop, t.path.back(), t.path.front());
    loop.pop_back();
    loops.push_back(std::move(loop));
  }
  for (std::size_t r = 0; r < roots.size(); ++r) {
    if (root_face[r] >= 0) continue;
    std::vector<int> inside;
    for (const auto& loop : loops) inside.push_back(winding(loop, roots[r].position));
    int match = -1;
    for (std::size_t f = 0; f < fs.faces.size(); ++f) {
      if (out.face_root[f] >= 0 || fs.faces[f].kind != FaceKind::Center) continue;
      bool ok = true;
      for (std::size_t c = 0; c < out.cls.round.size() && ok; ++c)
        ok = inside[c] == (left_of(fs.faces[f], out.cls.round[c], n) ? 1 : 0);
      if (ok) match = static_cast<int>(f);
    }
    if (match < 0) throw Error(ErrorKind::InconsistentGraph, "center " + format_complex(roots[r].position) +
                                                                 " matches no face of the class");
    bind(match, static_cast<int>(r));
  }

  MetricGraph& m = out.metric;
  m.cls = out.cls;
  for (const auto& pr : out.cls.round) {
    const cplx tau = g.traces[pr.first].tau;
    if (!(tau.real() > 0.0)) throw Error(ErrorKind::InconsistentGraph, "non-positive homoclinic time");
    m.taus.push_back(tau.real());
  }
  const PathIndex index(g.traces);
  for (const auto& pr : out.cls.square) {
    const auto side = expected_sides(fs, out.face_root, pr, static_cast<int>(roots.size()), n);
    const cplx a = transversal_integral(p, g.traces, index, pr.first, pr.second, side);
    if (!(a.imag() > 0.0))
      throw Error(ErrorKind::InconsistentGraph, "transversal invariant " + format_complex(a) + " not in the upper half plane");
    m.alphas.push_back(a);
  }
  return out;
}

MetricGraph analytic_invariants(const Polynomial& p, const SeparatrixGraphNumeric& g) {
  return analyze_graph(p, g).metric;
}

Classification classify(const Polynomial& p, const TraceOptions& opts, int threads) {
  return analyze_graph(p, separatrix_graph(p, opts, threads));
}

std::vector<cplx> residues_from_graph(const MetricGraph& m) {
  if (static_cast<int>(m.taus.size()) != m.cls.h() || static_cast<int>(m.alphas.size()) != m.cls.s())
    throw Error(ErrorKind::UnboundedFace, "invariant count does not match the class");
  std::map<IndexPair, cplx> value;
  for (std::size_t i = 0; i < m.taus.size(); ++i) value[m.cls.round[i]] = m.taus[i];
  for (std::size_t i = 0; i < m.alphas.size(); ++i) value[m.cls.square[i]] = m.alphas[i];
  const FaceStructure fs = faces_of(m.cls);
  const int n = m.cls.n_ends();
  std::vector<cplx> res;
  for (const auto& f : fs.faces) {
    if (f.segments.empty()) throw Error(ErrorKind::UnboundedFace, "face without boundary segments");
    // Summed over bounding chords the non-local terms cancel because the
    // residues of 1/P add up to zero.
    cplx s = 0.0;
    auto add = [&](const IndexPair& c) {
      const auto it = value.find(c);
      if (it == value.end()) throw Error(ErrorKind::UnboundedFace, "face bounded by an unknown chord");
      s += left_of(f, c, n) ? it->second : -it->second;
    };
    for (const auto& c : f.round_chords) add(c);
    for (const auto& c : f.square_chords) add(c);
    res.push_back(s / kappa);
  }
  return res;
}

std::string format_metric_graph(const MetricGraph& m) {
  std::string out = "class: " + format_bracketing(m.cls) + "\ntaus: [";
  for (std::size_t i = 0; i < m.taus.size(); ++i) out += (i ? ", " : "") + num(m.taus[i]);
  out += "]\nalphas: [";
  for (std::size_t i = 0; i < m.alphas.size(); ++i)
    out += (i ? ", [" : "[") + num(m.alphas[i].real()) + ", " + num(m.alphas[i].imag()) + "]";
  out += "]\n";
  return out;
}

MetricGraph parse_metric_graph(std::string_view text) {
  MetricGraph m;
  bool have_class = false;
  nlohmann::json taus = nlohmann::json::array(), alphas = nlohmann::json::array();
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::InvalidInput, "expected 'key: value' in '" + line + "'");
    std::string key = line.substr(0, colon);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    const std::string value = line.substr(colon + 1);
    try {
      if (key == "class") {
        m.cls = parse_bracketing(value);
        have_class = true;
      } else if (key == "taus") {
        taus = nlohmann::json::parse(value);
      } else if (key == "alphas") {
        alphas = nlohmann::json::parse(value);
      } else {
        throw Error(ErrorKind::InvalidInput, "unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidInput, "bad array for '" + key + "': " + e.what());
    }
  }
  if (!have_class) throw Error(ErrorKind::InvalidInput, "metric graph lacks a class");
  try {
    for (const auto& t : taus) m.taus.push_back(t.get<double>());
    for (const auto& a : alphas) {
      if (!a.is_array() || a.size() != 2) throw Error(ErrorKind::InvalidInput, "alpha entries are [re, im] pairs");
      m.alphas.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad invariant value: ") + e.what());
  }
  check_metric_graph(m);
  return m;
}

}  // namespace polyvf
