#include "polyvf/combinat.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace polyvf {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

IndexPair normalize_pair(int a, int b) { return (a % 2) ? IndexPair{a, b} : IndexPair{b, a}; }

bool crosses(const IndexPair& p, const IndexPair& q) {
  const int a = std::min(p.first, p.second), b = std::max(p.first, p.second);
  const int c = std::min(q.first, q.second), e = std::max(q.first, q.second);
  return (a < c && c < b && b < e) || (c < a && a < e && e < b);
}

void check_pairs(int d, const std::vector<IndexPair>& pairs) {
  const int n = 2 * (d - 1);
  std::vector<int> used(n, 0);
  for (const auto& [a, b] : pairs) {
    for (int x : {a, b}) {
      if (x < 0 || x >= n) throw Error(ErrorKind::MalformedBracketing, "index " + std::to_string(x) + " out of range");
      if (used[x]++) throw Error(ErrorKind::MalformedBracketing, "index " + std::to_string(x) + " used twice");
    }
  }
  for (const auto& [a, b] : pairs)
    if ((a % 2) == (b % 2))
      throw Error(ErrorKind::ParityViolation,
                  "pair (" + std::to_string(a) + "," + std::to_string(b) + ") joins indices of equal parity");
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j)
      if (crosses(pairs[i], pairs[j]))
        throw Error(ErrorKind::CrossingPairs, "pairs (" + std::to_string(pairs[i].first) + "," +
                                                  std::to_string(pairs[i].second) + ") and (" +
                                                  std::to_string(pairs[j].first) + "," +
                                                  std::to_string(pairs[j].second) + ") cross");
}

}  // namespace

std::vector<Bracketing::Mark> Bracketing::marks() const {
  std::vector<Mark> m(n_ends(), Mark::Unpaired);
  for (const auto& [k, j] : round) m[k] = m[j] = Mark::Round;
  for (const auto& [k, j] : square) m[k] = m[j] = Mark::Square;
  return m;
}

std::vector<int> Bracketing::mates() const {
  std::vector<int> m(n_ends(), -1);
  for (const auto* v : {&round, &square})
    for (const auto& [k, j] : *v) {
      m[k] = j;
      m[j] = k;
    }
  return m;
}

bool operator==(const Bracketing& a, const Bracketing& b) {
  return a.d == b.d && a.round == b.round && a.square == b.square && a.unpaired == b.unpaired;
}

Bracketing make_bracketing(int d, std::vector<IndexPair> round, std::vector<IndexPair> square) {
  if (d < 2) throw Error(ErrorKind::MalformedBracketing, "degree must be at least 2");
  std::vector<IndexPair> all;
  for (auto* v : {&round, &square})
    for (auto& p : *v) {
      p = normalize_pair(p.first, p.second);
      all.push_back(p);
    }
  check_pairs(d, all);
  Bracketing c;
  c.d = d;
  std::sort(round.begin(), round.end());
  std::sort(square.begin(), square.end());
  c.round = std::move(round);
  c.square = std::move(square);
  const auto mates = c.mates();
  for (int i = 0; i < c.n_ends(); ++i)
    if (mates[i] < 0) c.unpaired.push_back(i);
  return c;
}

Bracketing parse_bracketing(std::string_view text) {
  struct Frame {
    char type;
    int first = -1;
  };
  std::vector<Frame> stack;
  std::vector<int> seen;
  std::vector<IndexPair> round, square;
  enum class Tok { None, Open, Close, Number } last = Tok::None;
  int last_index = -1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      int v = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        v = v * 10 + (text[i] - '0');
        if (v > 100000) throw Error(ErrorKind::MalformedBracketing, "index too large");
        ++i;
      }
      if (last == Tok::Open) stack.back().first = v;
      seen.push_back(v);
      last_index = v;
      last = Tok::Number;
      continue;
    }
    if (ch == '(' || ch == '[') {
      stack.push_back({ch});
      last = Tok::Open;
      ++i;
      continue;
    }
    if (ch == ')' || ch == ']') {
      const char want = ch == ')' ? '(' : '[';
      if (stack.empty() || stack.back().type != want)
        throw Error(ErrorKind::MalformedBracketing, "unbalanced '" + std::string(1, ch) + "'");
      if (last != Tok::Number || stack.back().first < 0)
        throw Error(ErrorKind::MalformedBracketing, "bracket must open and close on an index");
      if (stack.back().first == last_index)
        throw Error(ErrorKind::MalformedBracketing, "bracket encloses a single index");
      (want == '(' ? round : square).push_back({stack.back().first, last_index});
      stack.pop_back();
      last = Tok::Close;
      ++i;
      continue;
    }
    throw Error(ErrorKind::MalformedBracketing, "unexpected character '" + std::string(1, ch) + "'");
  }
  if (!stack.empty()) throw Error(ErrorKind::MalformedBracketing, "unclosed bracket");
  const int n = static_cast<int>(seen.size());
  if (n < 2 || n % 2) throw Error(ErrorKind::MalformedBracketing, "need an even number (>= 2) of indices");
  std::vector<int> count(n, 0);
  for (int v : seen) {
    if (v >= n) throw Error(ErrorKind::MalformedBracketing, "index " + std::to_string(v) + " out of range");
    if (count[v]++) throw Error(ErrorKind::MalformedBracketing, "index " + std::to_string(v) + " repeated");
  }
  return make_bracketing(n / 2 + 1, std::move(round), std::move(square));
}

std::string format_bracketing(const Bracketing& c) {
  const int n = c.n_ends();
  std::vector<std::vector<std::pair<int, char>>> opens(n);  // (upper, bracket)
  std::vector<std::vector<std::pair<int, char>>> closes(n);
  for (const auto* v : {&c.round, &c.square}) {
    const bool is_round = v == &c.round;
    for (const auto& [k, j] : *v) {
      const int lo = std::min(k, j), hi = std::max(k, j);
      opens[lo].push_back({hi, is_round ? '(' : '['});
      closes[hi].push_back({lo, is_round ? ')' : ']'});
    }
  }
  std::string out;
  bool prev_number = false;
  for (int l = 0; l < n; ++l) {
    auto& o = opens[l];
    std::sort(o.begin(), o.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (auto& [hi, br] : o) {
      out += br;
      prev_number = false;
    }
    if (prev_number) out += ' ';
    out += std::to_string(l);
    prev_number = true;
    auto& cl = closes[l];
    std::sort(cl.begin(), cl.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (auto& [lo, br] : cl) {
      out += br;
      prev_number = false;
    }
  }
  return out;
}

Dimensions class_dimensions(const Bracketing& c) {
  Dimensions d;
  d.s = c.s();
  d.h = c.h();
  d.mstar = c.mstar();
  d.dim = 2 * d.s + d.h;
  d.codim = 2 * (c.d - 1) - d.dim;
  return d;
}

std::string_view to_string(FaceKind k) {
  switch (k) {
    case FaceKind::Center: return "center";
    case FaceKind::Source: return "source";
    case FaceKind::Sink: return "sink";
    case FaceKind::Multiple: return "multiple";
  }
  return "unknown";
}

FaceStructure faces_of(const Bracketing& c) {
  const int n = c.n_ends();
  const auto mates = c.mates();
  const auto marks = c.marks();
  FaceStructure fs;
  fs.face_of_segment.assign(n, -1);
  for (int start = 0; start < n; ++start) {
    if (fs.face_of_segment[start] >= 0) continue;
    Face f;
    const int id = static_cast<int>(fs.faces.size());
    int seg = start;
    do {
      fs.face_of_segment[seg] = id;
      f.segments.push_back(seg);
      const int p = mod(seg + 1, n);
      if (mates[p] >= 0) {
        const IndexPair chord = normalize_pair(p, mates[p]);
        (marks[p] == Bracketing::Mark::Round ? f.round_chords : f.square_chords).push_back(chord);
        seg = mates[p];
      } else {
        ++f.unpaired;
        seg = p;
      }
    } while (seg != start);
    f.multiplicity = 1 + f.unpaired / 2;
    if (f.unpaired > 0)
      f.kind = FaceKind::Multiple;
    else if (!f.square_chords.empty())
      f.kind = (f.segments.front() % 2 == 0) ? FaceKind::Source : FaceKind::Sink;
    else
      f.kind = FaceKind::Center;
    fs.faces.push_back(std::move(f));
  }
  return fs;
}

int face_left_of_chord(const FaceStructure& fs, const IndexPair& chord) {
  return fs.face_of_segment.at(chord.second);
}

SeparatrixData separatrix_map(const Bracketing& c) {
  const auto fs = faces_of(c);
  const auto marks = c.marks();
  const auto mates = c.mates();
  SeparatrixData data;
  data.d = c.d;
  data.n_roots = static_cast<int>(fs.faces.size());
  data.partner.assign(c.n_ends(), -1);
  data.root.assign(c.n_ends(), -1);
  for (int l = 0; l < c.n_ends(); ++l) {
    if (marks[l] == Bracketing::Mark::Round)
      data.partner[l] = mates[l];
    else
      data.root[l] = fs.face_of_segment[l];
  }
  return data;
}

std::string_view to_string(ZoneKind k) {
  switch (k) {
    case ZoneKind::CenterOdd: return "center_odd";
    case ZoneKind::CenterEven: return "center_even";
    case ZoneKind::SepalOdd: return "sepal_odd";
    case ZoneKind::SepalEven: return "sepal_even";
    case ZoneKind::AlphaOmega: return "alpha_omega";
  }
  return "unknown";
}

std::vector<Zone> zones_from_data(const SeparatrixData& data) {
  const int n = 2 * (data.d - 1);
  if (static_cast<int>(data.partner.size()) != n || static_cast<int>(data.root.size()) != n)
    throw Error(ErrorKind::InconsistentZone, "separatrix data has the wrong size");
  std::vector<std::vector<int>> landing(data.n_roots);
  for (int l = 0; l < n; ++l) {
    const bool hom = data.partner[l] >= 0;
    if (hom == (data.root[l] >= 0))
      throw Error(ErrorKind::InconsistentZone, "separatrix " + std::to_string(l) + " must be homoclinic xor landing");
    if (hom) {
      const int p = data.partner[l];
      if (p >= n || data.partner[p] != l || (p % 2) == (l % 2))
        throw Error(ErrorKind::InconsistentZone, "homoclinic partners of " + std::to_string(l) + " disagree");
    } else {
      if (data.root[l] >= data.n_roots) throw Error(ErrorKind::InconsistentZone, "root id out of range");
      landing[data.root[l]].push_back(l);
    }
  }
  auto pred = [&](int l) {
    const auto& L = landing[data.root[l]];
    const auto it = std::find(L.begin(), L.end(), l);
    return it == L.begin() ? L.back() : *(it - 1);
  };
  std::vector<int> sigma(n);
  for (int l = 0; l < n; ++l) sigma[l] = mod((data.partner[l] >= 0 ? data.partner[l] : pred(l)) + 1, n);
  {
    std::vector<int> hit(n, 0);
    for (int v : sigma)
      if (hit[v]++) throw Error(ErrorKind::InconsistentZone, "end map is not a permutation");
  }

  std::vector<Zone> zones;
  std::vector<int> visited(n, 0);
  for (int start = 0; start < n; ++start) {
    if (visited[start]) continue;
    Zone z;
    std::vector<int> nonround;
    int l = start;
    do {
      visited[l] = 1;
      z.ends.push_back(l);
      if (data.partner[l] >= 0) {
        if (l % 2)
          z.homoclinics_left.push_back({l, data.partner[l]});
        else
          z.homoclinics_right.push_back({data.partner[l], l});
      } else {
        nonround.push_back(l);
        z.landing_separatrices.push_back(l);
        const int out = pred(l);
        if (out != l) z.landing_separatrices.push_back(out);
        if (std::find(z.equilibria.begin(), z.equilibria.end(), data.root[l]) == z.equilibria.end())
          z.equilibria.push_back(data.root[l]);
      }
      l = sigma[l];
    } while (l != start);
    std::sort(z.landing_separatrices.begin(), z.landing_separatrices.end());
    z.landing_separatrices.erase(std::unique(z.landing_separatrices.begin(), z.landing_separatrices.end()),
                                 z.landing_separatrices.end());

    const auto describe = [&] {
      std::string s = "zone with ends";
      for (int e : z.ends) s += " " + std::to_string(e);
      return s;
    };
    if (z.equilibria.empty()) {
      const bool odd = z.ends.front() % 2;
      for (int e : z.ends)
        if ((e % 2) != odd) throw Error(ErrorKind::InconsistentZone, describe() + " mixes parities around a center");
      z.kind = odd ? ZoneKind::CenterOdd : ZoneKind::CenterEven;
    } else if (z.equilibria.size() == 1) {
      if (nonround.size() != 1)
        throw Error(ErrorKind::InconsistentZone, describe() + " has one equilibrium but " +
                                                     std::to_string(nonround.size()) + " landing ends");
      z.sepal_end = nonround.front();
      z.kind = (z.sepal_end % 2) ? ZoneKind::SepalOdd : ZoneKind::SepalEven;
    } else if (z.equilibria.size() == 2) {
      int k = -1, j = -1;
      for (int e : nonround) {
        int& slot = (e % 2) ? k : j;
        if (slot >= 0) throw Error(ErrorKind::InconsistentZone, describe() + " has two landing ends of equal parity");
        slot = e;
      }
      if (k < 0 || j < 0) throw Error(ErrorKind::InconsistentZone, describe() + " lacks an odd or even landing end");
      z.transversal = {k, j};
      z.omega = data.root[k];
      z.alpha = data.root[j];
      if (z.alpha == z.omega) throw Error(ErrorKind::InconsistentZone, describe() + " has alpha = omega");
      z.kind = ZoneKind::AlphaOmega;
    } else {
      throw Error(ErrorKind::InconsistentZone, describe() + " touches more than two equilibria");
    }
    zones.push_back(std::move(z));
  }
  return zones;
}

std::vector<Zone> zones_of(const Bracketing& c) { return zones_from_data(separatrix_map(c)); }

int zone_of_end(const std::vector<Zone>& zones, int end) {
  for (std::size_t i = 0; i < zones.size(); ++i)
    if (std::find(zones[i].ends.begin(), zones[i].ends.end(), end) != zones[i].ends.end()) return static_cast<int>(i);
  throw Error(ErrorKind::InvalidInput, "end " + std::to_string(end) + " not found in any zone");
}

Bracketing class_from_data(const SeparatrixData& data) {
  const auto zones = zones_from_data(data);
  std::vector<IndexPair> round, square;
  for (int l = 0; l < static_cast<int>(data.partner.size()); ++l)
    if (data.partner[l] >= 0 && l % 2) round.push_back({l, data.partner[l]});
  for (const auto& z : zones)
    if (z.kind == ZoneKind::AlphaOmega) square.push_back(z.transversal);
  try {
    return make_bracketing(data.d, std::move(round), std::move(square));
  } catch (const Error& e) {
    throw Error(ErrorKind::InconsistentZone, std::string("extracted pairs are not a bracketing: ") + e.what());
  }
}

std::string_view to_string(Realizability r) { return r == Realizability::Confirmed ? "confirmed" : "candidate"; }

ValidationReport validate_class(const Bracketing& c) {
  ValidationReport rep;
  rep.dims = class_dimensions(c);
  auto fail = [&](std::string msg) { rep.errors.push_back(std::move(msg)); };
  try {
    const auto canon = make_bracketing(c.d, c.round, c.square);
    if (!(canon == c)) fail("pairs or unpaired list are not in normalized form");
  } catch (const Error& e) {
    fail(e.what());
    return rep;
  }
  if (c.mstar() < 0) fail("m* is negative");
  if (static_cast<int>(c.unpaired.size()) != 2 * c.mstar()) fail("|unpaired| != 2 m*");

  const auto fs = faces_of(c);
  rep.face_count = static_cast<int>(fs.faces.size());
  if (rep.face_count != c.s() + c.h() + 1) fail("face count differs from s + h + 1");
  int total = 0;
  for (const auto& f : fs.faces) total += f.multiplicity;
  if (total != c.d) fail("face multiplicities do not sum to d");

  const auto data = separatrix_map(c);
  std::vector<std::vector<int>> received(fs.faces.size());
  for (int l = 0; l < c.n_ends(); ++l)
    if (data.root[l] >= 0) received[data.root[l]].push_back(l);
  for (std::size_t i = 0; i < fs.faces.size(); ++i) {
    const auto& f = fs.faces[i];
    const auto& r = received[i];
    const bool any_even = std::any_of(r.begin(), r.end(), [](int l) { return l % 2 == 0; });
    const bool any_odd = std::any_of(r.begin(), r.end(), [](int l) { return l % 2 == 1; });
    switch (f.kind) {
      case FaceKind::Center:
        if (!r.empty()) fail("a center receives a landing separatrix");
        break;
      case FaceKind::Source:
        if (any_odd || !any_even) fail("a source must receive only incoming separatrices");
        break;
      case FaceKind::Sink:
        if (any_even || !any_odd) fail("a sink must receive only outgoing separatrices");
        break;
      case FaceKind::Multiple:
        if (!any_even || !any_odd) fail("a multiple point must receive both kinds of separatrices");
        break;
    }
  }
  try {
    rep.zones = zones_from_data(data);
    for (const auto& z : rep.zones) {
      if (z.kind == ZoneKind::SepalOdd || z.kind == ZoneKind::SepalEven) {
        int ev = 0, od = 0;
        for (int l : z.landing_separatrices) (l % 2 ? od : ev)++;
        if (ev != 1 || od != 1) fail("sepal zone without exactly one incoming and one outgoing separatrix");
      }
      if ((z.kind == ZoneKind::CenterOdd || z.kind == ZoneKind::CenterEven) && !z.landing_separatrices.empty())
        fail("center zone with a landing separatrix");
    }
    const auto back = class_from_data(data);
    if (!(back == c)) fail("zone structure reproduces " + format_bracketing(back));
  } catch (const Error& e) {
    fail(e.what());
  }
  rep.valid = rep.errors.empty();
  return rep;
}

namespace {

using Matching = std::vector<IndexPair>;

// Non-crossing odd-even partial matchings of points lo..hi.
void matchings(int lo, int hi, std::vector<Matching>& out) {
  if (lo > hi) {
    out.push_back({});
    return;
  }
  std::vector<Matching> rest;
  matchings(lo + 1, hi, rest);
  for (auto& m : rest) out.push_back(std::move(m));
  for (int m = lo + 1; m <= hi; m += 2) {
    std::vector<Matching> inner, outer;
    matchings(lo + 1, m - 1, inner);
    matchings(m + 1, hi, outer);
    for (const auto& a : inner)
      for (const auto& b : outer) {
        Matching x{{lo, m}};
        x.insert(x.end(), a.begin(), a.end());
        x.insert(x.end(), b.begin(), b.end());
        out.push_back(std::move(x));
      }
  }
}

}  // namespace

std::vector<EnumeratedClass> enumerate_classes(int d, int cap, const WitnessFn& witness) {
  if (d < 2) throw Error(ErrorKind::InvalidInput, "degree must be at least 2");
  if (d > cap) throw Error(ErrorKind::CapExceeded, "degree " + std::to_string(d) + " exceeds cap " + std::to_string(cap));
  std::vector<Matching> all;
  matchings(0, 2 * (d - 1) - 1, all);
  std::vector<EnumeratedClass> out;
  std::set<std::string> seen;
  for (const auto& m : all) {
    const std::size_t np = m.size();
    for (unsigned mask = 0; mask < (1u << np); ++mask) {
      std::vector<IndexPair> round, square;
      for (std::size_t i = 0; i < np; ++i) ((mask >> i) & 1u ? round : square).push_back(m[i]);
      Bracketing c = make_bracketing(d, round, square);
      if (!seen.insert(format_bracketing(c)).second) continue;
      auto rep = validate_class(c);
      if (!rep.valid) continue;
      EnumeratedClass e{c, rep.dims, Realizability::Candidate};
      if (witness && witness(c)) e.flag = Realizability::Confirmed;
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end(), [](const EnumeratedClass& a, const EnumeratedClass& b) {
    if (a.dims.dim != b.dims.dim) return a.dims.dim < b.dims.dim;
    return format_bracketing(a.cls) < format_bracketing(b.cls);
  });
  return out;
}

int sign_changes(std::string_view itinerary) {
  int q = 0;
  for (std::size_t i = 1; i < itinerary.size(); ++i)
    if (itinerary[i] != itinerary[i - 1]) ++q;
  return q;
}

namespace {

char link_sign(const IndexPair& p, const IndexPair& q, int n) {
  if (p == q) return 0;
  if (mod(p.second + 1, n) == q.first) return '+';
  if (mod(p.second - 1, n) == q.first) return '-';
  return 0;
}

}  // namespace

std::vector<HChain> h_chains(const Bracketing& c) {
  const int n = c.n_ends();
  const auto& H = c.round;
  const int m = static_cast<int>(H.size());
  std::vector<std::vector<int>> succ(m), predl(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (link_sign(H[a], H[b], n)) {
        succ[a].push_back(b);
        predl[b].push_back(a);
      }

  auto make_chain = [&](const std::vector<int>& nodes, bool closed) {
    HChain ch;
    ch.closed = closed;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      ch.sequence.push_back(H[nodes[i]]);
      if (i + 1 < nodes.size()) ch.itinerary.push_back(link_sign(H[nodes[i]], H[nodes[i + 1]], n));
    }
    if (closed) ch.wrap = link_sign(H[nodes.back()], H[nodes.front()], n);
    return ch;
  };

  std::vector<HChain> out;
  std::set<std::vector<int>> seen_cycles;
  std::vector<int> path;
  std::vector<int> on(m, 0);
  // Depth-first over simple paths.
  auto dfs = [&](auto&& self, int v) -> void {
    path.push_back(v);
    on[v] = 1;
    bool extended = false;
    for (int w : succ[v]) {
      if (on[w]) {
        if (w == path.front()) {
          // canonical rotation of the cycle
          auto cyc = path;
          std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
          if (seen_cycles.insert(cyc).second) out.push_back(make_chain(cyc, true));
        }
        continue;
      }
      extended = true;
      self(self, w);
    }
    if (!extended) {
      const bool closes = std::find(succ[v].begin(), succ[v].end(), path.front()) != succ[v].end();
      bool start_free = true;
      for (int u : predl[path.front()])
        if (!on[u]) start_free = false;
      if (!closes && start_free) out.push_back(make_chain(path, false));
    }
    on[v] = 0;
    path.pop_back();
  };
  for (int v = 0; v < m; ++v) dfs(dfs, v);
  return out;
}

FormationResult can_form_homoclinic(const Bracketing& c, int k, int j) {
  const int n = c.n_ends();
  int a = -1, b = -1;
  for (int i = 0; i < c.h(); ++i) {
    if (c.round[i].first == k) a = i;
    if (c.round[i].second == j) b = i;
  }
  if (k < 0 || k >= n || k % 2 == 0 || a < 0)
    throw Error(ErrorKind::IndexNotHomoclinic, "index " + std::to_string(k) + " is not the odd end of a homoclinic");
  if (j < 0 || j >= n || j % 2 == 1 || b < 0)
    throw Error(ErrorKind::IndexNotHomoclinic, "index " + std::to_string(j) + " is not the even end of a homoclinic");
  if (a == b) throw Error(ErrorKind::InvalidInput, "(" + std::to_string(k) + "," + std::to_string(j) + ") is already a pair");

  const auto& H = c.round;
  const int m = c.h();
  // Breadth-first search for the shortest chain from s_{k,j0} to s_{k0,j}.
  std::vector<int> parent(m, -2);
  std::vector<int> queue{a};
  parent[a] = -1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int v = queue[qi];
    for (int w = 0; w < m; ++w)
      if (parent[w] == -2 && link_sign(H[v], H[w], n)) {
        parent[w] = v;
        queue.push_back(w);
      }
  }
  FormationResult res;
  if (parent[b] == -2) return res;
  std::vector<int> nodes;
  for (int v = b; v != -1; v = parent[v]) nodes.push_back(v);
  std::reverse(nodes.begin(), nodes.end());
  res.possible = true;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    res.chain.sequence.push_back(H[nodes[i]]);
    if (i + 1 < nodes.size()) res.chain.itinerary.push_back(link_sign(H[nodes[i]], H[nodes[i + 1]], n));
  }
  // closed when the chain also returns from the last entry to the first
  for (const auto& ch : h_chains(c))
    if (ch.closed && std::find(ch.sequence.begin(), ch.sequence.end(), H[a]) != ch.sequence.end() &&
        std::find(ch.sequence.begin(), ch.sequence.end(), H[b]) != ch.sequence.end())
      res.chain.closed = true;
  for (char s : res.chain.itinerary) res.sign_conditions.push_back(s == '+' ? -1 : +1);
  return res;
}

namespace {

// The center zone on the left of s_{k,j} contains the center of the face on
// the left of chord k -> j (segments j .. k-1); on the right, segments k .. j-1.
int center_face_of_zone(const FaceStructure& fs, const Zone& z) {
  int f = -1;
  if (!z.homoclinics_left.empty())
    f = fs.face_of_segment.at(z.homoclinics_left.front().second);
  else if (!z.homoclinics_right.empty())
    f = fs.face_of_segment.at(z.homoclinics_right.front().first);
  if (f < 0 || fs.faces[f].kind != FaceKind::Center)
    throw Error(ErrorKind::NotImplementedTransition, "no center matches a center zone");
  return f;
}

int zone_equilibrium(const FaceStructure& fs, const Zone& z, bool odd_separatrix) {
  switch (z.kind) {
    case ZoneKind::CenterOdd:
    case ZoneKind::CenterEven: return center_face_of_zone(fs, z);
    case ZoneKind::SepalOdd:
    case ZoneKind::SepalEven: return z.equilibria.front();
    case ZoneKind::AlphaOmega: return odd_separatrix ? z.omega : z.alpha;
  }
  return -1;
}

}  // namespace

Bracketing break_homoclinic(const Bracketing& c, const IndexPair& pair, int half_plane) {
  const IndexPair p = normalize_pair(pair.first, pair.second);
  if (std::find(c.round.begin(), c.round.end(), p) == c.round.end())
    throw Error(ErrorKind::NotAHomoclinic,
                "(" + std::to_string(pair.first) + "," + std::to_string(pair.second) + ") is not a round pair");
  if (half_plane != 1 && half_plane != -1) throw Error(ErrorKind::InvalidInput, "half plane must be +1 or -1");
  const auto [k, j] = p;
  const auto fs = faces_of(c);
  auto data = separatrix_map(c);
  const auto zones = zones_from_data(data);
  // zone(e_k) lies above the homoclinic (it is on its lower boundary),
  // zone(e_j) below it.
  const Zone& zk = zones[zone_of_end(zones, k)];
  const Zone& zj = zones[zone_of_end(zones, j)];
  const Zone& to_k = half_plane > 0 ? zj : zk;
  const Zone& to_j = half_plane > 0 ? zk : zj;
  data.partner[k] = data.partner[j] = -1;
  data.root[k] = zone_equilibrium(fs, to_k, true);
  data.root[j] = zone_equilibrium(fs, to_j, false);
  Bracketing out;
  try {
    out = class_from_data(data);
  } catch (const Error& e) {
    throw Error(ErrorKind::NotImplementedTransition, std::string("break does not lead to a known zone pattern: ") + e.what());
  }
  if (!validate_class(out).valid || class_dimensions(out).dim <= class_dimensions(c).dim)
    throw Error(ErrorKind::NotImplementedTransition, "break produced " + format_bracketing(out));
  return out;
}

}  // namespace polyvf
