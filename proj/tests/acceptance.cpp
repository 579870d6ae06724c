// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "polyvf/cli.hpp"
#include "polyvf/realize.hpp"
#include "polyvf/stability.hpp"

using namespace polyvf;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) detail = why;
    ok = ok && cond;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Polynomial random_polynomial(std::mt19937_64& rng, int d, double box = 1.5) {
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<cplx> c(d + 1, 0.0);
  for (int i = 0; i + 1 < d; ++i) c[i] = {u(rng), u(rng)};
  c[d] = 1.0;
  return Polynomial::from_coefficients(c);
}

// Each base root matched to the nearest root of q; the largest distance.
double root_mismatch(const Polynomial& p, const Polynomial& q) {
  if (p.roots().size() != q.roots().size()) return INFINITY;
  double worst = 0.0;
  for (const auto& r : p.roots()) {
    double best = INFINITY;
    for (const auto& s : q.roots())
      if (s.multiplicity == r.multiplicity) best = std::min(best, std::abs(r.position - s.position));
    worst = std::max(worst, best);
  }
  return worst;
}

MetricGraph random_metric(const Bracketing& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.5, 2.0), arg(0.3, kPi - 0.3);
  MetricGraph m{b, {}, {}};
  for (int i = 0; i < b.h(); ++i) m.taus.push_back(mag(rng));
  for (int i = 0; i < b.s(); ++i) m.alphas.push_back(std::polar(mag(rng), arg(rng)));
  return m;
}

Verdict closed_form_homoclinic() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = classify(Polynomial::from_coefficients({1.0, 0.0, 1.0}));
  const double dt = seconds_since(t0);
  v.require(format_bracketing(c.cls) == "(0 1)", "class " + format_bracketing(c.cls));
  v.require(c.metric.taus.size() == 1 && std::abs(c.metric.taus[0] - kPi) < 1e-6, "tau off");
  v.require(dt < 1.0, "took " + num(dt) + " s");
  v.detail = v.ok ? "tau=" + num(c.metric.taus[0]) + " in " + num(dt) + " s" : v.detail;
  return v;
}

Verdict closed_form_transversal() {
  Verdict v;
  const auto p = Polynomial::from_coefficients({-1.0, 0.0, 1.0});
  const auto c = classify(p);
  v.require(format_bracketing(c.cls) == "[0 1]", "class " + format_bracketing(c.cls));
  v.require(c.metric.alphas.size() == 1 && std::abs(c.metric.alphas[0] - kPi * I) < 1e-6, "alpha off");
  if (!v.ok) return v;
  const auto res = residues_from_graph(c.metric);
  for (std::size_t f = 0; f < res.size(); ++f) {
    const cplx at = p.roots()[c.face_root[f]].position;
    v.require(std::abs(res[f] - residue(p, at)) < 1e-6, "graph residue differs from the field");
    v.require(std::abs(std::abs(res[f].real()) - 0.5) < 1e-6 && std::abs(res[f].imag()) < 1e-6,
              "residue " + format_complex(res[f]));
  }
  if (v.ok) v.detail = "alpha=" + format_complex(c.metric.alphas[0]) + ", residues +-1/2";
  return v;
}

Verdict scaling_law() {
  Verdict v;
  std::mt19937_64 rng(2024);
  int done = 0;
  double worst = 0.0;
  for (int attempt = 0; done < 50 && attempt < 2000; ++attempt) {
    const int d = 2 + attempt % 3;
    const auto p = random_polynomial(rng, d);
    try {
      const auto c = classify(p, {}, 1);
      if (class_dimensions(c.cls).dim != 2 * (d - 1)) continue;
    } catch (const Error&) {
      continue;
    }
    for (double s : {0.5, 2.0}) {
      const auto rep = cone_scale_experiment(p, s);
      v.require(rep.class_preserved, "class changed under scaling of " + format_coefficients(p));
      worst = std::max(worst, rep.ratio_error);
    }
    ++done;
  }
  v.require(done == 50, "only " + std::to_string(done) + " stable samples");
  v.require(worst < 1e-6, "relative error " + num(worst));
  if (v.ok) v.detail = "50 fields, worst relative error " + num(worst);
  return v;
}

Verdict dimension_formulas() {
  Verdict v;
  std::mt19937_64 rng(7);
  int classes = 0, witnesses = 0;
  for (int d = 2; d <= 4; ++d) {
    std::map<std::string, Polynomial> found;
    const WitnessFn witness = [&](const Bracketing& b) {
      RealizeOptions o;
      o.seed = rng();
      const auto r = realize(random_metric(b, rng), std::nullopt, o);
      if (r.status != RealizeStatus::Converged) return false;
      found[format_bracketing(b)] = r.polynomial;
      return true;
    };
    for (const auto& e : enumerate_classes(d, 5, witness)) {
      ++classes;
      const auto name = format_bracketing(e.cls);
      v.require(e.dims.dim + e.dims.codim == 2 * (d - 1), name + ": dim + codim");
      v.require(static_cast<int>(e.cls.unpaired.size()) == 2 * e.dims.mstar, name + ": unpaired count");
      if (e.flag == Realizability::Confirmed) {
        ++witnesses;
        v.require(found.at(name).multiplicity_excess() == e.dims.mstar, name + ": multiplicity excess");
      }
    }
  }
  if (v.ok) v.detail = std::to_string(classes) + " classes, " + std::to_string(witnesses) + " witnesses";
  return v;
}

Verdict roundtrip() {
  Verdict v;
  std::mt19937_64 rng(99);
  std::vector<Bracketing> pool;
  for (int d = 2; d <= 3; ++d)
    for (const auto& e : enumerate_classes(d)) pool.push_back(e.cls);
  double worst_inv = 0.0, worst_root = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto& b = pool[rng() % pool.size()];
    const auto target = random_metric(b, rng);
    RealizeOptions a, c;
    a.seed = 1;
    c.seed = 777;
    const auto ra = realize(target, std::nullopt, a), rc = realize(target, std::nullopt, c);
    const auto name = format_bracketing(b);
    v.require(ra.status == RealizeStatus::Converged && rc.status == RealizeStatus::Converged, name + " not realized");
    if (ra.status != RealizeStatus::Converged || rc.status != RealizeStatus::Converged) continue;
    const auto back = classify(ra.polynomial);
    v.require(back.cls == b, name + " came back as " + format_bracketing(back.cls));
    worst_inv = std::max(worst_inv, invariant_distance(back.metric, target));
    worst_root = std::max(worst_root, root_mismatch(ra.polynomial, rc.polynomial));
  }
  v.require(worst_inv < 1e-6, "invariant error " + num(worst_inv));
  v.require(worst_root < 1e-5, "seed disagreement " + num(worst_root));
  if (v.ok) v.detail = "20 graphs, invariant error " + num(worst_inv) + ", seed spread " + num(worst_root);
  return v;
}

Verdict density() {
  Verdict v;
  SweepOptions o;
  o.degree = 3;
  o.samples = 1000;
  const auto rep = sweep_classes(o);
  v.require(rep.full_fraction() >= 0.99, "full-dimension fraction " + num(rep.full_fraction()));
  v.detail = std::to_string(rep.full_dimension) + "/" + std::to_string(rep.samples - rep.uncertain) +
             " full dimension, " + std::to_string(rep.uncertain) + " uncertain";
  return v;
}

// Moves the roots of p so that its face residues become `target` (face
// order of faces_of, roots assigned through face_root). Newton on the
// residues of the first n-1 roots plus the centering condition.
std::optional<Polynomial> move_to_residues(const Classification& c, const std::vector<cplx>& target) {
  const auto& roots = c.graph.poly.roots();
  const int n = static_cast<int>(roots.size());
  std::vector<cplx> want(n);
  for (std::size_t f = 0; f < target.size(); ++f) want[c.face_root[f]] = target[f];
  Eigen::VectorXcd z(n);
  for (int i = 0; i < n; ++i) z[i] = roots[i].position;
  auto F = [&](const Eigen::VectorXcd& w) {
    std::vector<Root> r;
    for (int i = 0; i < n; ++i) r.push_back({w[i], 1});
    Eigen::VectorXcd out(n);
    for (int i = 0; i + 1 < n; ++i) out[i] = residue_from_series(r, i) - want[i];
    out[n - 1] = w.sum();
    return out;
  };
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXcd f0 = F(z);
    if (f0.norm() < 1e-14) break;
    Eigen::MatrixXcd J(n, n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXcd e = z;
      const double h = 1e-7;
      e[k] += h;
      Eigen::VectorXcd b = z;
      b[k] -= h;
      J.col(k) = (F(e) - F(b)) / (2 * h);
    }
    z -= J.partialPivLu().solve(f0);
  }
  if (F(z).norm() > 1e-10) return std::nullopt;
  std::vector<Root> r;
  for (int i = 0; i < n; ++i) r.push_back({z[i], 1});
  return Polynomial::from_roots(r, 1e-9);
}

bool has_round_pair(const Bracketing& b, const IndexPair& p) {
  return std::find(b.round.begin(), b.round.end(), p) != b.round.end();
}

Verdict h_chain_formation() {
  Verdict v;
  const auto base = parse_bracketing("(0 1)(2 3)");
  const auto w = realize(MetricGraph{base, {1.0, 1.5}, {}});
  v.require(w.status == RealizeStatus::Converged, "witness not realized");
  if (!v.ok) return v;
  const auto c = classify(w.polynomial);
  const auto form = can_form_homoclinic(base, 1, 2);
  v.require(form.possible && form.sign_conditions.size() == 1, "formation not predicted");
  if (!v.ok) return v;

  // Im tau along the chain: partial sums follow (or violate) the sign
  // conditions and the total vanishes.
  auto perturbed = [&](int sign) {
    std::vector<double> im(base.h(), 0.0);
    const double eps = 0.05;
    const auto& seq = form.chain.sequence;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto at = std::find(base.round.begin(), base.round.end(), seq[i]) - base.round.begin();
      im[at] = (i == 0 ? 1 : -1) * sign * eps;
    }
    const auto re = residues_from_graph(c.metric);
    const auto di = residues_from_graph(MetricGraph{base, im, {}});
    std::vector<cplx> target(re.size());
    for (std::size_t f = 0; f < re.size(); ++f) target[f] = re[f] + I * di[f];
    return move_to_residues(c, target);
  };

  const auto good = perturbed(form.sign_conditions[0]);
  const auto bad = perturbed(-form.sign_conditions[0]);
  v.require(good && bad, "perturbation did not converge");
  if (!v.ok) return v;
  const auto cg = classify(*good), cb = classify(*bad);
  v.require(has_round_pair(cg.cls, {1, 2}), "sign-respecting perturbation gave " + format_bracketing(cg.cls));
  v.require(!has_round_pair(cb.cls, {1, 2}), "sign-violating perturbation gave " + format_bracketing(cb.cls));
  if (v.ok) v.detail = "respecting: " + format_bracketing(cg.cls) + ", violating: " + format_bracketing(cb.cls);
  return v;
}

Verdict single_break() {
  Verdict v;
  const auto base = parse_bracketing("(0 1)");
  const auto c0 = classify(Polynomial::from_coefficients({1.0, 0.0, 1.0}));
  const cplx inside = c0.graph.poly.roots()[c0.face_root[face_left_of_chord(faces_of(base), base.round[0])]].position;
  for (double s : {1.0, -1.0}) {
    const auto p = Polynomial::from_coefficients({cplx(1.0, s * 1e-3), 0.0, 1.0});
    const auto c = classify(p);
    v.require(format_bracketing(c.cls) == "[0 1]", "class " + format_bracketing(c.cls));
    for (const auto& t : c.graph.traces) v.require(t.outcome == TraceOutcome::Landing, "separatrix does not land");
    // The continued return time kappa * res leaves the real axis; its half
    // plane selects the predicted class.
    cplx near = p.roots()[0].position;
    for (const auto& r : p.roots())
      if (std::abs(r.position - inside) < std::abs(near - inside)) near = r.position;
    const int half = (kappa * residue(p, near)).imag() > 0 ? 1 : -1;
    v.require(break_homoclinic(base, base.round[0], half) == c.cls, "break_homoclinic disagrees");
  }
  if (v.ok) v.detail = "both signs give [0 1] with landing separatrices";
  return v;
}

Verdict adjacency() {
  Verdict v;
  const auto rep = adjacency_path_experiment({1, 2, 4, 8, 16});
  v.require(rep.points.size() == 5 && rep.points[0].status == RealizeStatus::Converged, "x = 1 not realized");
  if (!v.ok) return v;
  const double sep = std::abs(rep.points[0].zeta0 - rep.points[0].zeta3);
  double prev = INFINITY;
  int reached = 0;
  for (const auto& pt : rep.points) {
    if (pt.status != RealizeStatus::Converged) {
      v.require(pt.x > 8, "x = " + num(pt.x) + " not realized");
      continue;
    }
    ++reached;
    v.require(pt.center_distance < prev, "center distance not decreasing at x = " + num(pt.x));
    prev = pt.center_distance;
    v.require(std::abs(pt.zeta0 - rep.points[0].zeta0) < 0.25 * sep, "zeta_[0] moved at x = " + num(pt.x));
    v.require(std::abs(pt.zeta3 - rep.points[0].zeta3) < 0.25 * sep, "zeta_[3] moved at x = " + num(pt.x));
  }
  v.require(rep.merged_available && rep.merged_class == "[0 1]2[3 4]5", "merged limit " + rep.merged_class);
  if (v.ok) v.detail = std::to_string(reached) + "/5 grid points, limit " + rep.merged_class;
  return v;
}

Verdict landing_stability() {
  Verdict v;
  const auto p = Polynomial::from_coefficients({-1.0, 0.0, 1.0});
  for (double delta : {0.01, 0.001}) {
    const auto r = check_landing_stability(p, 1, delta, 100);
    v.require(r.continued == 100, num(delta) + ": " + std::to_string(r.continued) + "/100");
  }
  const double margin = 1e-3;
  const auto s = protective_sector(p, 1, margin);
  v.require(std::abs(s.angle - (kPi / 2 - margin)) < 1e-12, "sector angle " + num(s.angle));
  if (v.ok) v.detail = "100/100 at both radii, sector pi/2 - " + num(margin);
  return v;
}

Verdict residue_sum() {
  Verdict v;
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto p = random_polynomial(rng, 2 + i % 5, 2.0);
    cplx sum = 0.0;
    double big = 0.0;
    for (const auto& r : p.roots()) {
      const cplx res = residue(p, r.position);
      sum += res;
      big = std::max(big, std::abs(res));
    }
    worst = std::max(worst, std::abs(sum) / big);
  }
  v.require(worst < 1e-10, "relative sum " + num(worst));
  v.detail = "worst relative sum " + num(worst);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"closed-form homoclinic", closed_form_homoclinic},
      {"closed-form transversal", closed_form_transversal},
      {"scaling law", scaling_law},
      {"dimension formulas", dimension_formulas},
      {"roundtrip inversion", roundtrip},
      {"density of stable classes", density},
      {"h-chain formation", h_chain_formation},
      {"single break", single_break},
      {"adjacency path", adjacency},
      {"landing stability", landing_stability},
      {"residue sum", residue_sum},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.ok;
    std::printf("%s %2zu %s (%s) [%.1f s]\n", v.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
