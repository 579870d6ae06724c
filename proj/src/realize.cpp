#include "polyvf/realize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace polyvf {

namespace {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

int mod(int a, int n) { return ((a % n) + n) % n; }

bool face_left_of(const Face& f, const IndexPair& chord, int n) {
  return mod(f.segments.front() - chord.second, n) < mod(chord.first - chord.second, n);
}

std::vector<Root> as_roots(const Vec& x, const std::vector<int>& mult) {
  std::vector<Root> r(mult.size());
  for (std::size_t f = 0; f < mult.size(); ++f) r[f] = {x[f], mult[f]};
  return r;
}

double min_separation(const Vec& x) {
  double m = INFINITY;
  for (Eigen::Index a = 0; a < x.size(); ++a)
    for (Eigen::Index b = a + 1; b < x.size(); ++b) m = std::min(m, std::abs(x[a] - x[b]));
  return m;
}

// Face residues minus their targets (one dropped, the residues add up to
// zero), plus the centering condition.
struct ResidueSystem {
  std::vector<int> mult;
  std::vector<cplx> target;
  double rscale = 1.0, length = 1.0;

  Vec operator()(const Vec& x) const {
    const int n = static_cast<int>(mult.size());
    Vec g(n);
    const auto roots = as_roots(x, mult);
    for (int f = 0; f + 1 < n; ++f) g[f] = (residue_from_series(roots, f) - target[f]) / rscale;
    cplx c = 0.0;
    for (int f = 0; f < n; ++f) c += double(mult[f]) * x[f];
    g[n - 1] = c / length;
    return g;
  }

  Mat jacobian(const Vec& x) const {
    const Eigen::Index n = x.size();
    Mat J(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double h = 1e-7 * (length + std::abs(x[k]));
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      J.col(k) = ((*this)(xp) - (*this)(xm)) / (2.0 * h);
    }
    return J;
  }
};

struct NewtonOutcome {
  Vec x;
  bool ok = false;
  int iterations = 0;
};

NewtonOutcome newton(const ResidueSystem& sys, Vec x, int max_iter) {
  NewtonOutcome out;
  Vec g = sys(x);
  double norm = g.norm();
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    if (!std::isfinite(norm)) break;
    if (norm < 1e-13) {
      out.ok = true;
      break;
    }
    const Vec step = sys.jacobian(x).colPivHouseholderQr().solve(g);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool moved = false;
    while (lambda > 1e-4) {
      const Vec y = x - lambda * step;
      if (min_separation(y) > 1e-9 * sys.length) {
        const Vec gy = sys(y);
        const double ny = gy.norm();
        if (std::isfinite(ny) && ny < (1.0 - 0.25 * lambda) * norm) {
          x = y;
          g = gy;
          norm = ny;
          moved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!moved) {
      out.ok = norm < 1e-11;
      break;
    }
    if (x.cwiseAbs().maxCoeff() > 1e6 * sys.length) break;
  }
  out.x = x;
  return out;
}

double relative_mismatch(const MetricGraph& a, const MetricGraph& target) {
  if (!(a.cls == target.cls)) return INFINITY;
  const auto u = invariant_list(a), v = invariant_list(target);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    worst = std::max(worst, std::abs(u[i] - v[i]));
    scale = std::max(scale, std::abs(v[i]));
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace

std::string_view to_string(RealizeStatus s) {
  switch (s) {
    case RealizeStatus::Converged: return "converged";
    case RealizeStatus::ClassBoundary: return "class_boundary";
    case RealizeStatus::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

RealizationResult realize(const MetricGraph& target, const std::optional<Polynomial>& seed,
                          const RealizeOptions& opts) {
  check_metric_graph(target);
  const auto report = validate_class(target.cls);
  if (!report.valid) throw Error(ErrorKind::InvalidInput, "target class is not valid: " + report.errors.front());

  const FaceStructure fs = faces_of(target.cls);
  const int n = static_cast<int>(fs.faces.size());
  const int d = target.cls.d;

  ResidueSystem sys;
  for (const auto& f : fs.faces) sys.mult.push_back(f.multiplicity);
  sys.target = residues_from_graph(target);
  double rmax = 0.0;
  for (cplx r : sys.target) rmax = std::max(rmax, std::abs(r));
  sys.rscale = rmax > 0.0 ? rmax : 1.0;
  sys.length = rmax > 0.0 ? std::pow(rmax, -1.0 / (d - 1)) : 1.0;

  RealizationResult best;
  best.note = "no start converged";
  bool any_solution = false;
  std::vector<Vec> tried;

  auto attempt = [&](const Vec& start) -> bool {
    ++best.starts;
    const auto nt = newton(sys, start, opts.max_newton);
    best.iterations += nt.iterations;
    if (!nt.ok) return false;
    for (const auto& y : tried)
      if ((y - nt.x).cwiseAbs().maxCoeff() < 1e-6 * sys.length) return false;
    tried.push_back(nt.x);
    any_solution = true;

    Vec x = nt.x;
    cplx mean = 0.0;
    for (int f = 0; f < n; ++f) mean += double(sys.mult[f]) * x[f];
    x.array() -= mean / double(d);
    Polynomial p;
    try {
      p = Polynomial::from_roots(as_roots(x, sys.mult));
    } catch (const Error&) {
      return false;
    }
    Classification c;
    try {
      c = classify(p, opts.trace, 1);
    } catch (const Error& e) {
      if (!std::isfinite(best.residual)) best.note = std::string("candidate not classifiable: ") + e.what();
      return false;
    }
    const double r = relative_mismatch(c.metric, target);
    if (r < best.residual || !std::isfinite(best.residual)) {
      if (std::isfinite(r) || !std::isfinite(best.residual)) {
        best.polynomial = p;
        best.achieved = c.metric;
        if (std::isfinite(r)) best.residual = r;
        best.note = std::isfinite(r) ? "class reached" : "candidate in class " + format_bracketing(c.cls);
      }
    }
    return r < opts.tol;
  };

  bool done = false;
  if (n == 1) {
    done = attempt(Vec::Zero(1));
  }
  if (!done && seed) {
    try {
      const auto c = classify(*seed, opts.trace, 1);
      if (c.cls == target.cls) {
        Vec x(n);
        for (int f = 0; f < n; ++f) x[f] = seed->roots()[c.face_root[f]].position;
        done = attempt(x);
      }
    } catch (const Error&) {
    }
    if (!done && static_cast<int>(seed->roots().size()) == n) {
      Vec x(n);
      for (int f = 0; f < n; ++f) x[f] = seed->roots()[f].position;
      done = attempt(x);
    }
  }

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> spread(-1.0, 1.0);
  for (int s = 0; !done && s < opts.max_seeds; ++s) {
    const double scale = sys.length * std::pow(3.0, spread(rng));
    Vec x(n);
    for (int f = 0; f < n; ++f) x[f] = scale * cplx(gauss(rng), gauss(rng));
    if (min_separation(x) < 1e-3 * scale) continue;
    done = attempt(x);
  }

  if (done) {
    best.status = RealizeStatus::Converged;
    best.note = "converged";
  } else {
    best.status = any_solution ? RealizeStatus::ClassBoundary : RealizeStatus::BudgetExhausted;
  }
  return best;
}

JacobianReport invariant_jacobian(const Classification& c, double step) {
  const Polynomial& p = c.graph.poly;
  const FaceStructure fs = faces_of(c.cls);
  const int n = static_cast<int>(fs.faces.size());
  const int ends = c.cls.n_ends();
  std::vector<int> mult;
  Vec x0(n);
  for (int f = 0; f < n; ++f) {
    mult.push_back(fs.faces[f].multiplicity);
    x0[f] = p.roots()[c.face_root[f]].position;
  }

  std::vector<IndexPair> chords = c.cls.square;
  chords.insert(chords.end(), c.cls.round.begin(), c.cls.round.end());
  const int s = c.cls.s(), h = c.cls.h();

  // Real coordinates: Re/Im of the first n-1 face roots; the last one is
  // fixed by centering.
  auto invariants = [&](const Eigen::VectorXd& q) {
    Vec x(n);
    cplx acc = 0.0;
    for (int f = 0; f + 1 < n; ++f) {
      x[f] = {q[2 * f], q[2 * f + 1]};
      acc += double(mult[f]) * x[f];
    }
    x[n - 1] = -acc / double(mult[n - 1]);
    const auto roots = as_roots(x, mult);
    std::vector<cplx> res(n);
    for (int f = 0; f < n; ++f) res[f] = residue_from_series(roots, f);
    Eigen::VectorXd out(2 * (s + h));
    for (int i = 0; i < s + h; ++i) {
      cplx v = 0.0;
      for (int f = 0; f < n; ++f)
        if (face_left_of(fs.faces[f], chords[i], ends)) v += res[f];
      v *= kappa;
      out[2 * i] = v.real();
      out[2 * i + 1] = v.imag();
    }
    return out;
  };

  JacobianReport rep;
  rep.expected = 2 * s + h;
  const int m = 2 * (n - 1);
  if (m == 0) return rep;
  Eigen::VectorXd q0(m);
  for (int f = 0; f + 1 < n; ++f) {
    q0[2 * f] = x0[f].real();
    q0[2 * f + 1] = x0[f].imag();
  }
  const double hstep = step * p.root_scale();
  Eigen::MatrixXd J(2 * (s + h), m);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd qp = q0, qm = q0;
    qp[k] += hstep;
    qm[k] -= hstep;
    J.col(k) = (invariants(qp) - invariants(qm)) / (2.0 * hstep);
  }

  // Tangent space of the class: directions keeping every Im tau at zero.
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(m, m);
  if (h > 0) {
    Eigen::MatrixXd C(h, m);
    for (int i = 0; i < h; ++i) C.row(i) = J.row(2 * (s + i) + 1);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-8 * sv[0]) ++r;
    T = svd.matrixV().rightCols(m - r);
  }
  std::vector<int> rows;
  for (int i = 0; i < s; ++i) rows.insert(rows.end(), {2 * i, 2 * i + 1});
  for (int i = 0; i < h; ++i) rows.push_back(2 * (s + i));
  Eigen::MatrixXd Jr(rows.size(), m);
  for (std::size_t i = 0; i < rows.size(); ++i) Jr.row(i) = J.row(rows[i]);
  const Eigen::MatrixXd R = Jr * T;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    rep.singular_values.push_back(sv[i]);
    if (sv[i] > 1e-6 * sv[0]) ++rep.rank;
  }
  return rep;
}

ConeReport cone_scale_experiment(const Polynomial& p, double c, const TraceOptions& opts) {
  ConeReport rep;
  const auto base = classify(p, opts, 1);
  const auto scaled = classify(scale_roots(p, c), opts, 1);
  rep.base_class = base.cls;
  rep.scaled_class = scaled.cls;
  rep.class_preserved = base.cls == scaled.cls;
  if (rep.class_preserved) {
    const double f = std::pow(c, -(p.degree() - 1));
    const auto u = invariant_list(base.metric), v = invariant_list(scaled.metric);
    for (std::size_t i = 0; i < u.size(); ++i)
      rep.ratio_error = std::max(rep.ratio_error, std::abs(v[i] - f * u[i]) / std::abs(f * u[i]));
  } else {
    rep.ratio_error = INFINITY;
  }
  double ck = c;
  for (int k = 0; k < 6; ++k, ck /= 10.0) {
    const auto q = scale_roots(p, ck);
    double worst = 0.0;
    const auto& a = q.coefficients();
    for (std::size_t i = 0; i + 1 < a.size(); ++i) worst = std::max(worst, std::abs(a[i]));
    rep.coefficient_decay.emplace_back(ck, worst);
  }
  return rep;
}

AdjacencyReport adjacency_path_experiment(const std::vector<double>& x_grid, double im_alpha,
                                          const RealizeOptions& opts) {
  AdjacencyReport rep;
  const Bracketing cls = parse_bracketing("[0(1 2)3](4 5)");
  const FaceStructure fs = faces_of(cls);
  std::vector<int> centers;
  for (int f = 0; f < static_cast<int>(fs.faces.size()); ++f)
    if (fs.faces[f].kind == FaceKind::Center) centers.push_back(f);

  std::optional<Polynomial> seed;
  std::optional<std::pair<cplx, cplx>> last_centers;
  for (double x : x_grid) {
    AdjacencyPoint pt;
    pt.x = x;
    MetricGraph target{cls, std::vector<double>(cls.h(), x), {cplx(-x, im_alpha)}};
    const auto r = realize(target, seed, opts);
    pt.status = r.status;
    if (r.status == RealizeStatus::Converged) {
      pt.polynomial = r.polynomial;
      pt.fixed_combination = r.achieved.taus[0] + r.achieved.alphas[0];
      const auto c = classify(r.polynomial, opts.trace, 1);
      const auto& roots = r.polynomial.roots();
      for (int f : centers) pt.center_residues.push_back(residue(r.polynomial, roots[c.face_root[f]].position));
      const cplx a = roots[c.face_root[centers[0]]].position, b = roots[c.face_root[centers[1]]].position;
      pt.center_distance = std::abs(a - b);
      pt.zeta0 = roots[c.face_root[fs.face_of_segment[0]]].position;
      pt.zeta3 = roots[c.face_root[fs.face_of_segment[3]]].position;
      seed = r.polynomial;
      last_centers = {a, b};
    }
    rep.points.push_back(pt);
  }

  if (seed && last_centers) {
    std::vector<Root> merged;
    const auto [a, b] = *last_centers;
    for (const auto& r : seed->roots())
      if (r.position != a && r.position != b) merged.push_back(r);
    merged.push_back({0.5 * (a + b), 2});
    cplx mean = 0.0;
    for (const auto& r : merged) mean += double(r.multiplicity) * r.position;
    for (auto& r : merged) r.position -= mean / 4.0;
    rep.merged = Polynomial::from_roots(merged);
    rep.merged_available = true;
    try {
      rep.merged_class = format_bracketing(classify(rep.merged, opts.trace, 1).cls);
    } catch (const Error& e) {
      rep.merged_class = std::string("unclassified (") + e.what() + ")";
    }
  }
  return rep;
}

}  // namespace polyvf
