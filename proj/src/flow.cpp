#include "polyvf/flow.hpp"

#include <array>
#include <atomic>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

namespace polyvf {

namespace {

namespace odeint = boost::numeric::odeint;
using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

constexpr double kPi = std::numbers::pi;

// P in product form over a root list; better conditioned near roots than Horner.
struct Field {
  std::vector<cplx> zeta;
  std::vector<int> mult;
  int d = 0;

  explicit Field(const std::vector<Root>& roots, double unit = 1.0) {
    for (const auto& r : roots) {
      zeta.push_back(r.position / unit);
      mult.push_back(r.multiplicity);
      d += r.multiplicity;
    }
  }
  cplx P(cplx z) const {
    cplx v = 1.0;
    for (std::size_t i = 0; i < zeta.size(); ++i) {
      const cplx f = z - zeta[i];
      for (int k = 0; k < mult[i]; ++k) v *= f;
    }
    return v;
  }
  // Arc-length weight: ~distance to the nearest root near a root, ~|z|/d far out.
  double h(cplx z) const {
    double s = 0.0;
    for (std::size_t i = 0; i < zeta.size(); ++i) {
      const double r = std::abs(z - zeta[i]);
      if (r == 0.0) return 0.0;
      s += mult[i] / r;
    }
    return 1.0 / s;
  }
  double max_modulus() const {
    double m = 0.0;
    for (auto& z : zeta) m = std::max(m, std::abs(z));
    return m;
  }
  std::size_t nearest(cplx z) const {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < zeta.size(); ++i) {
      const double r = std::abs(z - zeta[i]);
      if (r < bd) {
        bd = r;
        best = i;
      }
    }
    return best;
  }
};

// int_z^inf dw/P along w = z/s: leading z^{1-d}/(d-1) plus the correction
// int_0^1 z s^{d-2} (1/Q(s) - 1/z^d) ds with Q(s) = prod (z - s zeta)^m.
// For |z| >= 2 max|zeta| the poles of 1/Q lie at |s| >= 2, so a fixed
// 30-point Gauss rule is converged far below rounding.
cplx tail_impl(const Field& f, cplx z) {
  const int d = f.d;
  const cplx zd = std::pow(z, d);
  const cplx lead = std::pow(z, 1 - d) / double(d - 1);
  auto integrand = [&](double s) -> cplx {
    cplx q = 1.0;
    for (std::size_t i = 0; i < f.zeta.size(); ++i) {
      const cplx fac = z - s * f.zeta[i];
      for (int k = 0; k < f.mult[i]; ++k) q *= fac;
    }
    return z * std::pow(s, d - 2) * ((zd - q) / (q * zd));
  };
  return lead + gauss<double, 30>::integrate(integrand, 0.0, 1.0);
}

struct TrapData {
  std::vector<double> radius;  // capture radius
  std::vector<double> pivot;   // pivot circle radius
  std::vector<cplx> lead;      // leading Taylor coefficient c_m at the root
  std::vector<double> eta;
};

TrapData trap_data(const Field& f) {
  TrapData t;
  std::vector<Root> roots;
  for (std::size_t i = 0; i < f.zeta.size(); ++i) roots.push_back({f.zeta[i], f.mult[i]});
  const auto coeffs = expand_roots(roots);
  for (std::size_t i = 0; i < f.zeta.size(); ++i) {
    const int m = f.mult[i];
    const auto c = taylor_coefficients(coeffs, f.zeta[i]);
    // Leading coefficient from the product form (exact up to rounding).
    cplx cm = 1.0;
    for (std::size_t j = 0; j < f.zeta.size(); ++j)
      if (j != i) cm *= std::pow(f.zeta[i] - f.zeta[j], f.mult[j]);
    const double eta = m == 1 ? std::min(0.1, 0.5 * std::abs(cm.real()) / std::abs(cm)) : 0.1;
    double r = std::numeric_limits<double>::infinity();
    for (int k = m + 1; k <= f.d; ++k) {
      const double ck = std::abs(c[k]);
      if (ck > 0.0) r = std::min(r, std::pow(eta * std::abs(cm) / ((f.d - m) * ck), 1.0 / (k - m)));
    }
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < f.zeta.size(); ++j)
      if (j != i) nearest = std::min(nearest, std::abs(f.zeta[i] - f.zeta[j]));
    if (std::isfinite(nearest))
      r = std::min(r, 0.4 * nearest);
    else
      r = std::min(r, 0.5 * (1.0 + f.max_modulus()));
    t.radius.push_back(r);
    t.pivot.push_back(0.5 * r);
    t.lead.push_back(cm);
    t.eta.push_back(eta);
  }
  return t;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a > kPi) a -= 2.0 * kPi;
  if (a < -kPi) a += 2.0 * kPi;
  return a;
}

using State = std::array<double, 3>;

SeparatrixTrace trace_normalized(const Field& f, int index, const TraceOptions& opts) {
  const int d = f.d;
  const int n_ends = 2 * (d - 1);
  SeparatrixTrace out;
  out.index = index;
  out.direction = (index % 2) ? 1 : -1;
  const double dir = out.direction;
  const double R = opts.escape_factor;
  const double delta = opts.landing_factor;
  const double angle_tol = opts.angle_tol > 0 ? opts.angle_tol : kPi / (4.0 * (d - 1));
  const TrapData trap = trap_data(f);

  // Start point exactly on the separatrix: Phi_inf(z) = -tail(z) = dir * t0.
  const double t0 = std::pow(R, 1 - d) / (d - 1);
  cplx z = std::polar(R, kPi * index / (d - 1));
  for (int it = 0; it < 30; ++it) {
    const cplx step = (-tail_impl(f, z) - dir * t0) * f.P(z);
    z -= step;
    if (std::abs(step) <= 1e-15 * std::abs(z)) break;
  }
  out.start = z;
  out.tail_time = tail_impl(f, z);

  auto rhs = [&f, dir](const State& x, State& dx, double) {
    const cplx w(x[0], x[1]);
    const cplx P = f.P(w);
    const double ap = std::abs(P);
    if (ap == 0.0) {
      dx = {0.0, 0.0, 0.0};
      return;
    }
    const double h = f.h(w);
    const cplx v = dir * P / ap * h;
    dx = {v.real(), v.imag(), h / ap};
  };

  auto stepper = odeint::make_dense_output(1e-14, opts.rtol, odeint::runge_kutta_dopri5<State>());
  State x0{z.real(), z.imag(), 0.0};
  stepper.initialize(x0, 0.0, 1e-3);
  if (opts.record_path) out.path.push_back(z);

  bool been_inside = false;
  int captured = -1;
  bool have_pivot = false;
  std::vector<int> crossing_root_seen(f.zeta.size(), 0);
  std::vector<std::pair<cplx, double>> last_crossing(f.zeta.size());
  cplx prev = z;

  auto finish = [&](TraceOutcome o, std::string diag) {
    out.outcome = o;
    out.diagnostic = std::move(diag);
  };

  while (true) {
    if (out.steps >= opts.step_budget) {
      if (captured >= 0 && have_pivot) {
        finish(TraceOutcome::Landing, "step budget reached after capture");
        out.root = captured;
      } else {
        finish(TraceOutcome::Uncertain, "step budget exhausted at z=" + format_complex(prev));
      }
      break;
    }
    const auto [sa, sb] = stepper.do_step(rhs);
    ++out.steps;
    const State& cur = stepper.current_state();
    const cplx zc(cur[0], cur[1]);
    if (!std::isfinite(zc.real()) || !std::isfinite(zc.imag())) {
      finish(TraceOutcome::Uncertain, "integration produced a non-finite point");
      break;
    }
    if (opts.record_path) out.path.push_back(zc);
    const double az = std::abs(zc);
    if (az < 0.5 * R) been_inside = true;

    // Inward crossing of the pivot circle of the nearest root.
    const std::size_t r = f.nearest(zc);
    const double wr = std::abs(zc - f.zeta[r]);
    const double wp = std::abs(prev - f.zeta[r]);
    if (wp > trap.pivot[r] && wr <= trap.pivot[r]) {
      double lo = sa, hi = sb;
      State xs;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, xs);
        if (std::abs(cplx(xs[0], xs[1]) - f.zeta[r]) > trap.pivot[r])
          lo = mid;
        else
          hi = mid;
      }
      stepper.calc_state(hi, xs);
      last_crossing[r] = {cplx(xs[0], xs[1]), xs[2]};
      crossing_root_seen[r] = 1;
      if (captured == static_cast<int>(r)) have_pivot = true;
    }

    if (captured < 0) {
      bool capture = wr < delta;
      if (!capture && wr < trap.radius[r]) {
        const int m = f.mult[r];
        const cplx w = zc - f.zeta[r];
        if (m == 1) {
          capture = (dir * trap.lead[r]).real() < 0.0;
        } else {
          const cplx v = std::pow(w, -(m - 1));
          const cplx V0 = -double(m - 1) * dir * trap.lead[r];
          const double cosang = (v * std::conj(V0)).real() / (std::abs(v) * std::abs(V0));
          capture = cosang > 2.0 * trap.eta[r];
        }
      }
      if (capture) {
        captured = static_cast<int>(r);
        if (wr <= trap.pivot[r]) have_pivot = crossing_root_seen[r] != 0;
      }
    }
    if (captured >= 0 && have_pivot && wr < delta) {
      finish(TraceOutcome::Landing, "");
      out.root = captured;
      break;
    }

    if (captured < 0 && az >= R && (been_inside || az >= 2.0 * R)) {
      const double elapsed = t0 + cur[2];
      const cplx tau = elapsed + dir * tail_impl(f, zc);
      const double arg = std::arg(zc);
      const long jr = std::lround(arg * (d - 1) / kPi);
      const double residual = std::abs(wrap_angle(arg - jr * kPi / (d - 1)));
      const int j = static_cast<int>(((jr % n_ends) + n_ends) % n_ends);
      been_inside = false;
      if (residual < angle_tol && (j % 2) != (index % 2)) {
        const double rel = std::abs(tau.imag()) / std::abs(tau);
        if (rel <= opts.homoclinic_tol && tau.real() > 0.0) {
          finish(TraceOutcome::Homoclinic, "");
          out.partner = j;
          out.tau = tau;
          break;
        }
        if (rel <= 100.0 * opts.homoclinic_tol) {
          out.partner = j;
          out.tau = tau;
          finish(TraceOutcome::Uncertain, "near-homoclinic return to end " + std::to_string(j) +
                                              ", |Im tau|/|tau| = " + std::to_string(rel));
          break;
        }
      }
    }
    if (az > 1e12) {
      finish(TraceOutcome::Uncertain, "trajectory left the computational domain");
      break;
    }
    prev = zc;
  }

  if (out.outcome == TraceOutcome::Landing) {
    out.pivot = last_crossing[out.root].first;
    out.pivot_radius = trap.pivot[out.root];
    out.pivot_phi = dir * (t0 + last_crossing[out.root].second);
  }
  return out;
}

void unscale(SeparatrixTrace& t, double S, int d) {
  const double ts = std::pow(S, d - 1);
  for (auto& z : t.path) z *= S;
  t.start *= S;
  t.pivot *= S;
  t.pivot_radius *= S;
  t.pivot_phi /= ts;
  t.tau /= ts;
  t.tail_time /= ts;
}

}  // namespace

std::string_view to_string(TraceOutcome o) {
  switch (o) {
    case TraceOutcome::Landing: return "landing";
    case TraceOutcome::Homoclinic: return "homoclinic";
    case TraceOutcome::Uncertain: return "uncertain";
  }
  return "unknown";
}

cplx tail_time(const Polynomial& p, cplx z) {
  Field f(p.roots());
  const double mx = f.max_modulus();
  if (z == cplx(0.0) || std::abs(z) < 2.0 * mx)
    throw Error(ErrorKind::InsideEscapeRadius, "tail integral needs |z| >= 2 max|root|");
  return tail_impl(f, z);
}

cplx path_time_integral(const Polynomial& p, const std::vector<cplx>& path, double safety_factor) {
  const Field f(p.roots());
  const double safety = safety_factor * p.root_scale();
  auto seg_dist = [&](cplx a, cplx b) {
    double dmin = std::numeric_limits<double>::infinity();
    const cplx ab = b - a;
    for (const auto& zeta : f.zeta) {
      double t = std::norm(ab) > 0 ? ((zeta - a) * std::conj(ab)).real() / std::norm(ab) : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      dmin = std::min(dmin, std::abs(a + t * ab - zeta));
    }
    return dmin;
  };
  auto piece = [&](auto&& self, cplx a, cplx b, int depth) -> cplx {
    const double len = std::abs(b - a);
    if (len == 0.0) return 0.0;
    const double dist = seg_dist(a, b);
    if (len > dist && depth < 60) {
      const cplx m = 0.5 * (a + b);
      return self(self, a, m, depth + 1) + self(self, m, b, depth + 1);
    }
    auto g = [&](double t) -> cplx { return (b - a) / f.P(a + t * (b - a)); };
    double err = 0.0;
    return gauss_kronrod<double, 15>::integrate(g, 0.0, 1.0, 15, 1e-14, &err);
  };
  cplx total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (seg_dist(path[i], path[i + 1]) < safety)
      throw Error(ErrorKind::PathThroughSingularity,
                  "segment " + std::to_string(i) + " passes within the safety radius of a root");
    total += piece(piece, path[i], path[i + 1], 0);
  }
  return total;
}

double trap_radius(const Polynomial& p, std::size_t i) {
  const double S = p.root_scale();
  Field f(p.roots(), S);
  return trap_data(f).radius.at(i) * S;
}

SeparatrixTrace trace_separatrix(const Polynomial& p, int index, const TraceOptions& opts) {
  const int d = p.degree();
  if (index < 0 || index >= 2 * (d - 1))
    throw Error(ErrorKind::InvalidInput, "separatrix index out of range");
  const double S = p.root_scale();
  Field f(p.roots(), S);
  auto t = trace_normalized(f, index, opts);
  unscale(t, S, d);
  return t;
}

int default_thread_count() {
  if (const char* env = std::getenv("POLYVF_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SeparatrixGraphNumeric trace_all(const Polynomial& p, const TraceOptions& opts, int threads) {
  const int d = p.degree();
  const int n = 2 * (d - 1);
  SeparatrixGraphNumeric g{p, std::vector<SeparatrixTrace>(n), equilibria(p), {}, false, {}};
  if (threads <= 0) threads = default_thread_count();
  threads = std::min(threads, n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) g.traces[i] = trace_separatrix(p, i, opts);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<int> landings(p.roots().size(), 0);
  for (const auto& t : g.traces) {
    if (t.outcome == TraceOutcome::Uncertain) {
      g.uncertain = true;
      g.diagnostics.push_back("s" + std::to_string(t.index) + ": " + t.diagnostic);
    } else if (t.outcome == TraceOutcome::Landing) {
      ++landings[t.root];
      if (g.equilibria[t.root].kind == EquilibriumKind::Center) {
        g.uncertain = true;
        g.diagnostics.push_back("s" + std::to_string(t.index) + " landed at a center");
      }
    }
  }
  for (const auto& t : g.traces) {
    if (t.outcome != TraceOutcome::Homoclinic || t.index % 2 == 0) continue;
    HomoclinicMatch m;
    m.k = t.index;
    m.j = t.partner;
    m.tau_from_k = t.tau;
    const auto& o = g.traces[t.partner];
    if (o.outcome == TraceOutcome::Homoclinic && o.partner == t.index) {
      m.tau_from_j = o.tau;
      m.agree = std::abs(o.tau - t.tau) < 1e-6 * std::abs(t.tau);
    }
    if (!m.agree) {
      g.uncertain = true;
      g.diagnostics.push_back("homoclinic s" + std::to_string(m.k) + "," + std::to_string(m.j) +
                              " not confirmed from both ends");
    }
    g.homoclinics.push_back(m);
  }
  for (const auto& t : g.traces) {
    if (t.outcome != TraceOutcome::Homoclinic || t.index % 2 == 1) continue;
    const auto& o = g.traces[t.partner];
    if (!(o.outcome == TraceOutcome::Homoclinic && o.partner == t.index)) {
      g.uncertain = true;
      g.diagnostics.push_back("homoclinic from s" + std::to_string(t.index) + " has no matching partner");
    }
  }
  for (std::size_t i = 0; i < g.equilibria.size(); ++i)
    if (g.equilibria[i].kind != EquilibriumKind::Center && landings[i] == 0) {
      g.uncertain = true;
      g.diagnostics.push_back("equilibrium " + format_complex(g.equilibria[i].position) +
                              " receives no separatrix");
    }
  return g;
}

namespace {
std::string join_diagnostics(const SeparatrixGraphNumeric& g) {
  std::string s = "separatrix graph is uncertain";
  for (const auto& d : g.diagnostics) s += "; " + d;
  return s;
}
}  // namespace

UncertainClassificationError::UncertainClassificationError(SeparatrixGraphNumeric g)
    : Error(ErrorKind::UncertainClassification, join_diagnostics(g)), graph_(std::move(g)) {}

SeparatrixGraphNumeric separatrix_graph(const Polynomial& p, const TraceOptions& opts, int threads) {
  auto g = trace_all(p, opts, threads);
  if (g.uncertain) throw UncertainClassificationError(std::move(g));
  return g;
}

}  // namespace polyvf
