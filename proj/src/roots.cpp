#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "polyvf/poly.hpp"

namespace polyvf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Eval {
  cplx p, dp;
  double bound;  // sum |a_i| |z|^i, a rounding-error scale for p
};

Eval horner(std::span<const cplx> a, cplx z) {
  cplx v = 0.0, dv = 0.0;
  double b = 0.0;
  const double az = std::abs(z);
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    dv = dv * z + v;
    v = v * z + *it;
    b = b * az + std::abs(*it);
  }
  return {v, dv, b};
}

std::vector<cplx> aberth(std::span<const cplx> a, int max_iter, bool& converged) {
  const int d = static_cast<int>(a.size()) - 1;
  // Cauchy-type bound for the initial circle.
  double r = 0.0;
  for (int k = 0; k < d; ++k) r = std::max(r, std::pow(std::abs(a[k]), 1.0 / (d - k)));
  r = std::max(r, 1e-3);
  std::vector<cplx> z(d);
  for (int k = 0; k < d; ++k) z[k] = std::polar(r, 2.0 * std::numbers::pi * (k + 0.25) / d + 0.4);
  std::vector<bool> done(d, false);
  converged = false;
  for (int it = 0; it < max_iter; ++it) {
    bool all_done = true;
    for (int k = 0; k < d; ++k) {
      if (done[k]) continue;
      const Eval e = horner(a, z[k]);
      if (std::abs(e.p) <= 4.0 * kEps * e.bound) {
        done[k] = true;
        continue;
      }
      all_done = false;
      const cplx ratio = e.p / e.dp;
      cplx s = 0.0;
      for (int j = 0; j < d; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      const cplx step = ratio / (1.0 - ratio * s);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[k] -= step;
      if (std::abs(step) <= 2.0 * kEps * std::abs(z[k])) done[k] = true;
    }
    if (all_done) {
      converged = true;
      break;
    }
  }
  if (!converged) converged = std::all_of(done.begin(), done.end(), [](bool b) { return b; });
  return z;
}

std::vector<cplx> companion(std::span<const cplx> a) {
  const int d = static_cast<int>(a.size()) - 1;
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) c(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) c(i, d - 1) = -a[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
  std::vector<cplx> z(d);
  for (int i = 0; i < d; ++i) z[i] = es.eigenvalues()[i];
  return z;
}

double max_backward_error(std::span<const cplx> a, std::span<const cplx> z) {
  double worst = 0.0;
  for (const auto& x : z) {
    const Eval e = horner(a, x);
    worst = std::max(worst, e.bound > 0 ? std::abs(e.p) / e.bound : std::abs(e.p));
  }
  return worst;
}

std::vector<cplx> derivative_coeffs(std::span<const cplx> a) {
  std::vector<cplx> d;
  for (std::size_t i = 1; i < a.size(); ++i) d.push_back(double(i) * a[i]);
  return d;
}

// Group raw zeros into roots with multiplicity.
std::vector<Root> cluster(std::span<const cplx> a, std::vector<cplx> z, double cluster_factor) {
  double maxabs = 0.0;
  for (auto& x : z) maxabs = std::max(maxabs, std::abs(x));
  const double scale = 1.0 + maxabs;
  const double radius = cluster_factor * scale;

  struct Group {
    std::vector<cplx> members;
    cplx mean() const {
      cplx s = 0.0;
      for (auto& m : members) s += m;
      return s / double(members.size());
    }
  };
  std::vector<Group> groups;
  for (const auto& x : z) groups.push_back({{x}});

  auto spread = [](const Group& g) {
    const cplx c = g.mean();
    double s = 0.0;
    for (auto& m : g.members) s = std::max(s, std::abs(m - c));
    return s;
  };

  // Stage 1: single-link merging within the clustering radius.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < groups.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < groups.size() && !merged; ++j) {
        double dmin = std::numeric_limits<double>::infinity();
        for (auto& p : groups[i].members)
          for (auto& q : groups[j].members) dmin = std::min(dmin, std::abs(p - q));
        if (dmin < radius) {
          groups[i].members.insert(groups[i].members.end(), groups[j].members.begin(), groups[j].members.end());
          groups.erase(groups.begin() + j);
          merged = true;
        }
      }
  }

  // Stage 2: an m-fold zero computed in floating point splits into a ring of
  // radius ~ (eps * S / |t_m|)^(1/m). Merge nearby groups when their spread is
  // explained by that perturbation bound at the group mean.
  merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < groups.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < groups.size() && !merged; ++j) {
        Group g = groups[i];
        g.members.insert(g.members.end(), groups[j].members.begin(), groups[j].members.end());
        const double sp = spread(g);
        if (sp > 1e-3 * scale) continue;
        const cplx c = g.mean();
        const int m = static_cast<int>(g.members.size());
        const auto t = taylor_coefficients(a, c);
        const double bound = horner(a, c).bound;
        const double tm = std::abs(t[m]);
        if (tm == 0.0) continue;
        const double ring = std::pow(64.0 * kEps * bound / tm, 1.0 / m);
        if (sp <= 4.0 * ring) {
          groups[i] = std::move(g);
          groups.erase(groups.begin() + j);
          merged = true;
        }
      }
  }

  std::vector<Root> roots;
  for (auto& g : groups) {
    const int m = static_cast<int>(g.members.size());
    cplx c = g.mean();
    if (m > 1) {
      // P^(m-1) has a simple zero at an m-fold root: polish the mean on it.
      std::vector<cplx> q(a.begin(), a.end());
      for (int k = 0; k < m - 1; ++k) q = derivative_coeffs(q);
      for (int it = 0; it < 8; ++it) {
        const Eval e = horner(q, c);
        if (e.dp == cplx(0.0)) break;
        const cplx step = e.p / e.dp;
        if (std::abs(step) > 10.0 * spread(g) + 10.0 * kEps * scale) break;
        c -= step;
        if (std::abs(step) <= kEps * std::abs(c)) break;
      }
    } else {
      for (int it = 0; it < 3; ++it) {
        const Eval e = horner(a, c);
        if (e.dp == cplx(0.0)) break;
        c -= e.p / e.dp;
      }
    }
    roots.push_back({c, m});
  }
  return roots;
}

}  // namespace

std::vector<Root> find_roots(std::span<const cplx> coeffs, const RootFinderOptions& opts) {
  const int d = static_cast<int>(coeffs.size()) - 1;
  if (d < 1) throw Error(ErrorKind::DegreeTooLow, "polynomial has no roots");
  bool trivial = true;
  for (int k = 0; k < d; ++k)
    if (coeffs[k] != cplx(0.0)) trivial = false;
  if (trivial) return {Root{0.0, d}};

  bool converged = false;
  auto z = aberth(coeffs, opts.max_iterations, converged);
  double be = max_backward_error(coeffs, z);
  if (!converged || be > 1e-10) {
    auto zc = companion(coeffs);
    // A few Newton sweeps to polish eigenvalues.
    for (auto& x : zc)
      for (int it = 0; it < 3; ++it) {
        const Eval e = horner(coeffs, x);
        if (e.dp == cplx(0.0) || std::abs(e.p) <= kEps * e.bound) break;
        x -= e.p / e.dp;
      }
    const double bec = max_backward_error(coeffs, zc);
    if (bec < be) {
      z = std::move(zc);
      be = bec;
    }
    if (be > 1e-10)
      throw Error(ErrorKind::NoConvergence, "root finder residual " + std::to_string(be));
  }
  return cluster(coeffs, std::move(z), opts.cluster_factor);
}

}  // namespace polyvf
