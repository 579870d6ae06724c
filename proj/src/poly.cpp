#include "polyvf/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace polyvf {

namespace {

double max_root_modulus(std::span<const Root> roots) {
  double m = 0.0;
  for (const auto& r : roots) m = std::max(m, std::abs(r.position));
  return m;
}

// Merge exact duplicates in a user-supplied root list.
std::vector<Root> merge_duplicates(std::vector<Root> roots) {
  std::vector<Root> out;
  for (const auto& r : roots) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Root& o) { return o.position == r.position; });
    if (it != out.end())
      it->multiplicity += r.multiplicity;
    else
      out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<cplx> expand_roots(std::span<const Root> roots) {
  std::vector<cplx> c{1.0};
  for (const auto& r : roots) {
    for (int k = 0; k < r.multiplicity; ++k) {
      std::vector<cplx> next(c.size() + 1, 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i + 1] += c[i];
        next[i] -= r.position * c[i];
      }
      c = std::move(next);
    }
  }
  return c;
}

std::vector<cplx> taylor_coefficients(std::span<const cplx> coeffs, cplx c) {
  // Repeated synthetic division by (z - c).
  std::vector<cplx> a(coeffs.begin(), coeffs.end());
  const std::size_t n = a.size();
  std::vector<cplx> t(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = n - 1; i > k; --i) a[i - 1] += c * a[i];
    t[k] = a[k];
  }
  return t;
}

Polynomial Polynomial::from_roots(std::vector<Root> roots, double centering_tol) {
  int d = 0;
  for (const auto& r : roots) {
    if (r.multiplicity < 1) throw Error(ErrorKind::InvalidInput, "root multiplicity must be >= 1");
    d += r.multiplicity;
  }
  if (d < 2) throw Error(ErrorKind::DegreeTooLow, "total multiplicity " + std::to_string(d) + " < 2");
  roots = merge_duplicates(std::move(roots));
  cplx sum = 0.0;
  for (const auto& r : roots) sum += double(r.multiplicity) * r.position;
  const double scale = 1.0 + max_root_modulus(roots);
  if (std::abs(sum) >= centering_tol * scale)
    throw Error(ErrorKind::NotCentered, "weighted root sum has modulus " + std::to_string(std::abs(sum)));
  auto c = expand_roots(roots);
  c[d] = 1.0;
  c[d - 1] = 0.0;
  return Polynomial(std::move(c), std::move(roots));
}

Polynomial Polynomial::from_coefficients(std::vector<cplx> coeffs) {
  if (coeffs.size() < 3) throw Error(ErrorKind::DegreeTooLow, "need at least 3 coefficients");
  const std::size_t d = coeffs.size() - 1;
  if (coeffs[d] != cplx(1.0)) throw Error(ErrorKind::InvalidInput, "leading coefficient must be exactly 1");
  if (coeffs[d - 1] != cplx(0.0)) throw Error(ErrorKind::NotCentered, "coefficient of z^(d-1) must be exactly 0");
  for (const auto& a : coeffs)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw Error(ErrorKind::InvalidInput, "non-finite coefficient");
  auto roots = find_roots(coeffs);
  return Polynomial(std::move(coeffs), std::move(roots));
}

cplx Polynomial::operator()(cplx z) const {
  cplx v = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * z + *it;
  return v;
}

std::pair<cplx, cplx> Polynomial::eval_with_derivative(cplx z) const {
  cplx v = 0.0, dv = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    dv = dv * z + v;
    v = v * z + *it;
  }
  return {v, dv};
}

cplx Polynomial::derivative(cplx z) const { return eval_with_derivative(z).second; }

double Polynomial::root_scale() const { return 1.0 + max_root_modulus(roots_); }

int Polynomial::multiplicity_excess() const {
  int e = 0;
  for (const auto& r : roots_) e += r.multiplicity - 1;
  return e;
}

std::string_view to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Source: return "source";
    case EquilibriumKind::Sink: return "sink";
    case EquilibriumKind::Center: return "center";
    case EquilibriumKind::Multiple: return "multiple";
  }
  return "unknown";
}

cplx residue_from_series(std::span<const Root> roots, std::size_t i) {
  const cplx zi = roots[i].position;
  const int m = roots[i].multiplicity;
  // g(w) = prod_{j != i} (zi + w - zj)^{-mj};  (log g)' = sum_k b_k w^k.
  std::vector<cplx> b(m, 0.0);
  cplx g0 = 1.0;
  for (std::size_t j = 0; j < roots.size(); ++j) {
    if (j == i) continue;
    const cplx delta = zi - roots[j].position;
    g0 *= std::pow(delta, -roots[j].multiplicity);
    cplx pw = 1.0 / delta;
    for (int k = 0; k < m; ++k) {
      b[k] -= double(roots[j].multiplicity) * ((k % 2) ? -pw : pw);
      pw /= delta;
    }
  }
  std::vector<cplx> g(m, 0.0);
  g[0] = g0;
  for (int n = 0; n + 1 < m; ++n) {
    cplx s = 0.0;
    for (int k = 0; k <= n; ++k) s += g[n - k] * b[k];
    g[n + 1] = s / double(n + 1);
  }
  return g[m - 1];
}

cplx residue(const Polynomial& p, cplx zeta) {
  const auto& roots = p.roots();
  const double scale = p.root_scale();
  const double radius = 1e-7 * scale;
  std::size_t best = roots.size();
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double dd = std::abs(roots[i].position - zeta);
    if (dd < best_dist) {
      best_dist = dd;
      best = i;
    }
  }
  if (best == roots.size() || best_dist > radius)
    throw Error(ErrorKind::NotARoot, "no root within clustering radius of the given point");
  const Root& r = roots[best];
  if (r.multiplicity == 1) return 1.0 / p.derivative(r.position);

  double rho = 1.0;
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < roots.size(); ++j)
    if (j != best) nearest = std::min(nearest, std::abs(roots[j].position - r.position));
  if (std::isfinite(nearest)) rho = 0.25 * nearest;

  // Trapezoidal rule on the circle; P evaluated in product form to avoid
  // cancellation near a high-order zero.
  constexpr int kNodes = 64;
  cplx sum = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    const cplx w = std::polar(rho, 2.0 * std::numbers::pi * k / kNodes);
    cplx pz = 1.0;
    for (const auto& q : roots) pz *= std::pow(r.position + w - q.position, q.multiplicity);
    sum += w / pz;
  }
  return sum / double(kNodes);
}

KindResult classify_equilibrium(cplx rho, int multiplicity, double kind_tol) {
  if (multiplicity > 1) return {EquilibriumKind::Multiple, false};
  const double tol = kind_tol * std::abs(rho);
  const double re = rho.real();
  if (std::abs(re) < tol) return {EquilibriumKind::Center, false};
  const bool near = std::abs(re) < 10.0 * tol;
  return {re > 0 ? EquilibriumKind::Source : EquilibriumKind::Sink, near};
}

std::vector<EquilibriumPoint> equilibria(const Polynomial& p, double kind_tol) {
  std::vector<EquilibriumPoint> out;
  for (const auto& r : p.roots()) {
    EquilibriumPoint e;
    e.position = r.position;
    e.multiplicity = r.multiplicity;
    e.residue = residue(p, r.position);
    auto k = classify_equilibrium(e.residue, e.multiplicity, kind_tol);
    e.kind = k.kind;
    e.near_bifurcation = k.near_bifurcation;
    out.push_back(e);
  }
  return out;
}

Polynomial scale_roots(const Polynomial& p, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::NonPositiveScale, "scale factor must be positive");
  std::vector<Root> roots = p.roots();
  for (auto& r : roots) r.position *= c;
  return Polynomial::from_roots(std::move(roots), std::numeric_limits<double>::infinity());
}

Polynomial monomial(int d) { return Polynomial::from_roots({Root{0.0, d}}); }

}  // namespace polyvf
