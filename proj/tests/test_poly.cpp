#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "polyvf/poly.hpp"

using namespace polyvf;
using testing_util::random_centered_roots;

namespace {

bool coeffs_close(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

// Each expected root matched to a distinct found root of equal multiplicity.
bool roots_match(const std::vector<Root>& found, const std::vector<Root>& expected, double tol) {
  if (found.size() != expected.size()) return false;
  std::vector<bool> used(found.size(), false);
  for (const auto& e : expected) {
    bool ok = false;
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (used[i] || found[i].multiplicity != e.multiplicity) continue;
      if (std::abs(found[i].position - e.position) <= tol) {
        used[i] = ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("from_roots expands products") {
  const cplx i(0, 1);
  auto p = Polynomial::from_roots({{i, 1}, {-i, 1}});
  CHECK(coeffs_close(p.coefficients(), {1.0, 0.0, 1.0}, 1e-15));

  auto q = Polynomial::from_roots({{0.0, 2}});
  CHECK(coeffs_close(q.coefficients(), {0.0, 0.0, 1.0}, 0.0));

  // (z-1)^2 (z+2) = (z^2 - 2z + 1)(z + 2) = z^3 + 2z^2 - 2z^2 - 4z + z + 2
  auto r = Polynomial::from_roots({{1.0, 2}, {-2.0, 1}});
  CHECK(coeffs_close(r.coefficients(), {2.0, -3.0, 0.0, 1.0}, 1e-14));
  CHECK(r.degree() == 3);
}

TEST_CASE("from_roots rejects bad input") {
  CHECK_THROWS_AS(Polynomial::from_roots({{1.0, 1}, {0.5, 1}}), Error);
  try {
    Polynomial::from_roots({{1.0, 1}, {0.5, 1}});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotCentered);
  }
  try {
    Polynomial::from_roots({{0.0, 1}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegreeTooLow);
  }
}

TEST_CASE("find_roots examples") {
  const cplx i(0, 1);
  std::vector<cplx> c1{1.0, 0.0, 1.0};
  CHECK(roots_match(find_roots(c1), {{i, 1}, {-i, 1}}, 1e-14));

  std::vector<cplx> c2{0.0, 0.0, 0.0, 1.0};
  CHECK(roots_match(find_roots(c2), {{0.0, 3}}, 0.0));

  std::vector<cplx> c3{2.0, -3.0, 0.0, 1.0};
  auto r3 = find_roots(c3);
  CHECK(roots_match(r3, {{1.0, 2}, {-2.0, 1}}, 1e-10));
  // substitute back
  for (const auto& r : r3) CHECK(std::abs(r.position * r.position * r.position - 3.0 * r.position + 2.0) < 1e-12);
}

TEST_CASE("find_roots merges higher multiplicities") {
  // (z-1)^3 (z+1)^2 (z-0.5)^... keep centered: 3*1 + 2*(-1.5) = 0
  auto p = Polynomial::from_roots({{1.0, 3}, {-1.5, 2}});
  auto r = find_roots(p.coefficients());
  CHECK(roots_match(r, {{1.0, 3}, {-1.5, 2}}, 1e-8));

  auto q = Polynomial::from_roots({{cplx(0.5, 0.5), 4}, {cplx(-1.0, -1.0), 2}});
  CHECK(roots_match(find_roots(q.coefficients()), {{cplx(0.5, 0.5), 4}, {cplx(-1.0, -1.0), 2}}, 1e-6));
}

TEST_CASE("find_roots keeps close but distinct roots apart") {
  const double eps = 1e-4;
  auto p = Polynomial::from_roots({{cplx(1.0 + eps), 1}, {cplx(1.0 - eps), 1}, {-2.0, 1}});
  auto r = find_roots(p.coefficients());
  CHECK(r.size() == 3);
}

TEST_CASE("roundtrip from_roots -> find_roots") {
  std::mt19937_64 rng(11);
  for (int d = 2; d <= 6; ++d)
    for (int trial = 0; trial < 40; ++trial) {
      auto roots = random_centered_roots(rng, d);
      if (testing_util::min_pairwise(roots) < 1e-3) continue;
      auto p = Polynomial::from_roots(roots);
      auto found = find_roots(p.coefficients());
      CHECK(roots_match(found, roots, 1e-7 * p.root_scale()));
    }
}

TEST_CASE("from_coefficients checks normalization") {
  CHECK_THROWS(Polynomial::from_coefficients({1.0, 0.0, 2.0}));
  try {
    Polynomial::from_coefficients({1.0, 1.0, 1.0});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotCentered);
  }
  auto p = Polynomial::from_coefficients({1.0, 0.0, 1.0});
  CHECK(p.roots().size() == 2);
}

TEST_CASE("residue examples") {
  const cplx i(0, 1);
  auto p = Polynomial::from_roots({{i, 1}, {-i, 1}});
  CHECK(std::abs(residue(p, i) - cplx(0, -0.5)) < 1e-15);
  auto q = Polynomial::from_roots({{1.0, 1}, {-1.0, 1}});
  CHECK(std::abs(residue(q, 1.0) - 0.5) < 1e-15);
  for (int d = 2; d <= 6; ++d) CHECK(std::abs(residue(monomial(d), 0.0)) < 1e-14);
  CHECK_THROWS_AS(residue(p, 0.3), Error);
}

TEST_CASE("multiple-root residues: contour versus series versus closed form") {
  // 1/((z-1)^2 (z+2)): residue at 1 is d/dz (z+2)^{-1} at 1 = -1/9.
  auto p = Polynomial::from_roots({{1.0, 2}, {-2.0, 1}});
  CHECK(std::abs(residue(p, 1.0) - (-1.0 / 9.0)) < 1e-13);
  CHECK(std::abs(residue_from_series(p.roots(), 0) - (-1.0 / 9.0)) < 1e-15);
  // at -2 simple: 1/(z-1)^2 at -2 = 1/9
  CHECK(std::abs(residue(p, -2.0) - 1.0 / 9.0) < 1e-14);

  // 1/((z-a)^3 (z-b)^3) at a: (1/2) d^2/dz^2 (z-b)^{-3} = 6/(a-b)^5
  const cplx a(0.3, 0.7), b = -a;
  auto q = Polynomial::from_roots({{a, 3}, {b, 3}});
  const cplx expect = 6.0 / std::pow(a - b, 5);
  CHECK(std::abs(residue(q, a) - expect) < 1e-12 * std::abs(expect));
  CHECK(std::abs(residue_from_series(q.roots(), 0) - expect) < 1e-13 * std::abs(expect));
}

TEST_CASE("residue sum vanishes") {
  std::mt19937_64 rng(5);
  for (int d = 2; d <= 7; ++d)
    for (int trial = 0; trial < 30; ++trial) {
      auto roots = random_centered_roots(rng, d);
      if (testing_util::min_pairwise(roots) < 0.05) continue;
      auto p = Polynomial::from_roots(roots);
      cplx s = 0.0;
      double mx = 0.0;
      for (const auto& r : p.roots()) {
        const cplx v = residue(p, r.position);
        s += v;
        mx = std::max(mx, std::abs(v));
      }
      CHECK(std::abs(s) < 1e-10 * mx);
    }
}

TEST_CASE("classify_equilibrium") {
  CHECK(classify_equilibrium(cplx(0, -0.5), 1).kind == EquilibriumKind::Center);
  CHECK(classify_equilibrium(cplx(-0.5, 0), 1).kind == EquilibriumKind::Sink);
  CHECK(classify_equilibrium(cplx(0.5, 0.1), 1).kind == EquilibriumKind::Source);
  CHECK(classify_equilibrium(cplx(0.7, 3.0), 3).kind == EquilibriumKind::Multiple);
  auto near = classify_equilibrium(cplx(5e-9, 1.0), 1);
  CHECK(near.kind == EquilibriumKind::Source);
  CHECK(near.near_bifurcation);
  CHECK_FALSE(classify_equilibrium(cplx(1e-3, 1.0), 1).near_bifurcation);
}

TEST_CASE("equilibria of z^2-1 and z^2+1") {
  auto e = equilibria(Polynomial::from_roots({{1.0, 1}, {-1.0, 1}}));
  for (const auto& x : e)
    CHECK(x.kind == (x.position.real() > 0 ? EquilibriumKind::Source : EquilibriumKind::Sink));
  for (const auto& x : equilibria(Polynomial::from_coefficients({1.0, 0.0, 1.0})))
    CHECK(x.kind == EquilibriumKind::Center);
}

TEST_CASE("scale_roots") {
  const cplx i(0, 1);
  auto p = Polynomial::from_roots({{i, 1}, {-i, 1}});
  CHECK(coeffs_close(scale_roots(p, 2.0).coefficients(), {4.0, 0.0, 1.0}, 1e-14));
  for (int d = 2; d <= 5; ++d)
    CHECK(coeffs_close(scale_roots(monomial(d), 3.7).coefficients(), monomial(d).coefficients(), 0.0));
  auto q = Polynomial::from_roots({{1.0, 1}, {-1.0, 1}});
  CHECK(coeffs_close(scale_roots(q, 0.5).coefficients(), {-0.25, 0.0, 1.0}, 1e-15));
  for (double c : {0.0, -1.0}) {
    try {
      scale_roots(q, c);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonPositiveScale);
    }
  }
}

TEST_CASE("scaling is a semigroup and preserves kinds") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 5;
    auto p = Polynomial::from_roots(random_centered_roots(rng, d));
    // powers of two keep the products exact
    const double a = 0.25, b = 8.0;
    auto lhs = scale_roots(scale_roots(p, a), b);
    auto rhs = scale_roots(p, a * b);
    for (std::size_t k = 0; k < p.roots().size(); ++k) CHECK(lhs.roots()[k].position == rhs.roots()[k].position);
    // generic factors agree to rounding
    std::uniform_real_distribution<double> u(0.1, 10.0);
    const double x = u(rng), y = u(rng);
    auto l2 = scale_roots(scale_roots(p, x), y);
    auto r2 = scale_roots(p, x * y);
    for (std::size_t k = 0; k < p.roots().size(); ++k)
      CHECK(std::abs(l2.roots()[k].position - r2.roots()[k].position) <= 4e-16 * std::abs(r2.roots()[k].position));

    auto ps = scale_roots(p, x);
    for (std::size_t k = 0; k < p.roots().size(); ++k) {
      const cplx r0 = residue(p, p.roots()[k].position);
      const cplx r1 = residue(ps, ps.roots()[k].position);
      CHECK(classify_equilibrium(r0, 1).kind == classify_equilibrium(r1, 1).kind);
      CHECK(std::abs(r1 - std::pow(x, -(d - 1)) * r0) < 1e-9 * std::abs(r1));
    }
  }
}

TEST_CASE("polynomial text form") {
  CHECK(parse_complex("1.5") == cplx(1.5, 0));
  CHECK(parse_complex("1.5-2i") == cplx(1.5, -2));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("3e-5+1e-3i") == cplx(3e-5, 1e-3));
  CHECK(parse_complex("2e-3i") == cplx(0, 2e-3));
  CHECK_THROWS_AS(parse_complex("abc"), Error);

  auto p = parse_polynomial("coeffs: 1,0,1");
  CHECK(p.roots().size() == 2);
  auto q = parse_polynomial("roots: 1^2,-2");
  CHECK(coeffs_close(q.coefficients(), {2.0, -3.0, 0.0, 1.0}, 1e-14));
  CHECK(format_roots(q) == "roots: 1^2,-2");
  CHECK(format_coefficients(q) == "coeffs: 2,-3,0,1");
  auto r = parse_polynomial(format_coefficients(Polynomial::from_roots({{cplx(0.1, 0.3), 1}, {cplx(-0.1, -0.3), 1}})));
  CHECK(std::abs(r.coefficients()[0] - cplx(0.1, 0.3) * cplx(-0.1, -0.3)) < 1e-17);
  CHECK(format_complex(cplx(0.1, -0.3)) == "0.1-0.3i");
}
