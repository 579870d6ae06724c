#include <doctest.h>

#include <numbers>
#include <random>

#include "helpers.hpp"
#include "polyvf/stability.hpp"

using namespace polyvf;
using std::numbers::pi;

namespace {

std::vector<int> pattern(const Polynomial& p) {
  std::vector<int> m;
  for (const auto& r : p.roots()) m.push_back(r.multiplicity);
  std::sort(m.begin(), m.end());
  return m;
}

}  // namespace

TEST_CASE("protective sector examples") {
  const auto q = Polynomial::from_coefficients({-1, 0, 1});
  auto s = protective_sector(q, 1);
  CHECK(s.kind == SectorCase::TwoStrips);
  CHECK(s.angle == doctest::Approx(pi / 2 - 1e-3).epsilon(1e-12));
  for (cplx a : s.partial_sums) {
    CHECK(std::abs(a.real()) < 1e-6);
    CHECK(std::abs(std::abs(a.imag()) - pi) < 1e-6);
  }

  for (int d = 2; d <= 5; ++d)
    for (int l = 0; l < 2 * (d - 1); ++l) {
      s = protective_sector(monomial(d), l);
      CHECK(s.kind == SectorCase::TwoSepals);
      CHECK(s.angle == doctest::Approx(pi / 2 - 1e-3).epsilon(1e-12));
    }

  s = protective_sector(Polynomial::from_roots({{1, 2}, {-2, 1}}), 1);
  CHECK(s.kind == SectorCase::SepalAndStrip);

  try {
    protective_sector(Polynomial::from_coefficients({1, 0, 1}), 1);
    FAIL("expected NotLanding");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotLanding);
  }
}

TEST_CASE("sector geometry on random fields") {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 4;
    const auto roots = testing_util::random_centered_roots(rng, d);
    if (testing_util::min_pairwise(roots) < 0.2) continue;
    const auto p = Polynomial::from_roots(roots);
    Classification c;
    try {
      c = classify(p);
    } catch (const UncertainClassificationError&) {
      continue;
    }
    for (int l = 0; l < c.cls.n_ends(); ++l) {
      if (c.data.root[l] < 0) continue;
      const auto s = protective_sector(c, l);
      CHECK(s.angle > 0.0);
      CHECK(s.angle < pi / 2);
      // No other end of the basin inside the sector.
      for (cplx w : s.partial_sums) {
        const double a = std::abs(std::arg(w));
        CHECK(s.angle <= (l % 2 ? a : pi - a) + 1e-12);
      }
      // Simple roots: the strips close up into the cylinder of period
      // 2 pi i Res (sign by time direction).
      REQUIRE(s.full_turn);
      const cplx res = residue(p, p.roots()[s.root].position);
      const cplx period = (l % 2 ? -1.0 : 1.0) * kappa * res;
      CHECK(std::abs(s.upward.back() - period) < 1e-6 * std::abs(period));
      CHECK(std::abs(s.downward.back() + period) < 1e-6 * std::abs(period));
      ++checked;
    }
  }
  CHECK(checked >= 40);
}

TEST_CASE("non-splitting perturbations") {
  for (int d = 2; d <= 5; ++d) {
    const auto s = perturb_non_splitting(monomial(d), 0.3, 1);
    CHECK(s.perturbed.roots().size() == 1);
    CHECK(std::abs(s.perturbed.roots()[0].position) < 1e-12);
  }

  const auto q = Polynomial::from_coefficients({-1, 0, 1});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = perturb_non_splitting(q, 0.01, seed);
    const auto& r = s.perturbed.roots();
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0].position + r[1].position) < 1e-12);
    CHECK(std::min(std::abs(r[0].position - 1.0), std::abs(r[1].position - 1.0)) <= 0.02);
    CHECK(s.root_displacement <= 0.02);
  }

  const auto m = Polynomial::from_roots({{1, 2}, {-2, 1}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = perturb_non_splitting(m, 0.01, seed);
    CHECK(pattern(s.perturbed) == pattern(m));
    CHECK(std::abs(s.moved[0] * 2.0 + s.moved[1]) < 1e-12);
  }

  CHECK_THROWS_AS(perturb_non_splitting(q, 1.5, 0), Error);
  CHECK_THROWS_AS(perturb_non_splitting(q, 0.0, 0), Error);
}

TEST_CASE("multiplicity pattern is preserved") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> mult(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Root> r(3);
    int d = 0;
    cplx mean = 0.0;
    for (auto& x : r) {
      x = {cplx(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)), mult(rng)};
      d += x.multiplicity;
      mean += double(x.multiplicity) * x.position;
    }
    for (auto& x : r) x.position -= mean / double(d);
    const auto p = Polynomial::from_roots(r);
    if (testing_util::min_pairwise(r) < 0.1) continue;
    const auto s = perturb_non_splitting(p, 0.02, trial);
    CHECK(pattern(s.perturbed) == pattern(p));
  }
}

TEST_CASE("landing stability") {
  const auto q = Polynomial::from_coefficients({-1, 0, 1});
  for (double delta : {0.01, 0.001}) {
    const auto rep = check_landing_stability(q, 1, delta, 100);
    CHECK(rep.continued == 100);
    CHECK(rep.threshold == delta);
  }
  auto rep = check_landing_stability(monomial(4), 0, 0.2, 10);
  CHECK(rep.continued == 10);

  try {
    check_landing_stability(Polynomial::from_coefficients({1, 0, 1}), 1, 0.01, 5);
    FAIL("expected NotLanding");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotLanding);
  }
}

TEST_CASE("landing stability is monotone in the radius") {
  std::mt19937_64 rng(21);
  int runs = 0;
  for (int trial = 0; trial < 10 && runs < 4; ++trial) {
    const auto roots = testing_util::random_centered_roots(rng, 3);
    const double sep = testing_util::min_pairwise(roots);
    if (sep < 0.3) continue;
    const auto p = Polynomial::from_roots(roots);
    const auto g = trace_all(p);
    if (g.uncertain) continue;
    for (const auto& t : g.traces) {
      if (t.outcome != TraceOutcome::Landing) continue;
      const double delta = 0.45 * sep;
      const auto big = check_landing_stability(p, t.index, delta, 20, 5);
      const auto small = check_landing_stability(p, t.index, delta / 2, 20, 5);
      CHECK(small.continued >= big.continued);
      CHECK(big.threshold <= delta);
      ++runs;
      break;
    }
  }
  CHECK(runs >= 3);
}
