#include <doctest.h>

#include <numbers>
#include <random>

#include "helpers.hpp"
#include "polyvf/invariants.hpp"

using namespace polyvf;
using std::numbers::pi;

namespace {

const cplx I(0, 1);

Polynomial P(std::initializer_list<Root> r) { return Polynomial::from_roots(std::vector<Root>(r)); }

// Face residues from the graph against residues computed from the roots.
double residue_mismatch(const Polynomial& p, const Classification& c) {
  const auto res = residues_from_graph(c.metric);
  double worst = 0.0, scale = 0.0;
  for (std::size_t f = 0; f < res.size(); ++f) {
    const cplx direct = residue(p, p.roots()[c.face_root[f]].position);
    worst = std::max(worst, std::abs(res[f] - direct));
    scale = std::max(scale, std::abs(direct));
  }
  return worst / scale;
}

}  // namespace

TEST_CASE("closed-form witnesses") {
  const auto c1 = classify(P({{I, 1}, {-I, 1}}));
  CHECK(format_bracketing(c1.cls) == "(0 1)");
  REQUIRE(c1.metric.taus.size() == 1);
  CHECK(std::abs(c1.metric.taus[0] - pi) < 1e-6);
  CHECK(c1.metric.alphas.empty());

  const auto c2 = classify(P({{1, 1}, {-1, 1}}));
  CHECK(format_bracketing(c2.cls) == "[0 1]");
  REQUIRE(c2.metric.alphas.size() == 1);
  CHECK(std::abs(c2.metric.alphas[0] - pi * I) < 1e-6);

  for (int d = 2; d <= 5; ++d) {
    const auto c = classify(monomial(d));
    CHECK(c.cls.h() == 0);
    CHECK(c.cls.s() == 0);
    CHECK(static_cast<int>(c.cls.unpaired.size()) == 2 * (d - 1));
  }
}

TEST_CASE("residues from the graph: examples") {
  MetricGraph src{parse_bracketing("[0 1]"), {}, {pi * I}};
  auto r = residues_from_graph(src);
  REQUIRE(r.size() == 2);
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  CHECK(std::abs(r[0] + 0.5) < 1e-12);
  CHECK(std::abs(r[1] - 0.5) < 1e-12);

  MetricGraph ctr{parse_bracketing("(0 1)"), {pi}, {}};
  r = residues_from_graph(ctr);
  REQUIRE(r.size() == 2);
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
  CHECK(std::abs(r[0] + 0.5 * I) < 1e-12);
  CHECK(std::abs(r[1] - 0.5 * I) < 1e-12);

  // Each face is tied to the root whose residue it reproduces.
  for (const auto& p : {P({{I, 1}, {-I, 1}}), P({{1, 1}, {-1, 1}})}) {
    const auto c = classify(p);
    CHECK(residue_mismatch(p, c) < 1e-6);
  }
}

TEST_CASE("residue consistency and half-plane properties on random fields") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int d = 2; d <= 4; ++d) {
    for (int trial = 0; trial < 12; ++trial) {
      const auto roots = testing_util::random_centered_roots(rng, d);
      if (testing_util::min_pairwise(roots) < 0.2) continue;
      const auto p = Polynomial::from_roots(roots);
      Classification c;
      try {
        c = classify(p);
      } catch (const UncertainClassificationError&) {
        continue;
      }
      ++checked;
      CHECK(validate_class(c.cls).valid);
      for (cplx a : c.metric.alphas) CHECK(a.imag() > 0.0);
      for (double t : c.metric.taus) CHECK(t > 0.0);
      CHECK(residue_mismatch(p, c) < 1e-6);
      cplx sum = 0.0;
      double mx = 0.0;
      for (cplx r : residues_from_graph(c.metric)) {
        sum += r;
        mx = std::max(mx, std::abs(r));
      }
      CHECK(std::abs(sum) < 1e-9 * mx);
    }
  }
  CHECK(checked >= 25);
}

TEST_CASE("fields with homoclinics and centers") {
  const cplx u = std::polar(1.0, pi / 4);
  const auto p = P({{-1.2 * u, 1}, {0.4 * u, 1}, {0.8 * u, 1}});
  const auto c = classify(p);
  CHECK(c.cls.h() >= 1);
  CHECK(validate_class(c.cls).valid);
  CHECK(residue_mismatch(p, c) < 1e-6);
  for (std::size_t i = 0; i < c.cls.round.size(); ++i) {
    const cplx tau = c.graph.traces[c.cls.round[i].first].tau;
    CHECK(std::abs(tau.imag()) < 1e-6 * tau.real());
  }
}

TEST_CASE("multiple roots") {
  const auto p = P({{1, 2}, {-2, 1}});
  const auto c = classify(p);
  CHECK(c.cls.mstar() == 1);
  CHECK(static_cast<int>(c.cls.unpaired.size()) == 2);
  CHECK(residue_mismatch(p, c) < 1e-6);
}

TEST_CASE("scaling law of the invariants") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 2 + trial % 3;
    const auto roots = testing_util::random_centered_roots(rng, d);
    if (testing_util::min_pairwise(roots) < 0.2) continue;
    const auto p = Polynomial::from_roots(roots);
    try {
      const auto base = classify(p);
      for (double c : {0.5, 2.0}) {
        const auto sc = classify(scale_roots(p, c));
        REQUIRE(sc.cls == base.cls);
        MetricGraph expect = base.metric;
        const double f = std::pow(c, -(d - 1));
        for (auto& t : expect.taus) t *= f;
        for (auto& a : expect.alphas) a *= f;
        CHECK(invariant_distance(sc.metric, expect) < 1e-6);
      }
      ++checked;
    } catch (const UncertainClassificationError&) {
    }
  }
  CHECK(checked >= 8);
}

TEST_CASE("metric graph text form") {
  const auto m = parse_metric_graph("class: (0[1[2 3]4]5)\ntaus: [3]\nalphas: [[1, 1], [0, 3]]\n");
  CHECK(m.cls.d == 4);
  REQUIRE(m.cls.square.size() == 2);
  CHECK(m.cls.square[0] == IndexPair{1, 4});
  CHECK(m.alphas[0] == cplx(1, 1));
  CHECK(m.cls.square[1] == IndexPair{3, 2});
  CHECK(m.alphas[1] == cplx(0, 3));
  CHECK(m.cls.round[0] == IndexPair{5, 0});
  CHECK(m.taus[0] == 3.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 50; ++i) {
    MetricGraph g{m.cls, {u(rng) / 3.0}, {{u(rng) - 5.0, u(rng)}, {-u(rng), u(rng) / 7.0}}};
    const auto back = parse_metric_graph(format_metric_graph(g));
    CHECK(back.taus == g.taus);
    CHECK(back.alphas == g.alphas);
    CHECK(back.cls == g.cls);
  }

  CHECK_THROWS_AS(parse_metric_graph("class: (0 1)\ntaus: []\n"), Error);
  CHECK_THROWS_AS(parse_metric_graph("class: (0 1)\ntaus: [-1]\n"), Error);
  CHECK_THROWS_AS(parse_metric_graph("class: [0 1]\nalphas: [[1, -1]]\n"), Error);
  CHECK_THROWS_AS(parse_metric_graph("taus: [1]\n"), Error);
}

TEST_CASE("invariants need a consistent graph") {
  const auto p = P({{I, 1}, {-I, 1}});
  auto g = trace_all(p);
  g.traces[1].outcome = TraceOutcome::Uncertain;
  try {
    analytic_invariants(p, g);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InconsistentGraph);
  }
  MetricGraph bad{parse_bracketing("(0 1)"), {}, {}};
  CHECK_THROWS_AS(residues_from_graph(bad), Error);
}
