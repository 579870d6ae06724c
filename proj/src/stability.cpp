#include "polyvf/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <thread>

namespace polyvf {

namespace {

constexpr double kPi = std::numbers::pi;

// The two landing separatrices of a strip that meet root r: (lower, upper).
std::pair<int, int> strip_pair(const Zone& z, const SeparatrixData& data, int r) {
  std::vector<int> at;
  for (int l : z.landing_separatrices)
    if (data.root[l] == r) at.push_back(l);
  if (r == z.omega) {
    const int k = z.transversal.first;
    int m = k;
    for (int l : at)
      if (l != k) m = l;
    return {k, m};
  }
  const int j = z.transversal.second;
  int lower = j;
  for (int l : at)
    if (l != j) lower = l;
  return {lower, j};
}

}  // namespace

std::string_view to_string(SectorCase c) {
  switch (c) {
    case SectorCase::TwoSepals: return "two_sepals";
    case SectorCase::SepalAndStrip: return "sepal_and_strip";
    case SectorCase::TwoStrips: return "two_strips";
  }
  return "?";
}

std::string_view to_string(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::Continued: return "continued";
    case TrialOutcome::Elsewhere: return "elsewhere";
    case TrialOutcome::Homoclinic: return "homoclinic";
    case TrialOutcome::Uncertain: return "uncertain";
  }
  return "?";
}

SectorEstimate protective_sector(const Polynomial& p, int l, double margin) {
  const int n = 2 * (p.degree() - 1);
  if (l < 0 || l >= n) throw Error(ErrorKind::InvalidInput, "separatrix index out of range");
  const auto t = trace_separatrix(p, l);
  if (t.outcome != TraceOutcome::Landing)
    throw Error(ErrorKind::NotLanding, "s" + std::to_string(l) + " is " + std::string(to_string(t.outcome)));
  return protective_sector(classify(p), l, margin);
}

SectorEstimate protective_sector(const Classification& c, int l, double margin) {
  const auto& data = c.data;
  if (l < 0 || l >= static_cast<int>(data.root.size()) || data.root[l] < 0)
    throw Error(ErrorKind::NotLanding, "s" + std::to_string(l) + " does not land");
  const auto zones = zones_from_data(data);
  std::map<IndexPair, double> tau;
  std::map<IndexPair, cplx> alpha;
  for (std::size_t i = 0; i < c.cls.round.size(); ++i) tau[c.cls.round[i]] = c.metric.taus[i];
  for (std::size_t i = 0; i < c.cls.square.size(); ++i) alpha[c.cls.square[i]] = c.metric.alphas[i];

  SectorEstimate est;
  est.index = l;
  est.root = data.root[l];
  const int r = est.root;
  const bool outgoing = l % 2;

  // Offset between the bases of the lower and the upper separatrix of a strip
  // at r: the invariant plus the homoclinics on the edge through those ends.
  auto offset = [&](const Zone& z) {
    cplx v = alpha.at(z.transversal);
    for (const auto& h : (outgoing ? z.homoclinics_right : z.homoclinics_left)) v += tau.at(h);
    return v;
  };
  auto find_strip = [&](int sep, bool as_lower) -> const Zone* {
    for (const auto& z : zones) {
      if (z.kind != ZoneKind::AlphaOmega || (outgoing ? z.omega : z.alpha) != r) continue;
      const auto [lo, up] = strip_pair(z, data, r);
      if ((as_lower ? lo : up) == sep) return &z;
    }
    return nullptr;
  };

  const std::size_t limit = zones.size() + 1;
  for (int dir : {+1, -1}) {
    auto& out = dir > 0 ? est.upward : est.downward;
    int sep = l;
    cplx pos = 0.0;
    while (out.size() < limit) {
      const Zone* z = find_strip(sep, dir > 0);
      if (!z) break;
      const auto [lo, up] = strip_pair(*z, data, r);
      pos += double(dir) * offset(*z);
      out.push_back(pos);
      sep = dir > 0 ? up : lo;
      if (sep == l) {
        est.full_turn = true;
        break;
      }
    }
  }

  const int strips = (est.upward.empty() ? 0 : 1) + (est.downward.empty() ? 0 : 1);
  est.kind = strips == 0 ? SectorCase::TwoSepals : strips == 1 ? SectorCase::SepalAndStrip : SectorCase::TwoStrips;
  est.partial_sums = est.upward;
  est.partial_sums.insert(est.partial_sums.end(), est.downward.begin(), est.downward.end());

  // Outgoing: S(a) = {|arg w| < a} around R+; incoming: around R-.
  est.angle = kPi / 2 - margin;
  for (cplx w : est.partial_sums) {
    const double a = std::abs(std::arg(w));
    est.angle = std::min(est.angle, outgoing ? a : kPi - a);
  }
  return est;
}

NonSplittingSample perturb_non_splitting(const Polynomial& p, double delta, std::uint64_t seed) {
  const auto& roots = p.roots();
  double sep = INFINITY;
  for (std::size_t a = 0; a < roots.size(); ++a)
    for (std::size_t b = a + 1; b < roots.size(); ++b) sep = std::min(sep, std::abs(roots[a].position - roots[b].position));
  if (!(delta > 0.0) || !(delta < 0.5 * sep))
    throw Error(ErrorKind::RadiusTooLarge, "delta must lie in (0, half the smallest root separation)");

  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(ss);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NonSplittingSample s;
  s.base = p;
  std::vector<Root> moved = roots;
  cplx mean = 0.0;
  for (auto& r : moved) {
    r.position += std::polar(delta * std::sqrt(u(rng)), 2 * kPi * u(rng));
    mean += double(r.multiplicity) * r.position;
  }
  mean /= double(p.degree());
  for (auto& r : moved) {
    r.position -= mean;
    s.moved.push_back(r.position);
  }
  for (std::size_t i = 0; i < roots.size(); ++i)
    s.root_displacement = std::max(s.root_displacement, std::abs(s.moved[i] - roots[i].position));
  s.perturbed = Polynomial::from_roots(moved);

  // Sampled sup of |P/P0 - 1| on the annulus between landing and escape
  // radius, away from the delta-disks of the base roots.
  const TraceOptions defaults;
  const double scale = p.root_scale();
  const double r0 = defaults.landing_factor * scale, r1 = defaults.escape_factor * scale;
  for (int i = 0; i <= 48; ++i) {
    const double rad = r0 * std::pow(r1 / r0, i / 48.0);
    for (int k = 0; k < 72; ++k) {
      const cplx z = std::polar(rad, 2 * kPi * (k + 0.5) / 72);
      bool near = false;
      for (const auto& r : roots) near = near || std::abs(z - r.position) < delta;
      if (near) continue;
      s.s_bound = std::max(s.s_bound, std::abs(s.perturbed(z) / p(z) - 1.0));
    }
  }
  return s;
}

LandingStabilityReport check_landing_stability(const Polynomial& p, int l, double delta, int trials,
                                               std::uint64_t seed, const TraceOptions& opts, int threads) {
  const int n = 2 * (p.degree() - 1);
  if (l < 0 || l >= n) throw Error(ErrorKind::InvalidInput, "separatrix index out of range");
  if (trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be positive");
  const auto base = trace_separatrix(p, l, opts);
  if (base.outcome != TraceOutcome::Landing)
    throw Error(ErrorKind::NotLanding, "s" + std::to_string(l) + " is " + std::string(to_string(base.outcome)));
  const int target = base.root;
  if (threads <= 0) threads = default_thread_count();

  auto run = [&](double dlt, std::vector<TrialOutcome>& outcomes, std::vector<double>& sb) {
    outcomes.assign(trials, TrialOutcome::Uncertain);
    sb.assign(trials, 0.0);
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int t; (t = next++) < trials;) {
        const auto s = perturb_non_splitting(p, dlt, seed + static_cast<std::uint64_t>(t));
        sb[t] = s.s_bound;
        const auto tr = trace_separatrix(s.perturbed, l, opts);
        if (tr.outcome == TraceOutcome::Homoclinic) {
          outcomes[t] = TrialOutcome::Homoclinic;
        } else if (tr.outcome == TraceOutcome::Landing) {
          const cplx z = s.perturbed.roots()[tr.root].position;
          const bool same = std::abs(z - s.moved[target]) < 1e-9 * s.perturbed.root_scale();
          outcomes[t] = same ? TrialOutcome::Continued : TrialOutcome::Elsewhere;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < std::min(threads, trials); ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  };

  LandingStabilityReport rep;
  rep.index = l;
  rep.delta = delta;
  rep.trials = trials;
  std::vector<double> sb;
  run(delta, rep.outcomes, sb);
  for (auto o : rep.outcomes) {
    switch (o) {
      case TrialOutcome::Continued: ++rep.continued; break;
      case TrialOutcome::Elsewhere: ++rep.elsewhere; break;
      case TrialOutcome::Homoclinic: ++rep.homoclinic; break;
      case TrialOutcome::Uncertain: ++rep.uncertain; break;
    }
  }
  rep.max_s_bound = *std::max_element(sb.begin(), sb.end());

  if (rep.continued == trials) {
    rep.threshold = delta;
  } else {
    double lo = 0.0, hi = delta;
    std::vector<TrialOutcome> o;
    std::vector<double> tmp;
    for (int it = 0; it < 12; ++it) {
      const double mid = 0.5 * (lo + hi);
      run(mid, o, tmp);
      const bool all = std::all_of(o.begin(), o.end(), [](TrialOutcome x) { return x == TrialOutcome::Continued; });
      (all ? lo : hi) = mid;
    }
    rep.threshold = lo;
  }
  return rep;
}

}  // namespace polyvf
