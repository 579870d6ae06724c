#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "polyvf/invariants.hpp"

namespace polyvf {

enum class SectorCase { TwoSepals, SepalAndStrip, TwoStrips };
std::string_view to_string(SectorCase c);

struct SectorEstimate {
  int index = -1;
  int root = -1;
  double angle = 0.0;
  SectorCase kind = SectorCase::TwoSepals;
  // Positions, in rectifying coordinates relative to the base of s_l, of the
  // ends met while unfolding the strips around the landing point: upward
  // sums first, then downward ones.
  std::vector<cplx> partial_sums;
  std::vector<cplx> upward, downward;
  bool full_turn = false;  // the strips close up into a cylinder around the root
};

/// Angle of a sector S(angle) at the base of the landing separatrix s_l that
/// holds no other end of the basin. Throws NotLanding and
/// UncertainClassificationError.
SectorEstimate protective_sector(const Polynomial& p, int l, double margin = 1e-3);
SectorEstimate protective_sector(const Classification& c, int l, double margin = 1e-3);

struct NonSplittingSample {
  Polynomial base, perturbed;
  std::vector<cplx> moved;  // perturbed position of every base root, same order
  double root_displacement = 0.0;
  double s_bound = 0.0;     // sampled sup |P / P0 - 1| away from the roots
};

/// Moves every distinct root independently inside its delta-disk, keeps the
/// multiplicities and re-centers. Throws RadiusTooLarge unless delta is below
/// half the smallest root separation.
NonSplittingSample perturb_non_splitting(const Polynomial& p, double delta, std::uint64_t seed);

enum class TrialOutcome { Continued, Elsewhere, Homoclinic, Uncertain };
std::string_view to_string(TrialOutcome o);

struct LandingStabilityReport {
  int index = -1;
  double delta = 0.0;
  int trials = 0;
  int continued = 0, elsewhere = 0, homoclinic = 0, uncertain = 0;
  double max_s_bound = 0.0;
  double threshold = -1.0;  // largest delta with no failures, bisected when failures occur
  std::vector<TrialOutcome> outcomes;
};

/// Traces s_l on `trials` non-splitting perturbations (trial t uses seed
/// seed + t). Throws NotLanding when s_l does not land on the base field.
LandingStabilityReport check_landing_stability(const Polynomial& p, int l, double delta, int trials,
                                               std::uint64_t seed = 0, const TraceOptions& opts = {},
                                               int threads = 0);

}  // namespace polyvf
