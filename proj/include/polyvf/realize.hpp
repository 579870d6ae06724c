#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyvf/invariants.hpp"

namespace polyvf {

enum class RealizeStatus { Converged, ClassBoundary, BudgetExhausted };
std::string_view to_string(RealizeStatus s);

struct RealizeOptions {
  int max_seeds = 400;
  int max_newton = 80;
  double tol = 1e-8;          // relative invariant mismatch accepted as converged
  std::uint64_t seed = 0;
  TraceOptions trace;
};

struct RealizationResult {
  Polynomial polynomial;
  MetricGraph achieved;
  double residual = INFINITY;
  int iterations = 0;  // Newton iterations over all starts
  int starts = 0;
  RealizeStatus status = RealizeStatus::BudgetExhausted;
  std::string note;
};

/// Finds the polynomial whose metric graph is `target`. The face residues
/// fixed by the invariants are solved for the root positions (one unknown per
/// distinct root, multiplicities from the class); candidates are accepted
/// only when re-classification reproduces the target. Throws InvalidInput
/// for targets that are not valid metric graphs.
RealizationResult realize(const MetricGraph& target, const std::optional<Polynomial>& seed = std::nullopt,
                          const RealizeOptions& opts = {});

/// Real Jacobian of the invariant map on the class through a classified
/// field, computed by central differences in the distinct root positions and
/// restricted to the tangent space of the class (Im tau stays 0).
struct JacobianReport {
  int rank = 0;
  int expected = 0;  // 2s + h
  std::vector<double> singular_values;
};
JacobianReport invariant_jacobian(const Classification& c, double step = 1e-6);

struct ConeReport {
  Bracketing base_class, scaled_class;
  bool class_preserved = false;
  double ratio_error = 0.0;  // max relative deviation from c^{-(d-1)} scaling
  std::vector<std::pair<double, double>> coefficient_decay;  // (c, max |a_i|) for c, c/10, ...
};
ConeReport cone_scale_experiment(const Polynomial& p, double c, const TraceOptions& opts = {});

struct AdjacencyPoint {
  double x = 0.0;
  RealizeStatus status = RealizeStatus::BudgetExhausted;
  Polynomial polynomial;
  std::vector<cplx> center_residues;
  cplx fixed_combination{};    // tau_1 + alpha
  double center_distance = 0;  // distance between the two center roots
  cplx zeta0{}, zeta3{};       // equilibria of the faces holding segments 0 and 3
};

struct AdjacencyReport {
  std::vector<AdjacencyPoint> points;
  bool merged_available = false;
  Polynomial merged;
  std::string merged_class;
};

/// Realizes "[0(1 2)3](4 5)" with tau_1 = tau_2 = x and alpha = -x + i im_alpha
/// along the grid (each point seeded by the previous one), then merges the
/// two centers of the last success into a double root and classifies it.
AdjacencyReport adjacency_path_experiment(const std::vector<double>& x_grid, double im_alpha = 1.0,
                                          const RealizeOptions& opts = {});

}  // namespace polyvf
