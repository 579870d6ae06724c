#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyvf/poly.hpp"

namespace polyvf {

struct TraceOptions {
  double escape_factor = 10.0;   // R = escape_factor * root_scale
  double landing_factor = 1e-8;  // delta = landing_factor * root_scale
  long step_budget = 1'000'000;
  double angle_tol = 0.0;        // 0 means pi / (4 (d-1))
  double rtol = 1e-12;
  double homoclinic_tol = 1e-7;  // |Im tau| / |tau| accepted as a real return time
  bool record_path = true;
};

enum class TraceOutcome { Landing, Homoclinic, Uncertain };

std::string_view to_string(TraceOutcome o);

struct SeparatrixTrace {
  int index = 0;
  int direction = 1;  // +1 outgoing from infinity (odd), -1 incoming (even)
  TraceOutcome outcome = TraceOutcome::Uncertain;

  // Landing
  int root = -1;             // index into Polynomial::roots()
  cplx pivot{};              // point of the path on the circle |z - root| = pivot_radius
  double pivot_radius = 0.0;
  double pivot_phi = 0.0;    // integral of dz/P from infinity to pivot along the separatrix (real)

  // Homoclinic
  int partner = -1;
  cplx tau{};                // positive real up to the reality tolerance

  std::string diagnostic;
  std::vector<cplx> path;
  cplx start{};
  cplx tail_time{};          // integral of dz/P from start to infinity
  long steps = 0;
};

/// Integral of dw/P from z to infinity along the ray through z. Requires
/// |z| >= 2 max|root| (outside that disk the integral is path independent).
cplx tail_time(const Polynomial& p, cplx z);

/// Integral of dz/P along a polyline. Throws PathThroughSingularity when a
/// segment passes within safety_factor * root_scale of a root.
cplx path_time_integral(const Polynomial& p, const std::vector<cplx>& path, double safety_factor = 1e-6);

/// Capture radius used for landing detection at root i (see flow.cpp).
double trap_radius(const Polynomial& p, std::size_t i);

SeparatrixTrace trace_separatrix(const Polynomial& p, int index, const TraceOptions& opts = {});

struct HomoclinicMatch {
  int k = -1;  // odd index
  int j = -1;  // even index
  cplx tau_from_k{}, tau_from_j{};
  bool agree = false;
};

struct SeparatrixGraphNumeric {
  Polynomial poly;
  std::vector<SeparatrixTrace> traces;
  std::vector<EquilibriumPoint> equilibria;
  std::vector<HomoclinicMatch> homoclinics;
  bool uncertain = false;
  std::vector<std::string> diagnostics;
};

/// All 2(d-1) traces plus the consistency report. Never throws on ambiguity;
/// the uncertain flag and diagnostics describe it. Traces may run on
/// `threads` workers (0: POLYVF_THREADS or 1).
SeparatrixGraphNumeric trace_all(const Polynomial& p, const TraceOptions& opts = {}, int threads = 0);

class UncertainClassificationError : public Error {
 public:
  explicit UncertainClassificationError(SeparatrixGraphNumeric g);
  const SeparatrixGraphNumeric& graph() const { return graph_; }

 private:
  SeparatrixGraphNumeric graph_;
};

/// trace_all, throwing UncertainClassificationError when the graph is uncertain.
SeparatrixGraphNumeric separatrix_graph(const Polynomial& p, const TraceOptions& opts = {}, int threads = 0);

int default_thread_count();

}  // namespace polyvf
