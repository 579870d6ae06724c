#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "polyvf/combinat.hpp"
#include "polyvf/flow.hpp"

namespace polyvf {

/// A class plus its analytic invariants: one tau > 0 per round pair and one
/// alpha with Im alpha > 0 per square pair, both in Bracketing order.
struct MetricGraph {
  Bracketing cls;
  std::vector<double> taus;
  std::vector<cplx> alphas;
};

/// Throws InvalidInput unless sizes match the class and every invariant lies
/// in its half space.
void check_metric_graph(const MetricGraph& m);

/// Invariants as one list: alphas first, then taus.
std::vector<cplx> invariant_list(const MetricGraph& m);

/// Largest |a_i - b_i| / max(|a_i|, |b_i|); infinite when the classes differ.
double invariant_distance(const MetricGraph& a, const MetricGraph& b);

// Face residue = (signed sum of the invariants of the bounding chords) / kappa.
inline const cplx kappa{0.0, 6.283185307179586476925286766559};

struct Classification {
  SeparatrixGraphNumeric graph;
  SeparatrixData data;
  Bracketing cls;
  std::vector<int> face_root;  // face of faces_of(cls) -> index into poly.roots()
  MetricGraph metric;
};

/// Separatrix data read off a traced graph, with the landing order at each
/// root checked against the index order. Throws InconsistentGraph.
SeparatrixData separatrix_data(const SeparatrixGraphNumeric& g);

Classification analyze_graph(const Polynomial& p, const SeparatrixGraphNumeric& g);
MetricGraph analytic_invariants(const Polynomial& p, const SeparatrixGraphNumeric& g);

/// Traces, classifies and measures. Throws UncertainClassificationError.
Classification classify(const Polynomial& p, const TraceOptions& opts = {}, int threads = 0);

/// Residue at the equilibrium of every face of faces_of(m.cls).
std::vector<cplx> residues_from_graph(const MetricGraph& m);

std::string format_metric_graph(const MetricGraph& m);
MetricGraph parse_metric_graph(std::string_view text);

}  // namespace polyvf
