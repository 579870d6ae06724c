#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polyvf/invariants.hpp"

namespace polyvf {

inline constexpr const char* kVersion = "0.1.0";

struct PortraitOptions {
  int size = 600;            // pixels, square
  double view_factor = 2.0;  // viewport radius = view_factor * root_scale
  int streamlines = 0;       // grid seeds per side, 0 for none
  TraceOptions trace;
};

/// SVG picture of the separatrix graph: one polyline per separatrix
/// (class "separatrix landing|homoclinic|uncertain"), one marker per
/// equilibrium (class "equilibrium <kind>"), and end labels e_l on the
/// viewport circle. Byte-identical for identical input.
std::string render_portrait(const Polynomial& p, const PortraitOptions& opts = {});

struct SweepOptions {
  int degree = 3;
  int samples = 1000;
  double box = 2.0;  // coefficients a_0..a_{d-2} uniform in [-box, box]^2
  std::uint64_t seed = 0;
  int threads = 0;
  TraceOptions trace;
};

struct SweepReport {
  int samples = 0, uncertain = 0, full_dimension = 0;
  std::map<std::string, int> counts;  // class -> samples
  std::map<std::string, int> dims;    // class -> real dimension
  double full_fraction() const {
    const int certain = samples - uncertain;
    return certain > 0 ? double(full_dimension) / certain : 0.0;
  }
};

/// Classifies random coefficient vectors (class only, no invariants).
SweepReport sweep_classes(const SweepOptions& opts);

struct CommandResult {
  int exit_code = 0;
  std::string payload;
  std::vector<std::string> artifacts;
};

/// Runs one subcommand given the full argument list (argv[0] included).
/// Exit codes: 0 success, 2 uncertain classification, 3 realization did not
/// converge, 4 input error.
CommandResult execute_command(const std::vector<std::string>& argv);

}  // namespace polyvf
