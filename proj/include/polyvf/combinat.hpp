#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polyvf/error.hpp"

namespace polyvf {

using IndexPair = std::pair<int, int>;  // (odd k, even j)

/// Bracketing on the cyclic string 0 .. 2d-3: round pairs are homoclinic
/// separatrices, square pairs distinguished transversals, the rest unpaired.
struct Bracketing {
  int d = 2;
  std::vector<IndexPair> round;
  std::vector<IndexPair> square;
  std::vector<int> unpaired;

  int n_ends() const { return 2 * (d - 1); }
  int s() const { return static_cast<int>(square.size()); }
  int h() const { return static_cast<int>(round.size()); }
  int mstar() const { return (d - 1) - s() - h(); }

  enum class Mark { Unpaired, Round, Square };
  std::vector<Mark> marks() const;
  std::vector<int> mates() const;  // partner index or -1

  friend bool operator==(const Bracketing& a, const Bracketing& b);
};

/// Sorts pairs, fills `unpaired`, and checks partition, parity and planarity.
/// Throws MalformedBracketing / ParityViolation / CrossingPairs.
Bracketing make_bracketing(int d, std::vector<IndexPair> round, std::vector<IndexPair> square);

Bracketing parse_bracketing(std::string_view text);
std::string format_bracketing(const Bracketing& c);

struct Dimensions {
  int dim = 0, codim = 0, s = 0, h = 0, mstar = 0;
};
Dimensions class_dimensions(const Bracketing& c);

// ---------------------------------------------------------------------------
// Chord-diagram faces. Segment l is the boundary arc from point l to l+1.
// Faces correspond one-to-one to the distinct equilibrium points.

enum class FaceKind { Center, Source, Sink, Multiple };
std::string_view to_string(FaceKind k);

struct Face {
  std::vector<int> segments;
  std::vector<IndexPair> round_chords;
  std::vector<IndexPair> square_chords;
  int unpaired = 0;
  int multiplicity = 1;
  FaceKind kind = FaceKind::Center;
};

struct FaceStructure {
  std::vector<Face> faces;
  std::vector<int> face_of_segment;
};

FaceStructure faces_of(const Bracketing& c);

/// The face on the left of chord k -> j: segments j, j+1, ..., k-1.
int face_left_of_chord(const FaceStructure& fs, const IndexPair& chord);

// ---------------------------------------------------------------------------
// Separatrix data: per index either a homoclinic partner or a landing root.

struct SeparatrixData {
  int d = 2;
  int n_roots = 0;
  std::vector<int> partner;  // -1 when landing
  std::vector<int> root;     // -1 when homoclinic
};

/// Landing pattern implied by a class: s_l lands at the face of segment l.
SeparatrixData separatrix_map(const Bracketing& c);

enum class ZoneKind { CenterOdd, CenterEven, SepalOdd, SepalEven, AlphaOmega };
std::string_view to_string(ZoneKind k);

struct Zone {
  ZoneKind kind = ZoneKind::CenterOdd;
  std::vector<int> ends;                        // boundary walk order, zone on the left
  std::vector<IndexPair> homoclinics_left;      // zone left of s_{k,j} (lower boundary)
  std::vector<IndexPair> homoclinics_right;     // zone right of s_{k,j} (upper boundary)
  std::vector<int> landing_separatrices;
  std::vector<int> equilibria;                  // root ids on the boundary
  int alpha = -1, omega = -1;                   // alpha-omega zones
  IndexPair transversal{-1, -1};                // alpha-omega zones: (k, j)
  int sepal_end = -1;                           // sepal zones
};

/// Zones as cycles of the end permutation: from e_l follow s_l; a homoclinic
/// to p continues at e_{p+1}, a landing at r continues along the landing
/// separatrix preceding l around r. Throws InconsistentZone.
std::vector<Zone> zones_from_data(const SeparatrixData& data);
std::vector<Zone> zones_of(const Bracketing& c);
int zone_of_end(const std::vector<Zone>& zones, int end);

/// Reads the bracketing off separatrix data. Throws InconsistentZone.
Bracketing class_from_data(const SeparatrixData& data);

enum class Realizability { Candidate, Confirmed };
std::string_view to_string(Realizability r);

struct ValidationReport {
  bool valid = false;
  std::vector<std::string> errors;
  Dimensions dims;
  int face_count = 0;
  std::vector<Zone> zones;
  Realizability realizability = Realizability::Candidate;
};

ValidationReport validate_class(const Bracketing& c);

struct EnumeratedClass {
  Bracketing cls;
  Dimensions dims;
  Realizability flag = Realizability::Candidate;
};

using WitnessFn = std::function<bool(const Bracketing&)>;

/// All valid bracketings of degree d; `witness` (optional) upgrades a class
/// to Confirmed when it returns true. Throws CapExceeded for d > cap.
std::vector<EnumeratedClass> enumerate_classes(int d, int cap = 5, const WitnessFn& witness = {});

// ---------------------------------------------------------------------------
// H-chains. A link p -> q exists when k_q = j_p + 1 ('+') or j_p - 1 ('-').
// '+' links lie on the lower boundary of one zone (counter-clockwise),
// '-' links on the upper boundary (clockwise).

struct HChain {
  std::vector<IndexPair> sequence;
  std::string itinerary;  // one sign per link between consecutive entries
  bool closed = false;
  char wrap = 0;          // sign of the closing link for closed chains
};

int sign_changes(std::string_view itinerary);
inline int monotone_subchains(std::string_view itinerary) { return sign_changes(itinerary) + 1; }

std::vector<HChain> h_chains(const Bracketing& c);

struct FormationResult {
  bool possible = false;
  HChain chain;
  /// For m = 1 .. n-1 the required sign of T_m = sum_{i<=m} Im(tau_i)
  /// (+1: T_m > 0, -1: T_m < 0); T_n = 0 always.
  std::vector<int> sign_conditions;
};

FormationResult can_form_homoclinic(const Bracketing& c, int k, int j);

/// Class after moving tau(s_{k,j}) into the upper (+1) or lower (-1) half plane.
Bracketing break_homoclinic(const Bracketing& c, const IndexPair& pair, int half_plane);

}  // namespace polyvf
