#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polyvf/error.hpp"

namespace polyvf {

using cplx = std::complex<double>;

/// A distinct zero of P together with its multiplicity.
struct Root {
  cplx position;
  int multiplicity = 1;
};

/// Monic, centered polynomial P(z) = z^d + a_{d-2} z^{d-2} + ... + a_0 defining
/// the vector field P(z) d/dz. Holds both the coefficient and the root form.
class Polynomial {
 public:
  /// z^2, the simplest field; placeholder for default-built results.
  Polynomial() : coeffs_{0.0, 0.0, 1.0}, roots_{Root{0.0, 2}} {}

  /// Expands prod (z - zeta_j)^{m_j}. Throws NotCentered / DegreeTooLow.
  static Polynomial from_roots(std::vector<Root> roots, double centering_tol = 1e-10);

  /// Coefficients a_0..a_d (low to high). Leading must be exactly 1 and the
  /// z^{d-1} coefficient exactly 0. Roots are found numerically.
  static Polynomial from_coefficients(std::vector<cplx> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<cplx>& coefficients() const { return coeffs_; }
  const std::vector<Root>& roots() const { return roots_; }

  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
  /// P(z) and P'(z) in one Horner pass.
  std::pair<cplx, cplx> eval_with_derivative(cplx z) const;

  /// 1 + max |zeta|; the length unit for all relative tolerances.
  double root_scale() const;
  /// Total multiplicity excess sum (m - 1).
  int multiplicity_excess() const;

 private:
  Polynomial(std::vector<cplx> coeffs, std::vector<Root> roots)
      : coeffs_(std::move(coeffs)), roots_(std::move(roots)) {}

  std::vector<cplx> coeffs_;
  std::vector<Root> roots_;
};

/// Coefficients of prod (z - zeta_j)^{m_j}, low to high.
std::vector<cplx> expand_roots(std::span<const Root> roots);

/// Taylor coefficients of P at c: P(c + w) = sum_k t_k w^k.
std::vector<cplx> taylor_coefficients(std::span<const cplx> coeffs, cplx c);

struct RootFinderOptions {
  double cluster_factor = 1e-7;   // clustering radius = factor * (1 + max|root|)
  int max_iterations = 500;
};

/// Simultaneous (Aberth-Ehrlich) iteration with a companion-matrix fallback;
/// near-coincident zeros are merged into one root with summed multiplicity.
std::vector<Root> find_roots(std::span<const cplx> coeffs, const RootFinderOptions& opts = {});

enum class EquilibriumKind { Source, Sink, Center, Multiple };

std::string_view to_string(EquilibriumKind kind);

struct EquilibriumPoint {
  cplx position;
  int multiplicity = 1;
  cplx residue;
  EquilibriumKind kind = EquilibriumKind::Center;
  bool near_bifurcation = false;
};

/// Res(1/P, zeta). Simple roots use 1/P'(zeta); multiple roots a 64-node
/// trapezoidal contour integral. Throws NotARoot.
cplx residue(const Polynomial& p, cplx zeta);

/// Laurent coefficient of (z - zeta_i)^{-1} in prod_j (z - zeta_j)^{-m_j},
/// evaluated from the power series of the cofactor (no quadrature).
cplx residue_from_series(std::span<const Root> roots, std::size_t i);

struct KindResult {
  EquilibriumKind kind;
  bool near_bifurcation;
};

KindResult classify_equilibrium(cplx residue, int multiplicity, double kind_tol = 1e-9);

std::vector<EquilibriumPoint> equilibria(const Polynomial& p, double kind_tol = 1e-9);

/// Roots multiplied by c > 0. Throws NonPositiveScale.
Polynomial scale_roots(const Polynomial& p, double c);

/// z^d.
Polynomial monomial(int d);

/// Parses "coeffs: a0,a1,...,1" or "roots: z1^m1,z2,...". Complex entries are
/// "re", "re+imi", "imi".
Polynomial parse_polynomial(std::string_view text);
cplx parse_complex(std::string_view text);

std::string format_complex(cplx z);
std::string format_coefficients(const Polynomial& p);
std::string format_roots(const Polynomial& p);

}  // namespace polyvf
