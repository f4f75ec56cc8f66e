#pragma once

#include "kgwell/assembly.hpp"
#include "kgwell/geometry.hpp"
#include "kgwell/mesh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kgwell {

/// Smallest generalized eigenpair K x = lambda M x on the free dofs.
struct EigenPair {
  double value = 0.0;
  Vector vector;  // normalized to unit V-norm (x.Kx = 1), positive maximum entry
  double residual = 0.0;  // |Kx - lambda Mx| / |Mx|
  int iterations = 0;
};

struct EigenOptions {
  double tolerance = 1e-10;  // relative residual; accepted higher only at the rounding floor of K x
  int max_iterations = 1000;
};

/// Inverse iteration with Rayleigh-quotient updates. Throws
/// NumericalSetupError for a singular (or indefinite) M or K, or when the
/// residual tolerance is not reached.
EigenPair first_eigenpair(const DiscreteOperators& operators, const EigenOptions& options = {});
double first_eigenvalue(const DiscreteOperators& operators, const EigenOptions& options = {});

struct SupremumOptions {
  double tolerance = 1e-9;  // on the change of the quotient
  int max_iterations = 500;
  int random_starts = 3;
};

/// Discrete best constant in |w|_{L^p} <= c |w|_V (or the Gamma1 trace
/// variant). It is a lower bound on the continuum constant.
struct SupremumResult {
  double value = 0.0;
  Vector maximizer;  // unit V-norm
  int iterations = 0;  // for the best start
  std::vector<double> quotient_history;  // of the best start
};

/// max ||v_h||_{L^p(Omega)} / ||v_h||_V over the finite element space,
/// computed by the normalized fixed-point iteration v <- K^{-1} grad(||v||_p^p).
SupremumResult embedding_constant(const Mesh& mesh, const DiscreteOperators& operators, double p,
                                  const SupremumOptions& options = {});

/// max ||w_h||_{L^p(Gamma1)} / ||w_h||_V, same scheme.
SupremumResult trace_constant(const Mesh& mesh, const BoundaryPartition& partition,
                              const DiscreteOperators& operators, double p,
                              const SupremumOptions& options = {});

/// ||v_h||_{L^p(Omega)} for free coefficients v.
double lp_norm(const Mesh& mesh, const DofMap& dofs, const Vector& v, double p);
/// ||w_h||_{L^p(Gamma1)} for free coefficients w.
double trace_lp_norm(const Mesh& mesh, const BoundaryPartition& partition, const DofMap& dofs,
                     const Vector& w, double p);

/// Potential-well and decay constants.
///
/// The c's stored here are the values actually used in the formulas
/// (already multiplied by any safety factor).
struct WellConstants {
  double rho = 1.0;
  int n = 1;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double lambda1 = 0.0;
  double R = 0.0;
  double m0 = 0.0;
  double N = 0.0;
  double lambda_star = 0.0;
  double N1 = 0.0;
  double lambda1_star = 0.0;
  double P = 0.0;
  double D = 0.0;
  double tau = 0.0;

  /// epsilon_1 = 1 / (2P) used for the perturbed-energy equivalence.
  double eps1() const { return 1.0 / (2.0 * P); }
};

WellConstants well_constants(double rho, int n, double c0, double c1, double c2, double c3, double lambda1,
                             double R, double m0);

/// J(lambda) = lambda^2 / 4 - N lambda^(2(rho+1)). Throws for lambda < 0.
double well_function(double lambda, double N, double rho);

enum class WellSet { General, RhoOne };

struct AdmissibilityReport {
  WellSet set = WellSet::General;
  double L = 0.0;
  double threshold = 0.0;  // lambda* (or lambda1*) in use
  double norm_u0 = 0.0, norm_v0 = 0.0;  // V-norms
  double l2_u1 = 0.0, l2_v1 = 0.0;
  bool norms_below_lambda_star = false;
  bool L_below_quarter_lambda_star_sq = false;
  bool admissible = false;
};

/// Smallness test of the initial data. V-norms use K, L2 norms use M.
/// WellSet::RhoOne uses N1 and lambda1* (fourth powers).
AdmissibilityReport admissibility(const Vector& u0, const Vector& v0, const Vector& u1, const Vector& v1,
                                  const WellConstants& constants, const DiscreteOperators& operators,
                                  WellSet set = WellSet::General);

enum class Regime {
  WeakLowDimension,       // n = 1, 2: rho > 0, theta > 1, 4 rho theta >= 1
  WeakModerateDimension,  // 3 <= n <= 6: (n+2)/(8n) <= rho <= (n+2)/(4(n-2))
  WeakCriticalDimension,  // 7 <= n <= 11: rho = 2/(n-2), theta = n/(n-2)
  RegularRhoOne,          // rho = 1, n <= 3
  RegularLowDimension,    // rho > 1, n = 1, 2
};

std::string to_string(Regime regime);

struct RegimeCheck {
  Regime regime;
  bool satisfied;
  std::string detail;
};

struct ValidationReport {
  double rho = 0.0;
  int n = 0;
  std::optional<double> theta;
  std::vector<RegimeCheck> checks;  // regimes whose dimension range contains n

  /// True when some existence regime (a Weak* entry) is satisfied.
  bool valid() const;
  /// True when the regular-solution (uniqueness and decay) regime applies.
  bool decay_applicable() const;
};

/// Purely arithmetic check of (rho, n, theta) against the hypotheses of each
/// existence regime. An absent theta in dimension 1 or 2 is treated as free:
/// the check reports the smallest admissible theta instead.
ValidationReport validate_hypotheses(double rho, int n, std::optional<double> theta);

}  // namespace kgwell
