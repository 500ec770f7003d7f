#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "precaution/catalog.hpp"
#include "precaution/decision.hpp"
#include "precaution/prob.hpp"

// Literature model families and their first-order certificates.

namespace precaution::zoo {

enum class Family { AdditiveSeparable, RiskNeutral, ConsumptionSavings, GlobalWarming, CakeEating };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

/// One linear-quadratic block of the risk-neutral family:
///   <g + a h, b> - q/2 |b|^2
struct LinearQuadraticTerm {
  std::vector<double> g;
  std::vector<double> h;
  double q = 0.0;
};

/// Family name, real parameters and catalog functions.
///
/// Utilities (x the scalar state):
///   AdditiveSeparable   u(a - ku x) + v(b - kv x)                     functions u, v
///   RiskNeutral         u(a) + sum_k x^k (<g_k + a h_k, b> - q_k/2 |b|^2)  function u, terms
///   ConsumptionSavings  u1(w - a) + beta u2(r a - b) + beta^2 u3(b x)  functions u1, u2, u3
///   GlobalWarming       u(a) + v(b - x (a + b)),
///                       v(z) = gamma/(1-gamma) (eta + z/gamma)^(1-gamma)  function u
///   CakeEating          u(a) + v(b) + w(x - a - b)                   functions u, v, w
///
/// Scalar parameters (defaults in brackets): a_lo [0], a_hi [1], b_lo [0],
/// b_hi [1], margin [1e-6]; ConsumptionSavings adds w, beta, r (its B(a) is
/// [0, r a], a_lo defaults to margin and a_hi to w - margin); GlobalWarming
/// adds gamma, eta.
struct FamilySpec {
  Family family = Family::AdditiveSeparable;
  std::map<std::string, double> params;
  std::map<std::string, CatalogFunction> functions;
  /// RiskNeutral only: terms[0] is deterministic, terms[k] multiplies x^k.
  std::vector<LinearQuadraticTerm> terms;

  double param(const std::string& name, double fallback) const;
  double required_param(const std::string& name) const;
  const CatalogFunction& function(const std::string& role) const;
};

/// Throws DomainViolation naming the offending parameter.
void validate(const FamilySpec& spec, const prob::StateSpace& states);

decision::DecisionModel build_model(const FamilySpec& spec, const prob::StateSpace& states);

/// dU/db at (a, b, x), closed form.
std::vector<double> utility_gradient(const FamilySpec& spec, double a, std::span<const double> b,
                                     double x);

struct FocCertificate {
  /// Row-major n x n.
  std::vector<double> M;
  std::size_t n = 1;
  std::vector<double> b0;
  /// max over the x-grid and coordinates of |M dU/db(a1,b1,x) - dU/db(a0,b0,x)|.
  double residual = 0.0;
  /// b0 is a local minimizer of U(a1, b1 + M(b - b0), x) - U(a0, b, x) at every x.
  bool local_minimum = true;
  /// Irreversibility neighbourhood condition (true when it does not bind).
  bool neighborhood_ok = true;
  bool neighborhood_checked = false;
  bool passed = false;
  /// Solved family constants (alpha, beta, kappa, rank, ...).
  std::map<std::string, double> constants;
};

inline constexpr double kFocResidualTol = 1e-8;

/// Solves M dU/db(a1,b1,x) = dU/db(a0,b0,x) for all x in x_grid.
/// Throws NoCertificate when the family/parameters admit no solution.
FocCertificate foc_certificate(const FamilySpec& spec, double a1, double a0,
                               std::span<const double> b1, std::span<const double> x_grid,
                               double arg_tol = 1e-9);

/// max over x_grid of |v'(alpha x + gamma eta (alpha-1)) - alpha^(-gamma-exponent_offset) v'(x)|
/// for the GJT marginal utility v'(z) = (eta + z/gamma)^(-gamma).
double gjt_identity_check(double gamma, double eta, double alpha, std::span<const double> x_grid,
                          double exponent_offset = 0.0);

}  // namespace precaution::zoo
