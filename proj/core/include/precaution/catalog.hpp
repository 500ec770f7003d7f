#pragma once

#include <string>
#include <string_view>

namespace precaution::zoo {

enum class FunctionKind { Power, Crra, Exp, Quadratic, Log };

std::string_view to_string(FunctionKind k);
FunctionKind function_kind_from_string(std::string_view name);

/// One entry of the closed utility catalog, with exact derivatives:
///   power:     scale * y^theta
///   crra:      scale * y^(1-gamma) / (1-gamma)
///   exp:       -scale * exp(-eta y)
///   quadratic: -scale * (y - c)^2
///   log:       scale * ln y
/// The argument is y = z - state_coef * x where a family feeds z and the state x.
struct CatalogFunction {
  FunctionKind kind = FunctionKind::Quadratic;
  /// theta, gamma, eta or c depending on kind; unused for log.
  double param = 0.0;
  double scale = 1.0;
  double state_coef = 0.0;

  static CatalogFunction power(double theta);
  static CatalogFunction crra(double gamma);
  static CatalogFunction exp(double eta);
  static CatalogFunction quadratic(double c);
  static CatalogFunction log();

  /// Throws DomainViolation naming `role` if the parameters are invalid.
  void validate(std::string_view role) const;

  double value(double y) const;
  double d1(double y) const;
  double d2(double y) const;

  /// True when the function is finite at every y > 0 only (not at 0 or below).
  bool needs_positive_argument() const;
  /// Finite at y = 0 (power with theta > 0, crra with gamma < 1, exp, quadratic).
  bool defined_at_zero() const;
  bool in_domain(double y) const;
  bool concave() const;

  /// Exponent g with d1(y) proportional to y^(-g), when that form holds.
  bool power_law_marginal(double& g) const;

  double arg(double z, double x) const { return z - state_coef * x; }
};

}  // namespace precaution::zoo
