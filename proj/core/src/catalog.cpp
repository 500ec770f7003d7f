#include "precaution/catalog.hpp"

#include <cmath>
#include <string>

#include "precaution/errors.hpp"

namespace precaution::zoo {

std::string_view to_string(FunctionKind k) {
  switch (k) {
    case FunctionKind::Power:
      return "power";
    case FunctionKind::Crra:
      return "crra";
    case FunctionKind::Exp:
      return "exp";
    case FunctionKind::Quadratic:
      return "quadratic";
    case FunctionKind::Log:
      return "log";
  }
  return "?";
}

FunctionKind function_kind_from_string(std::string_view name) {
  if (name == "power") return FunctionKind::Power;
  if (name == "crra") return FunctionKind::Crra;
  if (name == "exp") return FunctionKind::Exp;
  if (name == "quadratic") return FunctionKind::Quadratic;
  if (name == "log") return FunctionKind::Log;
  throw ValidationError("unknown catalog function '" + std::string(name) + "'");
}

CatalogFunction CatalogFunction::power(double theta) { return {FunctionKind::Power, theta}; }
CatalogFunction CatalogFunction::crra(double gamma) { return {FunctionKind::Crra, gamma}; }
CatalogFunction CatalogFunction::exp(double eta) { return {FunctionKind::Exp, eta}; }
CatalogFunction CatalogFunction::quadratic(double c) { return {FunctionKind::Quadratic, c}; }
CatalogFunction CatalogFunction::log() { return {FunctionKind::Log, 0.0}; }

void CatalogFunction::validate(std::string_view role) const {
  auto fail = [&](const std::string& why) {
    throw DomainViolation("function '" + std::string(role) + "': " + why);
  };
  if (!std::isfinite(param) || !std::isfinite(scale) || !std::isfinite(state_coef)) {
    fail("parameters must be finite");
  }
  if (!(scale > 0.0)) fail("scale must be positive");
  switch (kind) {
    case FunctionKind::Power:
      if (!(param > 0.0)) fail("power exponent theta must be positive");
      break;
    case FunctionKind::Crra:
      if (!(param > 0.0)) fail("crra gamma must be positive");
      if (param == 1.0) fail("crra gamma = 1 is the log utility; use kind 'log'");
      break;
    case FunctionKind::Exp:
      if (!(param > 0.0)) fail("exp eta must be positive");
      break;
    case FunctionKind::Quadratic:
    case FunctionKind::Log:
      break;
  }
}

bool CatalogFunction::needs_positive_argument() const {
  return kind == FunctionKind::Power || kind == FunctionKind::Crra || kind == FunctionKind::Log;
}

bool CatalogFunction::defined_at_zero() const {
  switch (kind) {
    case FunctionKind::Power:
      return true;
    case FunctionKind::Crra:
      return param < 1.0;
    case FunctionKind::Log:
      return false;
    default:
      return true;
  }
}

bool CatalogFunction::in_domain(double y) const {
  if (!std::isfinite(y)) return false;
  return !needs_positive_argument() || y > 0.0;
}

bool CatalogFunction::concave() const {
  return kind != FunctionKind::Power || param <= 1.0;
}

bool CatalogFunction::power_law_marginal(double& g) const {
  switch (kind) {
    case FunctionKind::Power:
      g = 1.0 - param;
      return true;
    case FunctionKind::Crra:
      g = param;
      return true;
    case FunctionKind::Log:
      g = 1.0;
      return true;
    default:
      return false;
  }
}

double CatalogFunction::value(double y) const {
  if (!in_domain(y)) {
    if (y == 0.0 && defined_at_zero()) return 0.0;
    throw DomainViolation(std::string(to_string(kind)) + " evaluated outside its domain at " +
                          std::to_string(y));
  }
  switch (kind) {
    case FunctionKind::Power:
      return scale * std::pow(y, param);
    case FunctionKind::Crra:
      return scale * std::pow(y, 1.0 - param) / (1.0 - param);
    case FunctionKind::Exp:
      return -scale * std::exp(-param * y);
    case FunctionKind::Quadratic:
      return -scale * (y - param) * (y - param);
    case FunctionKind::Log:
      return scale * std::log(y);
  }
  return 0.0;
}

double CatalogFunction::d1(double y) const {
  if (!in_domain(y)) {
    throw DomainViolation(std::string(to_string(kind)) +
                          " derivative evaluated outside its domain at " + std::to_string(y));
  }
  switch (kind) {
    case FunctionKind::Power:
      return scale * param * std::pow(y, param - 1.0);
    case FunctionKind::Crra:
      return scale * std::pow(y, -param);
    case FunctionKind::Exp:
      return scale * param * std::exp(-param * y);
    case FunctionKind::Quadratic:
      return -2.0 * scale * (y - param);
    case FunctionKind::Log:
      return scale / y;
  }
  return 0.0;
}

double CatalogFunction::d2(double y) const {
  if (!in_domain(y)) {
    throw DomainViolation(std::string(to_string(kind)) +
                          " derivative evaluated outside its domain at " + std::to_string(y));
  }
  switch (kind) {
    case FunctionKind::Power:
      return scale * param * (param - 1.0) * std::pow(y, param - 2.0);
    case FunctionKind::Crra:
      return -scale * param * std::pow(y, -param - 1.0);
    case FunctionKind::Exp:
      return -scale * param * param * std::exp(-param * y);
    case FunctionKind::Quadratic:
      return -2.0 * scale;
    case FunctionKind::Log:
      return -scale / (y * y);
  }
  return 0.0;
}

}  // namespace precaution::zoo
