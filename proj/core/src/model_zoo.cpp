#include "precaution/model_zoo.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

#include "precaution/errors.hpp"

namespace precaution::zoo {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

[[noreturn]] void domain_error(const std::string& what) { throw DomainViolation(what); }

struct Corners {
  double a_lo, a_hi, b_lo, b_hi, x_lo, x_hi;
};

Corners corners_of(const FamilySpec& spec, const prob::StateSpace& states) {
  return {spec.param("a_lo", 0.0), spec.param("a_hi", 1.0), spec.param("b_lo", 0.0),
          spec.param("b_hi", 1.0), states.values().front(), states.values().back()};
}

// Checks that f(arg) stays in its domain (with margin) wherever arg ranges
// over the listed extreme values of an affine expression.
void require_positive_range(const CatalogFunction& f, const std::string& role,
                            std::initializer_list<double> extremes, double margin) {
  if (!f.needs_positive_argument()) return;
  for (double y : extremes) {
    if (!(y > margin)) {
      domain_error("function '" + role + "' needs a positive argument but reaches " + fmt(y));
    }
  }
}

double gjt_marginal(double gamma, double eta, double z) {
  const double base = eta + z / gamma;
  if (!(base > 0.0)) domain_error("GJT marginal utility evaluated at eta + z/gamma = " + fmt(base));
  return std::pow(base, -gamma);
}

double gjt_value(double gamma, double eta, double z) {
  const double base = eta + z / gamma;
  if (!(base > 0.0)) domain_error("GJT utility evaluated at eta + z/gamma = " + fmt(base));
  return gamma / (1.0 - gamma) * std::pow(base, 1.0 - gamma);
}

// Effective B(a) for consumption-savings: [0, r a] pulled inward by `margin`
// at ends where u3 / u2 are undefined.
decision::BoxChoices cs_box(const FamilySpec& spec, double a) {
  const double r = spec.required_param("r");
  const double margin = spec.param("margin", 1e-6);
  const double lo = spec.function("u3").defined_at_zero() ? 0.0 : margin;
  const double hi = r * a - (spec.function("u2").defined_at_zero() ? 0.0 : margin);
  return {{lo}, {hi}};
}

decision::BoxChoices fixed_box(const FamilySpec& spec, std::size_t n) {
  return {std::vector<double>(n, spec.param("b_lo", 0.0)),
          std::vector<double>(n, spec.param("b_hi", 1.0))};
}

decision::BoxChoices box_at(const FamilySpec& spec, double a) {
  switch (spec.family) {
    case Family::ConsumptionSavings:
      return cs_box(spec, a);
    case Family::RiskNeutral:
      return fixed_box(spec, spec.terms.front().g.size());
    default:
      return fixed_box(spec, 1);
  }
}

decision::Interval first_interval(const FamilySpec& spec) {
  if (spec.family == Family::ConsumptionSavings) {
    const double margin = spec.param("margin", 1e-6);
    const double w = spec.required_param("w");
    return {spec.param("a_lo", margin), spec.param("a_hi", w - margin)};
  }
  return {spec.param("a_lo", 0.0), spec.param("a_hi", 1.0)};
}

double utility_value(const FamilySpec& spec, double a, std::span<const double> b, double x) {
  switch (spec.family) {
    case Family::AdditiveSeparable: {
      const auto& u = spec.function("u");
      const auto& v = spec.function("v");
      return u.value(u.arg(a, x)) + v.value(v.arg(b[0], x));
    }
    case Family::RiskNeutral: {
      double total = spec.function("u").value(a);
      double xk = 1.0;
      for (const auto& term : spec.terms) {
        double lin = 0.0;
        double sq = 0.0;
        for (std::size_t c = 0; c < b.size(); ++c) {
          lin += (term.g[c] + a * term.h[c]) * b[c];
          sq += b[c] * b[c];
        }
        total += xk * (lin - 0.5 * term.q * sq);
        xk *= x;
      }
      return total;
    }
    case Family::ConsumptionSavings: {
      const double beta = spec.required_param("beta");
      const double r = spec.required_param("r");
      const double w = spec.required_param("w");
      return spec.function("u1").value(w - a) + beta * spec.function("u2").value(r * a - b[0]) +
             beta * beta * spec.function("u3").value(b[0] * x);
    }
    case Family::GlobalWarming: {
      const double gamma = spec.required_param("gamma");
      const double eta = spec.required_param("eta");
      return spec.function("u").value(a) + gjt_value(gamma, eta, b[0] - x * (a + b[0]));
    }
    case Family::CakeEating:
      return spec.function("u").value(a) + spec.function("v").value(b[0]) +
             spec.function("w").value(x - a - b[0]);
  }
  return 0.0;
}

std::optional<double> bracketed_root(const std::function<double(double)>& f, double lo,
                                     double hi, std::size_t scan = 400) {
  auto safe = [&](double t) -> std::optional<double> {
    try {
      const double v = f(t);
      if (std::isfinite(v)) return v;
    } catch (const DomainViolation&) {
    }
    return std::nullopt;
  };
  std::optional<double> prev_v;
  double prev_t = lo;
  for (std::size_t k = 0; k <= scan; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(scan);
    const auto v = safe(t);
    if (!v) {
      prev_v.reset();
      continue;
    }
    if (*v == 0.0) return t;
    if (prev_v && (*prev_v < 0.0) != (*v < 0.0)) {
      double a = prev_t;
      double b = t;
      double fa = *prev_v;
      // Bisect down to adjacent doubles; the residual check downstream is absolute.
      for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const auto fm = safe(mid);
        if (!fm) return std::nullopt;
        if (*fm == 0.0) return mid;
        if ((fa < 0.0) == (*fm < 0.0)) {
          a = mid;
          fa = *fm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    prev_v = v;
    prev_t = t;
  }
  return std::nullopt;
}

bool inside(const decision::BoxChoices& box, std::span<const double> b, double tol = 1e-12) {
  for (std::size_t c = 0; c < b.size(); ++c) {
    const double slack = tol * (1.0 + std::abs(box.lo[c]) + std::abs(box.hi[c]));
    if (b[c] < box.lo[c] - slack || b[c] > box.hi[c] + slack) return false;
  }
  return true;
}

std::vector<double> apply(const std::vector<double>& M, std::size_t n, std::span<const double> v) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i] += M[i * n + j] * v[j];
  }
  return out;
}

void solve_risk_neutral(const FamilySpec& spec, double a1, double a0,
                        std::span<const double> b1, FocCertificate& cert) {
  const std::size_t n = b1.size();
  const std::size_t blocks = spec.terms.size();
  const std::size_t rows = blocks * n;
  const std::size_t cols = n * n + n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                            static_cast<Eigen::Index>(cols));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows));
  for (std::size_t k = 0; k < blocks; ++k) {
    const auto& t = spec.terms[k];
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(k * n + i);
      for (std::size_t j = 0; j < n; ++j) {
        A(row, static_cast<Eigen::Index>(i * n + j)) = t.g[j] + a1 * t.h[j] - t.q * b1[j];
      }
      A(row, static_cast<Eigen::Index>(n * n + i)) = t.q;
      rhs(row) = t.g[i] + a0 * t.h[i];
    }
  }
  // Among all solutions, take the one closest to (M, b0) = (Id, b1).
  Eigen::VectorXd ref = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < n; ++i) {
    ref(static_cast<Eigen::Index>(i * n + i)) = 1.0;
    ref(static_cast<Eigen::Index>(n * n + i)) = b1[i];
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  const Eigen::VectorXd z = ref + cod.solve(rhs - A * ref);
  const double misfit = (A * z - rhs).lpNorm<Eigen::Infinity>();
  const double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>() + A.lpNorm<Eigen::Infinity>();
  cert.constants["rank"] = static_cast<double>(cod.rank());
  cert.constants["equations"] = static_cast<double>(rows);
  cert.constants["unknowns"] = static_cast<double>(cols);
  cert.constants["misfit"] = misfit;
  if (misfit > 1e-10 * scale) {
    throw NoCertificate("risk-neutral first-order system is inconsistent (misfit " +
                        fmt(misfit) + ", rank " + std::to_string(cod.rank()) + ")");
  }
  cert.M.assign(n * n, 0.0);
  cert.b0.assign(n, 0.0);
  for (std::size_t i = 0; i < n * n; ++i) cert.M[i] = z(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < n; ++i) cert.b0[i] = z(static_cast<Eigen::Index>(n * n + i));
}

void solve_consumption_savings(const FamilySpec& spec, double a1, double a0, double b1,
                               FocCertificate& cert) {
  double g = 0.0;
  if (!spec.function("u3").power_law_marginal(g)) {
    throw NoCertificate("consumption-savings certificate needs a power-law marginal u3' "
                        "(power, crra or log)");
  }
  const double r = spec.required_param("r");
  const auto& u2 = spec.function("u2");
  // u3'(y) ~ y^-g. Matching the x-dependent part gives M = alpha^-g with
  // b0 = alpha b1; the remainder is alpha^-g u2'(r a1 - b1) = u2'(r a0 - alpha b1).
  const double target = u2.d1(r * a1 - b1);
  auto compat = [&](double alpha) {
    return std::pow(alpha, -g) * target - u2.d1(r * a0 - alpha * b1);
  };
  const double alpha_max = r * a0 / b1;
  const auto root = bracketed_root(compat, alpha_max * 1e-9, alpha_max, 2000);
  if (!root) throw NoCertificate("no compatible scaling alpha for consumption-savings");
  cert.M = {std::pow(*root, -g)};
  cert.b0 = {*root * b1};
  cert.constants["alpha"] = *root;
  cert.constants["marginal_exponent"] = g;
}

void solve_global_warming(const FamilySpec& spec, double a1, double a0, double b1,
                          FocCertificate& cert) {
  const double gamma = spec.required_param("gamma");
  const double eta = spec.required_param("eta");
  // v'(alpha z + gamma eta (alpha - 1)) = alpha^-gamma v'(z) for all z; matching
  // z0 = alpha z1 + gamma eta (alpha - 1) coefficientwise in x.
  const double denom = a1 - gamma * eta;
  if (denom == 0.0) {
    throw NoCertificate("a1 = gamma * eta: no affine reparametrization links the two stages");
  }
  const double alpha = (a0 - gamma * eta) / denom;
  if (!(alpha > 0.0)) {
    throw NoCertificate("scaling constant alpha = " + fmt(alpha) + " is not positive");
  }
  cert.M = {std::pow(alpha, -gamma)};
  cert.b0 = {alpha * b1 + gamma * eta * (alpha - 1.0)};
  cert.constants["alpha"] = alpha;
  cert.constants["shift"] = gamma * eta * (alpha - 1.0);
}

void solve_cake_eating(const FamilySpec& spec, double a1, double a0, double b1,
                       FocCertificate& cert) {
  const auto& v = spec.function("v");
  const auto& w = spec.function("w");
  if (w.state_coef != 0.0) throw NoCertificate("cake-eating w must not carry a state shift");
  const double s1 = a1 + b1;
  const auto box = fixed_box(spec, 1);
  std::function<double(double)> compat;
  std::function<double(double)> multiplier;
  if (w.kind == FunctionKind::Exp) {
    // w'(x - s) = scale eta e^{-eta x} e^{eta s}: M = e^{eta (s0 - s1)}, kappa = 0.
    const double eta = w.param;
    multiplier = [=](double b0) { return std::exp(eta * (a0 + b0 - s1)); };
    compat = [&, multiplier](double b0) { return multiplier(b0) * v.d1(b1) - v.d1(b0); };
  } else if (w.kind == FunctionKind::Quadratic) {
    // w' affine: M = 1 and v'(b1) - v'(b0) + 2 scale (s0 - s1) = 0.
    multiplier = [](double) { return 1.0; };
    compat = [&, s1](double b0) { return v.d1(b1) - v.d1(b0) + 2.0 * w.scale * (a0 + b0 - s1); };
  } else {
    throw NoCertificate("cake-eating certificate needs w of kind exp or quadratic");
  }
  const auto root = bracketed_root(compat, box.lo[0], box.hi[0], 2000);
  if (!root) throw NoCertificate("no compatible b0 for cake-eating in B(a0)");
  const double M = multiplier(*root);
  cert.M = {M};
  cert.b0 = {*root};
  const double beta = a0 + *root - s1;
  cert.constants["beta"] = beta;
  cert.constants["kappa"] = w.kind == FunctionKind::Quadratic ? -2.0 * w.scale * beta : 0.0;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::AdditiveSeparable:
      return "AdditiveSeparable";
    case Family::RiskNeutral:
      return "RiskNeutral";
    case Family::ConsumptionSavings:
      return "ConsumptionSavings";
    case Family::GlobalWarming:
      return "GlobalWarming";
    case Family::CakeEating:
      return "CakeEating";
  }
  return "?";
}

Family family_from_string(std::string_view name) {
  for (auto f : {Family::AdditiveSeparable, Family::RiskNeutral, Family::ConsumptionSavings,
                 Family::GlobalWarming, Family::CakeEating}) {
    if (to_string(f) == name) return f;
  }
  throw ValidationError("unknown model family '" + std::string(name) + "'");
}

double FamilySpec::param(const std::string& name, double fallback) const {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

double FamilySpec::required_param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) domain_error("missing parameter '" + name + "'");
  return it->second;
}

const CatalogFunction& FamilySpec::function(const std::string& role) const {
  const auto it = functions.find(role);
  if (it == functions.end()) domain_error("missing function '" + role + "'");
  return it->second;
}

void validate(const FamilySpec& spec, const prob::StateSpace& states) {
  for (const auto& [name, value] : spec.params) {
    if (!std::isfinite(value)) domain_error("parameter '" + name + "' is not finite");
  }
  for (const auto& [role, f] : spec.functions) f.validate(role);

  const auto I = first_interval(spec);
  if (!(I.lo < I.hi)) {
    domain_error("parameter 'a_lo' must be below 'a_hi' (" + fmt(I.lo) + " >= " + fmt(I.hi) +
                 ")");
  }
  const double margin = spec.param("margin", 1e-6);
  if (!(margin >= 0.0)) domain_error("parameter 'margin' must be nonnegative");
  const auto c = corners_of(spec, states);
  if (spec.family != Family::ConsumptionSavings && !(c.b_lo <= c.b_hi)) {
    domain_error("parameter 'b_lo' must not exceed 'b_hi'");
  }

  switch (spec.family) {
    case Family::AdditiveSeparable: {
      const auto& u = spec.function("u");
      const auto& v = spec.function("v");
      require_positive_range(u, "u",
                             {u.arg(c.a_lo, c.x_lo), u.arg(c.a_lo, c.x_hi), u.arg(c.a_hi, c.x_lo),
                              u.arg(c.a_hi, c.x_hi)},
                             margin);
      require_positive_range(v, "v",
                             {v.arg(c.b_lo, c.x_lo), v.arg(c.b_lo, c.x_hi), v.arg(c.b_hi, c.x_lo),
                              v.arg(c.b_hi, c.x_hi)},
                             margin);
      break;
    }
    case Family::RiskNeutral: {
      if (spec.terms.empty()) domain_error("parameter 'terms' must list at least one block");
      const std::size_t n = spec.terms.front().g.size();
      if (n == 0) domain_error("parameter 'terms[0].g' must be nonempty");
      for (std::size_t k = 0; k < spec.terms.size(); ++k) {
        const auto& t = spec.terms[k];
        if (t.g.size() != n || t.h.size() != n) {
          domain_error("parameter 'terms[" + std::to_string(k) + "]' has inconsistent length");
        }
        for (double v : t.g) {
          if (!std::isfinite(v)) domain_error("parameter 'terms[" + std::to_string(k) + "].g'");
        }
        for (double v : t.h) {
          if (!std::isfinite(v)) domain_error("parameter 'terms[" + std::to_string(k) + "].h'");
        }
        if (!std::isfinite(t.q)) domain_error("parameter 'terms[" + std::to_string(k) + "].q'");
      }
      require_positive_range(spec.function("u"), "u", {c.a_lo, c.a_hi}, margin);
      break;
    }
    case Family::ConsumptionSavings: {
      const double w = spec.required_param("w");
      const double beta = spec.required_param("beta");
      const double r = spec.required_param("r");
      if (!(beta > 0.0)) domain_error("parameter 'beta' must be positive");
      if (!(r > 0.0)) domain_error("parameter 'r' must be positive");
      if (!(I.lo > 0.0)) domain_error("parameter 'a_lo' must be positive");
      if (!(I.hi < w) && spec.function("u1").needs_positive_argument()) {
        domain_error("parameter 'a_hi' must stay below 'w' for u1");
      }
      require_positive_range(spec.function("u1"), "u1", {w - I.hi, w - I.lo}, 0.0);
      if (spec.function("u3").needs_positive_argument() && !(c.x_lo > 0.0)) {
        domain_error("states must be positive returns for u3");
      }
      const auto box = cs_box(spec, I.lo);
      if (!(box.lo[0] <= box.hi[0])) {
        domain_error("parameter 'a_lo' leaves B(a_lo) empty after the interior margin");
      }
      break;
    }
    case Family::GlobalWarming: {
      const double gamma = spec.required_param("gamma");
      const double eta = spec.required_param("eta");
      if (!(gamma > 0.0) || gamma == 1.0) domain_error("parameter 'gamma' must be > 0 and != 1");
      if (!(eta > 0.0)) domain_error("parameter 'eta' must be positive");
      require_positive_range(spec.function("u"), "u", {c.a_lo, c.a_hi}, margin);
      for (double a : {c.a_lo, c.a_hi}) {
        for (double b : {c.b_lo, c.b_hi}) {
          for (double x : {c.x_lo, c.x_hi}) {
            const double base = eta + (b - x * (a + b)) / gamma;
            if (!(base > margin)) {
              domain_error("parameter 'eta' too small: eta + z/gamma = " + fmt(base) +
                           " at (a, b, x) = (" + fmt(a) + ", " + fmt(b) + ", " + fmt(x) + ")");
            }
          }
        }
      }
      break;
    }
    case Family::CakeEating: {
      require_positive_range(spec.function("u"), "u", {c.a_lo, c.a_hi}, margin);
      require_positive_range(spec.function("v"), "v", {c.b_lo, c.b_hi}, margin);
      require_positive_range(spec.function("w"), "w",
                             {c.x_lo - c.a_hi - c.b_hi, c.x_hi - c.a_lo - c.b_lo}, margin);
      break;
    }
  }
}

decision::DecisionModel build_model(const FamilySpec& spec, const prob::StateSpace& states) {
  validate(spec, states);
  decision::DecisionModel model{.utility = {},
                                .first_interval = first_interval(spec),
                                .second_feasible = {},
                                .b_dim = 1,
                                .states = states,
                                .unimodal_in_b = true};
  model.utility = [spec](double a, std::span<const double> b, double x) {
    return utility_value(spec, a, b, x);
  };
  model.second_feasible = [spec](double a) -> decision::FeasibleSet { return box_at(spec, a); };

  switch (spec.family) {
    case Family::AdditiveSeparable:
      model.unimodal_in_b = spec.function("v").concave();
      break;
    case Family::RiskNeutral: {
      model.b_dim = spec.terms.front().g.size();
      // E_rho of the quadratic coefficient must be nonnegative for every belief.
      for (double x : states.values()) {
        double curvature = 0.0;
        double xk = 1.0;
        for (const auto& t : spec.terms) {
          curvature += xk * t.q;
          xk *= x;
        }
        if (curvature < 0.0) model.unimodal_in_b = false;
      }
      break;
    }
    case Family::ConsumptionSavings:
      model.unimodal_in_b = spec.function("u2").concave() && spec.function("u3").concave();
      break;
    case Family::GlobalWarming:
      break;
    case Family::CakeEating:
      model.unimodal_in_b = spec.function("v").concave() && spec.function("w").concave();
      break;
  }
  return model;
}

std::vector<double> utility_gradient(const FamilySpec& spec, double a, std::span<const double> b,
                                     double x) {
  switch (spec.family) {
    case Family::AdditiveSeparable: {
      const auto& v = spec.function("v");
      return {v.d1(v.arg(b[0], x))};
    }
    case Family::RiskNeutral: {
      std::vector<double> grad(b.size(), 0.0);
      double xk = 1.0;
      for (const auto& t : spec.terms) {
        for (std::size_t c = 0; c < b.size(); ++c) grad[c] += xk * (t.g[c] + a * t.h[c] - t.q * b[c]);
        xk *= x;
      }
      return grad;
    }
    case Family::ConsumptionSavings: {
      const double beta = spec.required_param("beta");
      const double r = spec.required_param("r");
      return {-beta * spec.function("u2").d1(r * a - b[0]) +
              beta * beta * x * spec.function("u3").d1(b[0] * x)};
    }
    case Family::GlobalWarming: {
      const double gamma = spec.required_param("gamma");
      const double eta = spec.required_param("eta");
      return {gjt_marginal(gamma, eta, b[0] - x * (a + b[0])) * (1.0 - x)};
    }
    case Family::CakeEating:
      return {spec.function("v").d1(b[0]) - spec.function("w").d1(x - a - b[0])};
  }
  return {};
}

FocCertificate foc_certificate(const FamilySpec& spec, double a1, double a0,
                               std::span<const double> b1, std::span<const double> x_grid,
                               double arg_tol) {
  if (x_grid.empty()) throw ValidationError("foc_certificate: empty x-grid");
  std::vector<double> xs(x_grid.begin(), x_grid.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const prob::StateSpace grid_states(xs);
  validate(spec, grid_states);

  const auto I = first_interval(spec);
  if (!(a1 > a0)) throw ValidationError("foc_certificate requires a1 > a0");
  if (!I.contains(a1) || !I.contains(a0)) {
    throw InfeasibleFirstDecision("foc_certificate: first decisions outside I");
  }
  const auto box1 = box_at(spec, a1);
  if (b1.size() != box1.lo.size()) throw DimensionMismatch("foc_certificate: b1 has wrong size");
  if (!inside(box1, b1)) throw ValidationError("foc_certificate: b1 is not in B(a1)");

  const std::size_t n = b1.size();
  FocCertificate cert;
  cert.n = n;
  switch (spec.family) {
    case Family::AdditiveSeparable:
      cert.M = {1.0};
      cert.b0.assign(b1.begin(), b1.end());
      break;
    case Family::RiskNeutral:
      solve_risk_neutral(spec, a1, a0, b1, cert);
      break;
    case Family::ConsumptionSavings:
      solve_consumption_savings(spec, a1, a0, b1[0], cert);
      break;
    case Family::GlobalWarming:
      solve_global_warming(spec, a1, a0, b1[0], cert);
      break;
    case Family::CakeEating:
      solve_cake_eating(spec, a1, a0, b1[0], cert);
      break;
  }

  const auto box0 = box_at(spec, a0);
  if (!inside(box0, cert.b0, 1e-10)) {
    throw NoCertificate("solved b0 = " + fmt(cert.b0[0]) + " lies outside B(a0)");
  }

  for (double x : xs) {
    const auto g1 = apply(cert.M, n, utility_gradient(spec, a1, b1, x));
    const auto g0 = utility_gradient(spec, a0, cert.b0, x);
    for (std::size_t i = 0; i < n; ++i) cert.residual = std::max(cert.residual, std::abs(g1[i] - g0[i]));
  }
  if (!(cert.residual <= kFocResidualTol)) {
    throw NoCertificate("first-order residual " + fmt(cert.residual) + " exceeds tolerance");
  }

  // b0 must minimize D(b) = U(a1, phi(b), x) - U(a0, b, x), phi(b) = b1 + M (b - b0).
  auto phi = [&](std::span<const double> b) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = b[i] - cert.b0[i];
    auto md = apply(cert.M, n, d);
    for (std::size_t i = 0; i < n; ++i) md[i] += b1[i];
    return md;
  };
  std::vector<std::vector<double>> directions;
  for (std::size_t i = 0; i < n; ++i) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> e(n, 0.0);
      e[i] = s;
      directions.push_back(e);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      for (double s : {1.0, -1.0}) {
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        e[j] = s;
        directions.push_back(e);
        for (auto& v : e) v = -v;
        directions.push_back(e);
      }
    }
  }
  double b0_scale = 1.0;
  for (double v : cert.b0) b0_scale = std::max(b0_scale, 1.0 + std::abs(v));
  const double eps = 1e-4 * b0_scale;
  for (double x : xs) {
    const double d0 = utility_value(spec, a1, b1, x) - utility_value(spec, a0, cert.b0, x);
    const double slack = 1e-12 * (1.0 + std::abs(utility_value(spec, a1, b1, x)) +
                                  std::abs(utility_value(spec, a0, cert.b0, x)));
    for (const auto& e : directions) {
      std::vector<double> b(n);
      for (std::size_t i = 0; i < n; ++i) b[i] = cert.b0[i] + eps * e[i];
      if (!inside(box0, b)) continue;
      try {
        const double d = utility_value(spec, a1, phi(b), x) - utility_value(spec, a0, b, x);
        if (d < d0 - slack) cert.local_minimum = false;
      } catch (const DomainViolation&) {
      }
    }
  }

  if (spec.family == Family::ConsumptionSavings && b1[0] >= box1.hi[0] - arg_tol) {
    cert.neighborhood_checked = true;
    const double step = 1e-6 * (1.0 + std::abs(cert.b0[0]));
    for (double b : {cert.b0[0] - step, cert.b0[0] + step}) {
      const std::vector<double> bv{std::clamp(b, box0.lo[0], box0.hi[0])};
      if (!inside(box1, phi(bv))) cert.neighborhood_ok = false;
    }
  }
  cert.passed = cert.residual <= kFocResidualTol && cert.neighborhood_ok;
  return cert;
}

double gjt_identity_check(double gamma, double eta, double alpha, std::span<const double> x_grid,
                          double exponent_offset) {
  if (!(gamma > 0.0) || gamma == 1.0) domain_error("gamma must be > 0 and != 1");
  if (!(eta > 0.0)) domain_error("eta must be positive");
  if (!(alpha > 0.0)) domain_error("alpha must be positive");
  double worst = 0.0;
  for (double x : x_grid) {
    const double lhs = gjt_marginal(gamma, eta, alpha * x + gamma * eta * (alpha - 1.0));
    const double rhs = std::pow(alpha, -gamma - exponent_offset) * gjt_marginal(gamma, eta, x);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace precaution::zoo
