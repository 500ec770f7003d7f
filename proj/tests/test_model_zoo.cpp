#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "precaution/errors.hpp"
#include "precaution/model_zoo.hpp"
#include "zoo_instances.hpp"

using namespace precaution;
using namespace precaution::zoo;
using instances::grid;
using instances::with;

namespace {

double U(const decision::DecisionModel& m, double a, double b, double x) {
  const std::vector<double> bv{b};
  return m.utility(a, bv, x);
}

// b0 minimizes D(b) = U(a1, b1 + M (b - b0), x) - U(a0, b, x) over a fine grid of B(a0)?
bool brute_minimizer(const FamilySpec& spec, const decision::DecisionModel& m, double a1, double a0,
                     double b1, const FocCertificate& c, const std::vector<double>& xs) {
  const auto box = std::get<decision::BoxChoices>(m.second_feasible(a0));
  for (double x : xs) {
    auto D = [&](double b) { return U(m, a1, b1 + c.M[0] * (b - c.b0[0]), x) - U(m, a0, b, x); };
    const double at = D(c.b0[0]);
    for (double b : grid(box.lo[0], box.hi[0], 2001)) {
      try {
        if (D(b) < at - 1e-10 * (1 + std::abs(at))) return false;
      } catch (const DomainViolation&) {
      }
    }
  }
  (void)spec;
  return true;
}

}  // namespace

TEST_CASE("family names round-trip") {
  for (auto f : {Family::AdditiveSeparable, Family::RiskNeutral, Family::ConsumptionSavings,
                 Family::GlobalWarming, Family::CakeEating}) {
    CHECK(family_from_string(to_string(f)) == f);
  }
  CHECK_THROWS_AS(family_from_string("Ramsey"), ValidationError);
}

TEST_CASE("build_model examples") {
  const prob::StateSpace states({0.0, 0.5, 1.0});
  SUBCASE("additive separable composition") {
    FamilySpec s;
    s.functions["u"] = CatalogFunction::quadratic(0.3);
    s.functions["v"] = with(CatalogFunction::quadratic(0.0), 1.0, 1.0);
    const auto m = build_model(s, states);
    for (double a : {0.0, 0.4, 1.0}) {
      for (double b : {0.0, 0.7}) {
        for (double x : {0.0, 0.5, 1.0}) {
          CHECK(U(m, a, b, x) == doctest::Approx(-(a - 0.3) * (a - 0.3) - (b - x) * (b - x)));
        }
      }
    }
    CHECK(m.unimodal_in_b);
  }
  SUBCASE("consumption-savings couples B to a") {
    FamilySpec s;
    s.family = Family::ConsumptionSavings;
    s.params = {{"w", 1.0}, {"beta", 0.9}, {"r", 2.0}};
    s.functions["u1"] = CatalogFunction::quadratic(1.0);
    s.functions["u2"] = CatalogFunction::quadratic(1.0);
    s.functions["u3"] = CatalogFunction::quadratic(1.0);
    const auto m = build_model(s, states);
    const auto box = std::get<decision::BoxChoices>(m.second_feasible(0.5));
    CHECK(box.lo[0] == 0.0);
    CHECK(box.hi[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(U(m, 0.5, 0.4, 0.5) ==
          doctest::Approx(-0.25 + 0.9 * -(0.6 - 1) * (0.6 - 1) + 0.81 * -(0.2 - 1) * (0.2 - 1)));

    s.functions["u2"] = CatalogFunction::crra(2.0);
    s.functions["u3"] = CatalogFunction::crra(2.0);
    const auto m2 = build_model(s, prob::StateSpace({0.5, 1.5}));
    const auto box2 = std::get<decision::BoxChoices>(m2.second_feasible(0.5));
    CHECK(box2.lo[0] == doctest::Approx(1e-6));
    CHECK(box2.hi[0] == doctest::Approx(1.0 - 1e-6));
  }
  SUBCASE("global warming spot check") {
    FamilySpec s;
    s.family = Family::GlobalWarming;
    s.params = {{"gamma", 2.0}, {"eta", 1.0}};
    s.functions["u"] = CatalogFunction::quadratic(0.5);
    const auto m = build_model(s, prob::StateSpace({0.0, 0.2}));
    CHECK(U(m, 0.0, 0.0, 0.0) == doctest::Approx(-0.25 - 2.0));
    // v(z) = gamma/(1-gamma) (eta + z/gamma)^(1-gamma)
    const double z = 0.6 - 0.2 * (0.3 + 0.6);
    CHECK(U(m, 0.3, 0.6, 0.2) == doctest::Approx(-0.04 - 2.0 / (1.0 + z / 2.0)));
  }
  SUBCASE("cake eating") {
    FamilySpec s;
    s.family = Family::CakeEating;
    s.params = {{"a_lo", 0.1}, {"b_lo", 0.1}};
    s.functions["u"] = CatalogFunction::log();
    s.functions["v"] = CatalogFunction::log();
    s.functions["w"] = CatalogFunction::exp(1.0);
    const auto m = build_model(s, prob::StateSpace({1.0, 3.0}));
    CHECK(U(m, 0.5, 0.25, 3.0) == doctest::Approx(std::log(0.5) + std::log(0.25) - std::exp(-2.25)));
  }
}

TEST_CASE("domain guards name the offending parameter") {
  FamilySpec s;
  s.family = Family::GlobalWarming;
  s.params = {{"gamma", 2.0}, {"eta", 0.1}};
  s.functions["u"] = CatalogFunction::quadratic(0.5);
  try {
    build_model(s, prob::StateSpace({0.0, 0.9}));
    FAIL("expected DomainViolation");
  } catch (const DomainViolation& e) {
    CHECK(std::string(e.what()).find("eta") != std::string::npos);
  }
  s.params["gamma"] = 1.0;
  CHECK_THROWS_AS(build_model(s, prob::StateSpace({0.0})), DomainViolation);

  FamilySpec cs;
  cs.family = Family::ConsumptionSavings;
  cs.params = {{"w", 1.0}, {"beta", 0.9}, {"r", 1.1}};
  cs.functions["u1"] = CatalogFunction::log();
  cs.functions["u2"] = CatalogFunction::crra(2.0);
  cs.functions["u3"] = CatalogFunction::crra(2.0);
  CHECK_THROWS_AS(build_model(cs, prob::StateSpace({0.0, 1.0})), DomainViolation);
  cs.params.erase("r");
  CHECK_THROWS_AS(build_model(cs, prob::StateSpace({0.5, 1.0})), DomainViolation);
  cs.params["r"] = -1.0;
  CHECK_THROWS_AS(build_model(cs, prob::StateSpace({0.5, 1.0})), DomainViolation);

  FamilySpec as;
  as.functions["u"] = CatalogFunction::log();
  as.functions["v"] = CatalogFunction::quadratic(0.0);
  CHECK_THROWS_AS(build_model(as, prob::StateSpace({0.0})), DomainViolation);  // log at a = 0

  FamilySpec missing;
  missing.functions["u"] = CatalogFunction::quadratic(0.0);
  CHECK_THROWS_AS(build_model(missing, prob::StateSpace({0.0})), DomainViolation);
}

TEST_CASE("utility gradients match finite differences") {
  Rng rng(31);
  std::vector<std::pair<FamilySpec, std::vector<double>>> cases;
  cases.emplace_back(instances::additive(rng), grid(0.0, 1.0, 4));
  cases.emplace_back(instances::consumption_savings(rng), grid(0.6, 1.4, 4));
  cases.emplace_back(instances::global_warming(rng), grid(0.5, 1.5, 4));
  cases.emplace_back(instances::cake_eating(rng), grid(2.5, 3.5, 4));
  for (const auto& [spec, xs] : cases) {
    const auto m = build_model(spec, prob::StateSpace(xs));
    for (double a : {0.3, 0.6}) {
      const auto box = std::get<decision::BoxChoices>(m.second_feasible(a));
      for (double t : {0.25, 0.5, 0.75}) {
        const double b = box.lo[0] + t * (box.hi[0] - box.lo[0]);
        for (double x : xs) {
          const double h = 1e-6;
          const double fd = (U(m, a, b + h, x) - U(m, a, b - h, x)) / (2 * h);
          const std::vector<double> bv{b};
          CHECK(utility_gradient(spec, a, bv, x)[0] == doctest::Approx(fd).epsilon(1e-6));
        }
      }
    }
  }
  const auto rn = instances::risk_neutral(rng, 3, 2);
  const auto m = build_model(rn, prob::StateSpace({0.2, 0.7}));
  std::vector<double> b{0.3, -0.4, 1.1};
  const auto g = utility_gradient(rn, 0.4, b, 0.7);
  for (std::size_t c = 0; c < 3; ++c) {
    auto bp = b, bm = b;
    bp[c] += 1e-6;
    bm[c] -= 1e-6;
    CHECK(g[c] == doctest::Approx((m.utility(0.4, bp, 0.7) - m.utility(0.4, bm, 0.7)) / 2e-6).epsilon(1e-6));
  }
}

TEST_CASE("additive separable certificate is the identity") {
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto s = instances::additive(rng);
    const std::vector<double> b1{rng.uniform(-1.0, 2.0)};
    const auto c = foc_certificate(s, 0.9, 0.2, b1, grid(0.0, 1.0, 20));
    CHECK(c.M == std::vector<double>{1.0});
    CHECK(c.b0 == b1);
    CHECK(c.residual == 0.0);
    CHECK(c.passed);
    CHECK(c.local_minimum);
  }
}

TEST_CASE("global warming certificate") {
  FamilySpec s;
  s.family = Family::GlobalWarming;
  s.params = {{"gamma", 2.0}, {"eta", 1.0}, {"a_hi", 2.0}, {"b_hi", 3.0}};
  s.functions["u"] = CatalogFunction::quadratic(1.0);
  const auto xs = grid(0.0, 0.3, 100);
  SUBCASE("a1 = gamma eta admits no affine link") {
    const std::vector<double> b1{1.0};
    CHECK_THROWS_AS(foc_certificate(s, 2.0, 1.0, b1, xs), NoCertificate);
  }
  SUBCASE("scaling solution away from the singular point") {
    const double a1 = 1.0, a0 = 0.5, b1 = 0.5;
    const auto c = foc_certificate(s, a1, a0, std::vector<double>{b1}, xs);
    const double alpha = (a0 - 2.0) / (a1 - 2.0);
    CHECK(c.constants.at("alpha") == doctest::Approx(alpha));
    CHECK(c.M[0] == doctest::Approx(std::pow(alpha, -2.0)));
    CHECK(c.b0[0] == doctest::Approx(alpha * b1 + 2.0 * (alpha - 1.0)));
    CHECK(c.residual <= 1e-10);
    CHECK(c.passed);
    const auto m = build_model(s, prob::StateSpace(xs));
    CHECK(c.local_minimum == brute_minimizer(s, m, a1, a0, b1, c, xs));
  }
  SUBCASE("concave regime") {
    FamilySpec g = s;
    g.params = {{"gamma", 0.5}, {"eta", 1.0}, {"b_hi", 1.0}};
    const auto gxs = grid(0.0, 0.4, 100);
    const auto c = foc_certificate(g, 1.0, 0.8, std::vector<double>{0.9}, gxs);
    CHECK(c.residual <= 1e-10);
    const auto m = build_model(g, prob::StateSpace(gxs));
    CHECK(c.local_minimum == brute_minimizer(g, m, 1.0, 0.8, 0.9, c, gxs));
  }
}

TEST_CASE("gjt identity") {
  const auto xs = grid(0.1, 10.0, 100);
  CHECK(gjt_identity_check(2.0, 1.0, 1.0, xs) == 0.0);
  CHECK(gjt_identity_check(2.0, 1.0, 2.0, xs) <= 1e-12);
  CHECK(gjt_identity_check(2.0, 1.0, 2.0, xs, 0.1) > 1e-3);
  CHECK_THROWS_AS(gjt_identity_check(1.0, 1.0, 2.0, xs), DomainViolation);
  CHECK_THROWS_AS(gjt_identity_check(2.0, 1.0, -2.0, xs), DomainViolation);
  // alpha < 1 pushes eta + z/gamma negative for large negative z
  const std::vector<double> neg{-5.0};
  CHECK_THROWS_AS(gjt_identity_check(2.0, 1.0, 0.5, neg), DomainViolation);
}

TEST_CASE("risk-neutral certificate") {
  Rng rng(17);
  int local_minima = 0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 1 + rng.index(4);
    const std::size_t p = 1 + rng.index(n);
    auto s = instances::risk_neutral(rng, n, p);
    // b0 is unique when p = n and can sit far from b1
    s.params["b_lo"] = -1e3;
    s.params["b_hi"] = 1e3;
    std::vector<double> b1(n);
    for (auto& v : b1) v = rng.uniform(-0.5, 0.5);
    const auto c = foc_certificate(s, 0.8, 0.3, b1, grid(0.1, 1.0, 30));
    REQUIRE(c.residual <= kFocResidualTol);
    REQUIRE(c.passed);
    local_minima += c.local_minimum;
  }
  CHECK(local_minima > 0);

  // n = 1, two random terms: three equations in (M, b0)
  FamilySpec s;
  s.family = Family::RiskNeutral;
  s.params = {{"b_lo", -3.0}, {"b_hi", 3.0}};
  s.functions["u"] = CatalogFunction::quadratic(0.5);
  s.terms = {{{1.0}, {0.5}, 1.0}, {{-0.3}, {0.8}, 0.2}, {{0.6}, {-0.4}, 0.1}};
  try {
    foc_certificate(s, 0.8, 0.3, std::vector<double>{0.2}, grid(0.1, 1.0, 30));
    FAIL("expected NoCertificate");
  } catch (const NoCertificate& e) {
    CHECK(std::string(e.what()).find("rank 2") != std::string::npos);
  }
}

TEST_CASE("consumption-savings certificate") {
  Rng rng(23);
  for (int k = 0; k < 50; ++k) {
    auto s = instances::consumption_savings(rng);
    if (k % 3 == 1) s.functions["u3"] = CatalogFunction::log();
    if (k % 3 == 2) s.functions["u3"] = CatalogFunction::power(rng.uniform(0.2, 0.8));
    const double w = s.params["w"];
    const double r = s.params["r"];
    const double a0 = rng.uniform(0.15 * w, 0.5 * w);
    const double a1 = rng.uniform(a0 + 0.05 * w, 0.85 * w);
    const double b1 = rng.uniform(0.05, 0.95) * r * a1;
    const auto xs = grid(0.5, 1.5, 50);
    const auto c = foc_certificate(s, a1, a0, std::vector<double>{b1}, xs);
    REQUIRE(c.residual <= kFocResidualTol);
    CHECK(c.b0[0] == doctest::Approx(c.constants.at("alpha") * b1));
    CHECK_FALSE(c.neighborhood_checked);
  }
  auto s = instances::consumption_savings(rng);
  s.functions["u3"] = CatalogFunction::exp(1.0);
  CHECK_THROWS_AS(foc_certificate(s, 0.8, 0.4, std::vector<double>{0.2}, grid(0.5, 1.5, 10)),
                  NoCertificate);
}

TEST_CASE("consumption-savings neighbourhood condition at the irreversibility bound") {
  FamilySpec s;
  s.family = Family::ConsumptionSavings;
  s.params = {{"w", 1.0}, {"beta", 0.95}, {"r", 1.2}};
  s.functions["u1"] = CatalogFunction::log();
  s.functions["u2"] = CatalogFunction::quadratic(2.0);
  s.functions["u3"] = CatalogFunction::crra(2.0);
  const double a1 = 0.6, a0 = 0.3;
  const double b1 = 1.2 * a1;  // saving everything: b1 on the bound
  const auto xs = grid(0.5, 1.5, 20);
  try {
    const auto c = foc_certificate(s, a1, a0, std::vector<double>{b1}, xs);
    CHECK(c.neighborhood_checked);
    // Image of b0 + step must stay below r a1.
    const double step = 1e-6 * (1 + c.b0[0]);
    const bool inside = b1 + c.M[0] * step <= 1.2 * a1 + 1e-12 * (2 + 1.2 * a1);
    CHECK(c.neighborhood_ok == inside);
    CHECK(c.passed == (c.residual <= kFocResidualTol && inside));
  } catch (const NoCertificate&) {
    // b0 outside B(a0) is an acceptable outcome for this instance
  }
}

TEST_CASE("cake-eating certificate") {
  Rng rng(29);
  int certified = 0;
  for (int k = 0; k < 30; ++k) {
    const auto s = instances::cake_eating(rng);
    const std::vector<double> b1{rng.uniform(0.2, 0.6)};
    try {
      const auto c = foc_certificate(s, 0.7, 0.4, b1, grid(2.5, 3.5, 40));
      CHECK(c.residual <= kFocResidualTol);
      CHECK(c.constants.at("beta") + 0.7 + b1[0] == doctest::Approx(0.4 + c.b0[0]));
      if (s.functions.at("w").kind == FunctionKind::Quadratic) CHECK(c.M[0] == 1.0);
      ++certified;
    } catch (const NoCertificate&) {
      // no root inside B(a0)
    }
  }
  CHECK(certified >= 15);
  auto s = instances::cake_eating(rng);
  s.functions["w"] = CatalogFunction::log();
  CHECK_THROWS_AS(foc_certificate(s, 0.7, 0.4, std::vector<double>{0.3}, grid(2.5, 3.5, 10)),
                  NoCertificate);
}

TEST_CASE("foc_certificate preconditions") {
  Rng rng(2);
  const auto s = instances::additive(rng);
  const std::vector<double> b1{0.5};
  CHECK_THROWS_AS(foc_certificate(s, 0.2, 0.8, b1, grid(0, 1, 5)), ValidationError);
  CHECK_THROWS_AS(foc_certificate(s, 1.5, 0.2, b1, grid(0, 1, 5)), InfeasibleFirstDecision);
  CHECK_THROWS_AS(foc_certificate(s, 0.9, 0.2, std::vector<double>{5.0}, grid(0, 1, 5)),
                  ValidationError);
}
