#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "precaution/errors.hpp"
#include "precaution/prob.hpp"

using namespace precaution;
using namespace precaution::prob;

namespace {

JointSignalModel make(std::vector<std::vector<double>> joint, std::vector<double> states = {}) {
  if (states.empty()) {
    for (std::size_t i = 0; i < joint.front().size(); ++i) states.push_back(static_cast<double>(i));
  }
  return JointSignalModel(std::move(joint), StateSpace(std::move(states)));
}

void check_dist(const Dist& d, std::vector<double> expected, double tol = 1e-12) {
  REQUIRE(d.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(d[i] - expected[i]) <= tol);
}

void check_joint(const JointSignalModel& m, const std::vector<std::vector<double>>& expected) {
  REQUIRE(m.signal_count() == expected.size());
  for (std::size_t j = 0; j < expected.size(); ++j) {
    for (std::size_t i = 0; i < expected[j].size(); ++i) {
      CHECK(std::abs(m.joint(j, i) - expected[j][i]) <= 1e-12);
    }
  }
}

}  // namespace

TEST_CASE("Dist validation") {
  CHECK_NOTHROW(Dist({0.25, 0.75}));
  CHECK_THROWS_AS(Dist({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(Dist({-0.1, 1.1}), ValidationError);
  CHECK_THROWS_AS(Dist({}), ValidationError);
  CHECK_THROWS_AS(Dist({NAN, 1.0}), ValidationError);
  CHECK_NOTHROW(Dist({0.5, 0.5 + 5e-10}));
}

TEST_CASE("StateSpace must be strictly increasing") {
  CHECK_NOTHROW(StateSpace({0.0, 1.0, 2.5}));
  CHECK_THROWS_AS(StateSpace({0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(StateSpace({1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(StateSpace({}), ValidationError);
}

TEST_CASE("joint model validation names the offending entry") {
  CHECK_THROWS_AS(make({{0.5, 0.2}, {0.1, 0.1}}), ValidationError);
  try {
    make({{0.5, -0.1}, {0.3, 0.3}});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("row 0") != std::string::npos);
    CHECK(std::string(e.what()).find("column 1") != std::string::npos);
  }
  CHECK_THROWS_AS(make({{0.5, 0.5}, {0.0}}), Error);
  CHECK_THROWS_AS(JointSignalModel({{0.5, 0.5}}, StateSpace({0.0, 1.0, 2.0})), Error);
}

TEST_CASE("posterior examples") {
  check_dist(posterior(make({{0.4, 0.1}, {0.1, 0.4}}), 0), {0.8, 0.2});
  check_dist(posterior(make({{0.5, 0.0}, {0.0, 0.5}}), 0), {1.0, 0.0});
  check_dist(posterior(make({{0.25, 0.25}, {0.25, 0.25}}), 1), {0.5, 0.5});
  CHECK_THROWS_AS(posterior(make({{0.5, 0.5}, {0.0, 0.0}}), 1), ZeroMarginal);
}

TEST_CASE("prior_of examples") {
  check_dist(prior_of(make({{0.4, 0.1}, {0.1, 0.4}})), {0.5, 0.5});
  check_dist(prior_of(make({{1.0, 0.0}})), {1.0, 0.0});
  check_dist(prior_of(make({{0.2, 0.3}, {0.1, 0.4}})), {0.3, 0.7});
}

TEST_CASE("garble examples") {
  const auto base = make({{0.2, 0.1}, {0.3, 0.4}});
  check_joint(garble(base, Garbling::identity(2)), base.joint());
  check_joint(garble(base, Garbling::constant(2)), no_info(base).joint());
  const auto z = make({{0.4, 0.1}, {0.1, 0.4}, {0.0, 0.0}});
  check_joint(garble(z, Garbling::from_one_based({1, 2, 2})), {{0.4, 0.1}, {0.1, 0.4}});
  CHECK_THROWS_AS(garble(base, Garbling::identity(3)), DimensionMismatch);
  // unused coarse labels are allowed; they carry zero probability
  const auto gap = garble(base, Garbling::from_one_based({1, 3}));
  CHECK(gap.signal_count() == 3);
  CHECK(gap.marginal(1) == 0.0);
  CHECK_THROWS_AS(Garbling::from_one_based({0, 1}), ValidationError);
}

TEST_CASE("no_info and full_info examples") {
  check_joint(no_info(make({{0.4, 0.1}, {0.1, 0.4}})), {{0.5, 0.5}});
  check_joint(no_info(make({{0.3, 0.7}})), {{0.3, 0.7}});
  check_joint(no_info(make({{0.2, 0.3}, {0.1, 0.4}})), {{0.3, 0.7}});
  const StateSpace s({0.0, 1.0});
  check_joint(full_info(Dist({0.5, 0.5}), s), {{0.5, 0.0}, {0.0, 0.5}});
  check_joint(full_info(Dist({1.0, 0.0}), s), {{1.0, 0.0}, {0.0, 0.0}});
  check_joint(full_info(Dist({0.3, 0.7}), s), {{0.3, 0.0}, {0.0, 0.7}});
  CHECK_THROWS_AS(full_info(Dist({0.5, 0.5}), StateSpace({0.0, 1.0, 2.0})), DimensionMismatch);
}

TEST_CASE("posterior expectation skips zero-probability signals") {
  const auto fi = full_info(Dist({1.0, 0.0}), StateSpace({0.0, 1.0}));
  const double v = posterior_expectation(fi, [](const Dist& d) { return d[0]; });
  CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("randomized properties of garbling") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.index(5);
    const std::size_t n = 1 + rng.index(6);
    const auto joint = oracle::random_joint(rng, n, m);
    const JointSignalModel fine(joint, StateSpace(oracle::sorted_states(rng, m, -1.0, 1.0)));
    const auto map = oracle::random_garbling(rng, n);
    std::size_t k = 0;
    for (auto v : map) k = std::max(k, v + 1);
    const Garbling g(map, k);
    const auto coarse = garble(fine, g);

    // prior invariance
    const auto p0 = prior_of(fine);
    const auto p1 = prior_of(coarse);
    for (std::size_t i = 0; i < m; ++i) REQUIRE(std::abs(p0[i] - p1[i]) <= 1e-12);

    // prior is the nu-weighted average of posteriors
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += fine.marginal(j) * posterior(fine, j)[i];
      REQUIRE(std::abs(s - p0[i]) <= 1e-12);
    }

    // coarse posterior = weighted average of the fine posteriors mapping to it
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> avg(m, 0.0);
      double mass = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (map[j] != c) continue;
        mass += fine.marginal(j);
        const auto p = posterior(fine, j);
        for (std::size_t i = 0; i < m; ++i) avg[i] += fine.marginal(j) * p[i];
      }
      const auto pc = posterior(coarse, c);
      for (std::size_t i = 0; i < m; ++i) REQUIRE(std::abs(avg[i] / mass - pc[i]) <= 1e-12);
    }

    const auto rep = blackwell_sample_test(fine, coarse, 50, 1 + rng.index(6), rng.next_u64());
    REQUIRE(rep.passed);
    CHECK(rep.worst_difference >= -1e-9);
  }
}

TEST_CASE("Blackwell test on identical signals has zero difference") {
  const auto m = make({{0.2, 0.1}, {0.3, 0.4}});
  const auto rep = blackwell_sample_test(m, m, 100, 3, 5);
  CHECK(rep.passed);
  CHECK(std::abs(rep.worst_difference) <= 1e-15);
}

TEST_CASE("Blackwell test detects a more informative coarse signal and keeps a witness") {
  const auto fine = make({{0.3, 0.2}, {0.2, 0.3}});
  const auto coarse = full_info(prior_of(fine), fine.states());
  const auto rep = blackwell_sample_test(fine, coarse, 200, 3, 9);
  CHECK_FALSE(rep.passed);
  REQUIRE(rep.witness.has_value());
  // Re-evaluate the witness independently.
  double ef = 0.0, ec = 0.0;
  for (const auto& [nu, p] : oracle::posteriors(fine.joint())) ef += nu * (*rep.witness)(p);
  for (const auto& [nu, p] : oracle::posteriors(coarse.joint())) ec += nu * (*rep.witness)(p);
  CHECK(ef - ec == doctest::Approx(rep.worst_difference).epsilon(1e-9));
  CHECK(ef - ec < -1e-9);
}

TEST_CASE("Blackwell test requires a shared prior") {
  CHECK_THROWS_AS(blackwell_sample_test(make({{0.5, 0.5}}), make({{0.4, 0.6}}), 10, 2, 1),
                  PriorMismatch);
  CHECK_THROWS_AS(blackwell_sample_test(make({{0.5, 0.5}}, {0.0, 1.0}), make({{0.5, 0.5}}, {0.0, 2.0}),
                                        10, 2, 1),
                  PriorMismatch);
}

TEST_CASE("full versus no information for a max of fixed linear functionals") {
  // phi = max_b <lambda_b, .>: E_full phi - phi(prior) = sum_i p_i max_b lambda_b(i) - max_b <lambda_b, p>
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + rng.index(3);
    const Dist prior(rng.simplex_uniform(m));
    std::vector<oracle::Vec> lambdas(1 + rng.index(4), oracle::Vec(m));
    for (auto& l : lambdas) {
      for (auto& v : l) v = rng.uniform(-1, 1);
    }
    MaxAffine phi;
    for (const auto& l : lambdas) phi.pieces.push_back({0.0, l});
    std::vector<double> pv(prior.values().begin(), prior.values().end());
    double expected = -oracle::support(lambdas, pv);
    for (std::size_t i = 0; i < m; ++i) {
      double best = -1e300;
      for (const auto& l : lambdas) best = std::max(best, l[i]);
      expected += pv[i] * best;
    }
    std::vector<double> states;
    for (std::size_t i = 0; i < m; ++i) states.push_back(static_cast<double>(i));
    const StateSpace s(states);
    const auto fi = full_info(prior, s);
    const auto ni = no_info(fi);
    const double diff = posterior_expectation(fi, [&](const Dist& d) { return phi(d.values()); }) -
                        posterior_expectation(ni, [&](const Dist& d) { return phi(d.values()); });
    CHECK(diff == doctest::Approx(expected).epsilon(1e-12));
    CHECK(diff >= -1e-12);
  }
}
