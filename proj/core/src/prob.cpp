#include "precaution/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "precaution/errors.hpp"
#include "precaution/random.hpp"

namespace precaution::prob {

namespace {

std::string where(std::size_t j, std::size_t i) {
  return "row " + std::to_string(j) + ", column " + std::to_string(i);
}

}  // namespace

Dist::Dist(std::vector<double> probs, double tol) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("distribution over zero states");
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!std::isfinite(p) || p < 0.0) {
      throw ValidationError("probability at index " + std::to_string(i) +
                            " is negative or not finite");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > tol) {
    throw ValidationError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

Dist Dist::point_mass(std::size_t m, std::size_t i) {
  std::vector<double> p(m, 0.0);
  p.at(i) = 1.0;
  return Dist(std::move(p));
}

Dist Dist::uniform(std::size_t m) {
  return Dist(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Dist Dist::mix(const Dist& a, const Dist& b, double t) {
  if (a.size() != b.size()) throw DimensionMismatch("mixing distributions of different size");
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = t * a[i] + (1.0 - t) * b[i];
  return Dist(std::move(p));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

StateSpace::StateSpace(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("state space must have at least one state");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("state " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw ValidationError("states must be strictly increasing (index " + std::to_string(i) +
                            ")");
    }
  }
}

bool StateSpace::matches(const StateSpace& other, double tol) const {
  return max_abs_diff(values_, other.values_) <= tol;
}

JointSignalModel::JointSignalModel(std::vector<std::vector<double>> joint, StateSpace states,
                                   double tol)
    : joint_(std::move(joint)), states_(std::move(states)) {
  if (joint_.empty()) throw ValidationError("joint model has no signal rows");
  const std::size_t m = states_.size();
  double total = 0.0;
  marginals_.assign(joint_.size(), 0.0);
  for (std::size_t j = 0; j < joint_.size(); ++j) {
    if (joint_[j].size() != m) {
      throw ValidationError("row " + std::to_string(j) + " has " +
                            std::to_string(joint_[j].size()) + " entries, expected " +
                            std::to_string(m));
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double p = joint_[j][i];
      if (!std::isfinite(p) || p < 0.0) {
        throw ValidationError("joint entry at " + where(j, i) + " is negative or not finite");
      }
      marginals_[j] += p;
    }
    total += marginals_[j];
  }
  if (std::abs(total - 1.0) > tol) {
    throw ValidationError("joint probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

Garbling::Garbling(std::vector<std::size_t> map, std::size_t coarse_count)
    : map_(std::move(map)), coarse_count_(coarse_count) {
  if (map_.empty()) throw ValidationError("garbling over zero signals");
  for (std::size_t j = 0; j < map_.size(); ++j) {
    if (map_[j] >= coarse_count_) {
      throw ValidationError("garbling sends signal " + std::to_string(j) +
                            " outside the coarse range");
    }
  }
}

Garbling Garbling::from_one_based(const std::vector<std::size_t>& map) {
  std::vector<std::size_t> zero(map.size());
  std::size_t coarse = 0;
  for (std::size_t j = 0; j < map.size(); ++j) {
    if (map[j] == 0) {
      throw ValidationError("garbling index at position " + std::to_string(j) +
                            " must be 1-based");
    }
    zero[j] = map[j] - 1;
    coarse = std::max(coarse, map[j]);
  }
  return Garbling(std::move(zero), coarse);
}

Garbling Garbling::identity(std::size_t n) {
  std::vector<std::size_t> map(n);
  for (std::size_t j = 0; j < n; ++j) map[j] = j;
  return Garbling(std::move(map), n);
}

Garbling Garbling::constant(std::size_t n) { return Garbling(std::vector<std::size_t>(n, 0), 1); }

Dist posterior(const JointSignalModel& model, std::size_t j) {
  if (j >= model.signal_count()) {
    throw ValidationError("signal index " + std::to_string(j) + " out of range");
  }
  const double nu = model.marginal(j);
  if (nu <= 0.0) throw ZeroMarginal("signal " + std::to_string(j) + " has zero probability");
  std::vector<double> p(model.state_count());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = model.joint(j, i) / nu;
  return Dist(std::move(p));
}

Dist prior_of(const JointSignalModel& model) {
  std::vector<double> p(model.state_count(), 0.0);
  for (const auto& row : model.joint()) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += row[i];
  }
  return Dist(std::move(p));
}

JointSignalModel garble(const JointSignalModel& model, const Garbling& g) {
  if (g.fine_count() != model.signal_count()) {
    throw DimensionMismatch("garbling covers " + std::to_string(g.fine_count()) +
                            " signals, model has " + std::to_string(model.signal_count()));
  }
  std::vector<std::vector<double>> rows(g.coarse_count(),
                                        std::vector<double>(model.state_count(), 0.0));
  for (std::size_t j = 0; j < model.signal_count(); ++j) {
    auto& target = rows[g(j)];
    for (std::size_t i = 0; i < model.state_count(); ++i) target[i] += model.joint(j, i);
  }
  return JointSignalModel(std::move(rows), model.states());
}

JointSignalModel no_info(const JointSignalModel& model) {
  auto prior = prior_of(model);
  return JointSignalModel({std::vector<double>(prior.values().begin(), prior.values().end())},
                          model.states());
}

JointSignalModel full_info(const Dist& prior, const StateSpace& states) {
  if (prior.size() != states.size()) {
    throw DimensionMismatch("prior has " + std::to_string(prior.size()) + " entries for " +
                            std::to_string(states.size()) + " states");
  }
  const std::size_t m = prior.size();
  std::vector<std::vector<double>> rows(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) rows[i][i] = prior[i];
  return JointSignalModel(std::move(rows), states);
}

double posterior_expectation(const JointSignalModel& model,
                             const std::function<double(const Dist&)>& f) {
  double acc = 0.0;
  for (std::size_t j = 0; j < model.signal_count(); ++j) {
    const double nu = model.marginal(j);
    if (nu <= 0.0) continue;
    acc += nu * f(posterior(model, j));
  }
  return acc;
}

void require_same_prior(const JointSignalModel& a, const JointSignalModel& b, double tol) {
  if (!a.states().matches(b.states())) {
    throw PriorMismatch("signal models are defined over different state spaces");
  }
  const auto pa = prior_of(a);
  const auto pb = prior_of(b);
  const double gap = max_abs_diff(pa.values(), pb.values());
  if (gap > tol) {
    throw PriorMismatch("signal models disagree on the prior (gap " + std::to_string(gap) + ")");
  }
}

double MaxAffine::operator()(std::span<const double> rho) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces) {
    double v = piece.intercept;
    for (std::size_t i = 0; i < rho.size(); ++i) v += piece.slope[i] * rho[i];
    best = std::max(best, v);
  }
  return best;
}

MaxAffine MaxAffine::random(std::size_t m, std::size_t pieces, std::uint64_t seed) {
  Rng rng(seed);
  MaxAffine phi;
  phi.pieces.resize(std::max<std::size_t>(pieces, 1));
  for (auto& piece : phi.pieces) {
    piece.intercept = rng.uniform(-1.0, 1.0);
    piece.slope.resize(m);
    for (auto& s : piece.slope) s = rng.uniform(-1.0, 1.0);
  }
  return phi;
}

BlackwellReport blackwell_sample_test(const JointSignalModel& fine,
                                      const JointSignalModel& coarse, std::size_t trials,
                                      std::size_t pieces, std::uint64_t seed, double tol) {
  require_same_prior(fine, coarse);
  BlackwellReport report;
  report.trials = trials;
  report.worst_difference = std::numeric_limits<double>::infinity();
  const std::size_t m = fine.state_count();
  for (std::size_t k = 0; k < trials; ++k) {
    auto phi = MaxAffine::random(m, pieces, derive_seed(seed, k));
    auto eval = [&phi](const Dist& rho) { return phi(rho.values()); };
    const double diff = posterior_expectation(fine, eval) - posterior_expectation(coarse, eval);
    if (diff < report.worst_difference) {
      report.worst_difference = diff;
      report.worst_trial = k;
      if (diff < -tol) report.witness = phi;
    }
  }
  if (trials == 0) report.worst_difference = 0.0;
  report.passed = report.worst_difference >= -tol;
  if (report.passed) report.witness.reset();
  return report;
}

}  // namespace precaution::prob
