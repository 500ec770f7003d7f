#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "precaution/tolerance.hpp"

// Finite probability machinery: simplex points, joint state/signal models,
// Bayes posteriors and deterministic garbling of signals.

namespace precaution::prob {

/// A point of the probability simplex over m states.
class Dist {
 public:
  /// Throws ValidationError on a negative entry or when the weights do not
  /// sum to one within `tol`.
  explicit Dist(std::vector<double> probs, double tol = kDefaultTolerances.normalization);

  static Dist point_mass(std::size_t m, std::size_t i);
  static Dist uniform(std::size_t m);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const noexcept { return probs_; }

  /// Componentwise mixture t * a + (1 - t) * b.
  static Dist mix(const Dist& a, const Dist& b, double t);

 private:
  std::vector<double> probs_;
};

/// Sup-norm distance between two weight vectors of equal length.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// The realizations x_1 < ... < x_m used inside utilities.
class StateSpace {
 public:
  explicit StateSpace(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  bool matches(const StateSpace& other, double tol = kDefaultTolerances.structural) const;

 private:
  std::vector<double> values_;
};

/// Joint distribution of (signal, state): entry (j, i) = P(Y = y_j, X = x_i).
/// Rows whose marginal is zero are kept but skipped in every expectation.
class JointSignalModel {
 public:
  JointSignalModel(std::vector<std::vector<double>> joint, StateSpace states,
                   double tol = kDefaultTolerances.normalization);

  std::size_t signal_count() const noexcept { return joint_.size(); }
  std::size_t state_count() const noexcept { return states_.size(); }
  const StateSpace& states() const noexcept { return states_; }
  const std::vector<std::vector<double>>& joint() const noexcept { return joint_; }
  double joint(std::size_t j, std::size_t i) const { return joint_[j][i]; }

  double marginal(std::size_t j) const { return marginals_[j]; }
  std::span<const double> marginals() const noexcept { return marginals_; }

 private:
  std::vector<std::vector<double>> joint_;
  StateSpace states_;
  std::vector<double> marginals_;
};

/// Maps fine signal index j (0-based) to coarse index map[j] < coarse_count.
class Garbling {
 public:
  Garbling(std::vector<std::size_t> map, std::size_t coarse_count);

  /// Builds from a 1-based index list as written in configuration files.
  static Garbling from_one_based(const std::vector<std::size_t>& map);
  static Garbling identity(std::size_t n);
  static Garbling constant(std::size_t n);

  std::size_t fine_count() const noexcept { return map_.size(); }
  std::size_t coarse_count() const noexcept { return coarse_count_; }
  std::size_t operator()(std::size_t j) const { return map_[j]; }
  const std::vector<std::size_t>& map() const noexcept { return map_; }

 private:
  std::vector<std::size_t> map_;
  std::size_t coarse_count_;
};

/// Bayes posterior of X given Y = y_j. Throws ZeroMarginal when P(Y = y_j) = 0.
Dist posterior(const JointSignalModel& model, std::size_t j);

/// Marginal law of X.
Dist prior_of(const JointSignalModel& model);

/// Merges signal rows along g. The result is weakly less informative.
JointSignalModel garble(const JointSignalModel& model, const Garbling& g);

/// Single-signal model whose unique row is the prior.
JointSignalModel no_info(const JointSignalModel& model);

/// Perfectly informative benchmark: Y = X.
JointSignalModel full_info(const Dist& prior, const StateSpace& states);

/// sum_{j : nu_j > 0} nu_j f(posterior(j)).
double posterior_expectation(const JointSignalModel& model,
                             const std::function<double(const Dist&)>& f);

/// Throws PriorMismatch unless both models share states and prior.
void require_same_prior(const JointSignalModel& a, const JointSignalModel& b,
                        double tol = kDefaultTolerances.normalization);

/// phi(rho) = max_k (intercept_k + <slope_k, rho>): a convex function on the
/// simplex.
struct MaxAffine {
  struct Piece {
    double intercept = 0.0;
    std::vector<double> slope;
  };
  std::vector<Piece> pieces;

  double operator()(std::span<const double> rho) const;

  /// `pieces` affine functionals with all coefficients uniform on [-1, 1].
  static MaxAffine random(std::size_t m, std::size_t pieces, std::uint64_t seed);
};

struct BlackwellReport {
  bool passed = true;
  std::size_t trials = 0;
  /// min over trials of E_nu[phi(post)] - E_nu'[phi(post')].
  double worst_difference = 0.0;
  std::size_t worst_trial = 0;
  /// Present on failure.
  std::optional<MaxAffine> witness;
};

/// Checks E_nu[phi(P^Y)] >= E_nu'[phi(P^Y')] - tol for `trials` random convex
/// phi. Trial k draws its pieces from derive_seed(seed, k).
BlackwellReport blackwell_sample_test(const JointSignalModel& fine,
                                      const JointSignalModel& coarse, std::size_t trials,
                                      std::size_t pieces, std::uint64_t seed,
                                      double tol = kDefaultTolerances.verdict);

}  // namespace precaution::prob
