#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "precaution/prob.hpp"
#include "precaution/support_geometry.hpp"

// The two-stage decision layer: Epstein functional, signal values, the
// second-period value of information and first-stage optimization.

namespace precaution::decision {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double a, double tol = 1e-12) const {
    const double slack = tol * (1.0 + std::max(std::abs(lo), std::abs(hi)));
    return a >= lo - slack && a <= hi + slack;
  }
  double width() const { return hi - lo; }
};

/// Explicit finite list of second decisions.
struct FiniteChoices {
  std::vector<std::vector<double>> points;
};

/// Product of closed intervals, one per coordinate of the second decision.
struct BoxChoices {
  std::vector<double> lo;
  std::vector<double> hi;
};

using FeasibleSet = std::variant<FiniteChoices, BoxChoices>;

using Utility = std::function<double(double a, std::span<const double> b, double x)>;

struct DecisionModel {
  Utility utility;
  Interval first_interval;
  std::function<FeasibleSet(double)> second_feasible;
  std::size_t b_dim = 1;
  prob::StateSpace states{std::vector<double>{0.0}};
  /// Declares b -> E_rho U(a, b, X) unimodal along each coordinate of a box
  /// B(a), which licenses golden-section refinement after the grid scan.
  bool unimodal_in_b = false;
};

struct SolverConfig {
  std::size_t a_grid = 101;
  std::size_t b_grid = 101;
  std::size_t refine_iters = 2;
  double value_tol = 1e-9;
  double arg_tol = 1e-6;
  /// Total-variation threshold under which a Delta-V profile counts as constant.
  double scan_tol = 1e-8;

  /// Throws ValidationError unless grids >= 2 and tolerances > 0.
  void validate() const;
};

/// a-grid used for optimization and monotonicity scans: a_grid equispaced
/// points covering the closed interval.
std::vector<double> first_stage_grid(const Interval& interval, std::size_t points);

struct InnerSolution {
  double value = 0.0;
  std::vector<double> b;
  /// False when only the grid bound is available (box without unimodality).
  bool refined = false;
};

/// max over B(a) of sum_i rho_i U(a, b, x_i); zero-weight states are skipped.
InnerSolution maximize_second(const DecisionModel& model, double a, const prob::Dist& rho,
                              const SolverConfig& cfg);

/// Lambda(a): one payoff vector per listed b, or per grid point of a box.
geometry::PayoffSet payoff_set(const DecisionModel& model, double a, const SolverConfig& cfg);

/// J(a, rho).
double epstein_J(const DecisionModel& model, double a, const prob::Dist& rho,
                 const SolverConfig& cfg);

/// V^Y(a) = E_nu[J(a, posterior)].
double signal_value(const DecisionModel& model, double a, const prob::JointSignalModel& sig,
                    const SolverConfig& cfg);

/// Delta V(a) = V^Y(a) - V^Y'(a). Throws PriorMismatch if the signals disagree
/// on the prior.
double delta_value(const DecisionModel& model, double a, const prob::JointSignalModel& fine,
                   const prob::JointSignalModel& coarse, const SolverConfig& cfg);

struct OptResult {
  /// Every probed a within value_tol of the best value, ascending.
  std::vector<double> maximizers;
  double value = 0.0;
  /// The inner problems were solved on the b-grid only.
  bool grid_only = false;

  double sup() const { return maximizers.back(); }
  double inf() const { return maximizers.front(); }
};

struct ValueProfile {
  std::vector<double> a;
  std::vector<double> values;
};

/// V^Y on the a-grid.
ValueProfile value_profile(const DecisionModel& model, const prob::JointSignalModel& sig,
                           const SolverConfig& cfg);

/// Grid scan plus golden-section refinement around a strict incumbent.
OptResult optimize_first(const DecisionModel& model, const prob::JointSignalModel& sig,
                         const SolverConfig& cfg);

/// Same as optimize_first but reuses a precomputed profile.
OptResult optimize_from_profile(const DecisionModel& model, const prob::JointSignalModel& sig,
                                const ValueProfile& profile, const SolverConfig& cfg);

enum class Monotonicity { NonIncreasing, NonDecreasing, Constant, NonMonotone };

std::string_view to_string(Monotonicity m);

struct MonotonicityVerdict {
  Monotonicity kind = Monotonicity::Constant;
  /// Every consecutive step moves by more than tol in the verdict's direction.
  bool strict = false;
  double total_variation = 0.0;
  /// Index pair (k, k+1) of a step increasing by more than tol.
  std::optional<std::pair<std::size_t, std::size_t>> increase;
  /// Index pair (k, k+1) of a step decreasing by more than tol.
  std::optional<std::pair<std::size_t, std::size_t>> decrease;
};

/// Requires at least two values.
MonotonicityVerdict monotonicity_scan(std::span<const double> values, double tol);

struct PrecautionReport {
  OptResult a_star_fine;
  OptResult a_star_coarse;
  std::vector<double> a_grid;
  std::vector<double> value_fine;
  std::vector<double> value_coarse;
  std::vector<double> delta;
  MonotonicityVerdict delta_scan;
  /// sup argmax V^Y <= sup argmax V^Y' + arg_tol.
  bool ranking_holds = false;
  /// sup argmax V^Y <= inf argmax V^Y' + arg_tol.
  bool strict_ranking_holds = false;
  /// Delta V was found non-increasing (or constant) on the grid, so the
  /// ranking is predicted.
  bool ranking_predicted = false;
  /// !ranking_predicted || ranking_holds.
  bool consistent = true;
};

PrecautionReport precautionary_compare(const DecisionModel& model,
                                       const prob::JointSignalModel& fine,
                                       const prob::JointSignalModel& coarse,
                                       const SolverConfig& cfg);

}  // namespace precaution::decision
