#include "precaution/decision.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "precaution/errors.hpp"

namespace precaution::decision {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // (sqrt(5) - 1) / 2

struct GoldenResult {
  double x;
  double fx;
};

// Maximizes a unimodal f on [lo, hi].
template <typename F>
GoldenResult golden_maximize(F&& f, double lo, double hi, std::size_t max_iters) {
  if (!(hi > lo)) return {lo, f(lo)};
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (std::size_t it = 0; it < max_iters; ++it) {
    if (hi - lo <= 1e-13 * (1.0 + std::abs(lo) + std::abs(hi))) break;
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

std::vector<double> axis_grid(double lo, double hi, std::size_t points) {
  if (hi == lo || points < 2) return {lo};
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = (k + 1 == points) ? hi
                             : lo + (hi - lo) * static_cast<double>(k) /
                                        static_cast<double>(points - 1);
  }
  return g;
}

void require_feasible(const DecisionModel& model, double a) {
  if (!std::isfinite(a) || !model.first_interval.contains(a)) {
    throw InfeasibleFirstDecision("first decision " + std::to_string(a) + " outside [" +
                                  std::to_string(model.first_interval.lo) + ", " +
                                  std::to_string(model.first_interval.hi) + "]");
  }
}

void require_states(const DecisionModel& model, const prob::JointSignalModel& sig) {
  if (!model.states.matches(sig.states())) {
    throw StateMismatch("signal model states differ from the decision model states");
  }
}

double expected_utility(const DecisionModel& model, double a, std::span<const double> b,
                        const prob::Dist& rho) {
  const auto x = model.states.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (rho[i] > 0.0) acc += rho[i] * model.utility(a, b, x[i]);
  }
  return acc;
}

// Calls visit(b) for every point of the product grid over the box.
template <typename Visit>
void for_each_grid_point(const BoxChoices& box, std::size_t points, Visit&& visit) {
  const std::size_t n = box.lo.size();
  std::vector<std::vector<double>> axes(n);
  for (std::size_t c = 0; c < n; ++c) axes[c] = axis_grid(box.lo[c], box.hi[c], points);
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> b(n);
  while (true) {
    for (std::size_t c = 0; c < n; ++c) b[c] = axes[c][idx[c]];
    visit(std::span<const double>(b));
    std::size_t c = 0;
    while (c < n && ++idx[c] == axes[c].size()) idx[c++] = 0;
    if (c == n) break;
  }
}

const BoxChoices& checked_box(const BoxChoices& box, std::size_t b_dim) {
  if (box.lo.size() != b_dim || box.hi.size() != b_dim) {
    throw DimensionMismatch("feasible box has wrong dimension");
  }
  for (std::size_t c = 0; c < b_dim; ++c) {
    if (!(box.lo[c] <= box.hi[c])) {
      throw ValidationError("feasible box is empty along coordinate " + std::to_string(c));
    }
  }
  return box;
}

}  // namespace

void SolverConfig::validate() const {
  if (a_grid < 2) throw ValidationError("solver.a_grid must be at least 2");
  if (b_grid < 2) throw ValidationError("solver.b_grid must be at least 2");
  if (!(value_tol > 0.0)) throw ValidationError("solver.value_tol must be positive");
  if (!(arg_tol > 0.0)) throw ValidationError("solver.arg_tol must be positive");
  if (!(scan_tol > 0.0)) throw ValidationError("solver.scan_tol must be positive");
}

std::vector<double> first_stage_grid(const Interval& interval, std::size_t points) {
  return axis_grid(interval.lo, interval.hi, std::max<std::size_t>(points, 2));
}

InnerSolution maximize_second(const DecisionModel& model, double a, const prob::Dist& rho,
                              const SolverConfig& cfg) {
  require_feasible(model, a);
  if (rho.size() != model.states.size()) {
    throw DimensionMismatch("belief has " + std::to_string(rho.size()) + " states, model has " +
                            std::to_string(model.states.size()));
  }
  const auto feasible = model.second_feasible(a);
  InnerSolution best;
  best.value = -std::numeric_limits<double>::infinity();

  if (const auto* finite = std::get_if<FiniteChoices>(&feasible)) {
    if (finite->points.empty()) throw ValidationError("second-stage choice list is empty");
    for (const auto& b : finite->points) {
      const double v = expected_utility(model, a, b, rho);
      if (v > best.value) {
        best.value = v;
        best.b = b;
      }
    }
    best.refined = true;
    return best;
  }

  const auto& box = checked_box(std::get<BoxChoices>(feasible), model.b_dim);
  for_each_grid_point(box, cfg.b_grid, [&](std::span<const double> b) {
    const double v = expected_utility(model, a, b, rho);
    if (v > best.value) {
      best.value = v;
      best.b.assign(b.begin(), b.end());
    }
  });
  if (!model.unimodal_in_b || cfg.refine_iters == 0) return best;

  std::vector<double> b = best.b;
  for (std::size_t round = 0; round < cfg.refine_iters; ++round) {
    for (std::size_t c = 0; c < model.b_dim; ++c) {
      const double step = (box.hi[c] - box.lo[c]) / static_cast<double>(cfg.b_grid - 1);
      if (!(step > 0.0)) continue;
      const double lo = std::max(box.lo[c], b[c] - step);
      const double hi = std::min(box.hi[c], b[c] + step);
      std::vector<double> trial = b;
      auto along = [&](double t) {
        trial[c] = t;
        return expected_utility(model, a, trial, rho);
      };
      const auto g = golden_maximize(along, lo, hi, 200);
      if (g.fx > best.value) {
        best.value = g.fx;
        b[c] = g.x;
        best.b = b;
      }
    }
  }
  best.refined = true;
  return best;
}

geometry::PayoffSet payoff_set(const DecisionModel& model, double a, const SolverConfig& cfg) {
  require_feasible(model, a);
  const auto x = model.states.values();
  std::vector<geometry::Vector> vectors;
  auto add = [&](std::span<const double> b) {
    geometry::Vector v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = model.utility(a, b, x[i]);
    vectors.push_back(std::move(v));
  };
  const auto feasible = model.second_feasible(a);
  if (const auto* finite = std::get_if<FiniteChoices>(&feasible)) {
    for (const auto& b : finite->points) add(b);
  } else {
    for_each_grid_point(checked_box(std::get<BoxChoices>(feasible), model.b_dim), cfg.b_grid,
                        add);
  }
  return geometry::PayoffSet(x.size(), std::move(vectors));
}

double epstein_J(const DecisionModel& model, double a, const prob::Dist& rho,
                 const SolverConfig& cfg) {
  return maximize_second(model, a, rho, cfg).value;
}

double signal_value(const DecisionModel& model, double a, const prob::JointSignalModel& sig,
                    const SolverConfig& cfg) {
  require_feasible(model, a);
  require_states(model, sig);
  return prob::posterior_expectation(
      sig, [&](const prob::Dist& post) { return epstein_J(model, a, post, cfg); });
}

double delta_value(const DecisionModel& model, double a, const prob::JointSignalModel& fine,
                   const prob::JointSignalModel& coarse, const SolverConfig& cfg) {
  prob::require_same_prior(fine, coarse);
  return signal_value(model, a, fine, cfg) - signal_value(model, a, coarse, cfg);
}

ValueProfile value_profile(const DecisionModel& model, const prob::JointSignalModel& sig,
                           const SolverConfig& cfg) {
  cfg.validate();
  require_states(model, sig);
  ValueProfile profile;
  profile.a = first_stage_grid(model.first_interval, cfg.a_grid);
  profile.values.reserve(profile.a.size());
  for (double a : profile.a) profile.values.push_back(signal_value(model, a, sig, cfg));
  return profile;
}

OptResult optimize_from_profile(const DecisionModel& model, const prob::JointSignalModel& sig,
                                const ValueProfile& profile, const SolverConfig& cfg) {
  const auto& a = profile.a;
  const auto& v = profile.values;
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) best = k;
  }
  std::vector<std::pair<double, double>> candidates;
  candidates.reserve(a.size() + 1);
  std::size_t ties = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    candidates.emplace_back(a[k], v[k]);
    if (v[k] >= v[best] - cfg.value_tol) ++ties;
  }

  double best_value = v[best];
  if (ties == 1 && cfg.refine_iters > 0 && a.size() > 1) {
    const double lo = a[best == 0 ? 0 : best - 1];
    const double hi = a[best + 1 == a.size() ? best : best + 1];
    auto objective = [&](double t) { return signal_value(model, t, sig, cfg); };
    const auto g = golden_maximize(objective, lo, hi, 40 * cfg.refine_iters);
    if (g.fx > best_value) {
      best_value = g.fx;
      candidates.emplace_back(g.x, g.fx);
    }
  }

  OptResult result;
  result.value = best_value;
  for (const auto& [x, fx] : candidates) {
    if (fx >= best_value - cfg.value_tol) result.maximizers.push_back(x);
  }
  std::sort(result.maximizers.begin(), result.maximizers.end());
  result.maximizers.erase(std::unique(result.maximizers.begin(), result.maximizers.end()),
                          result.maximizers.end());

  const auto feasible = model.second_feasible(model.first_interval.lo);
  result.grid_only = std::holds_alternative<BoxChoices>(feasible) &&
                     (!model.unimodal_in_b || cfg.refine_iters == 0);
  return result;
}

OptResult optimize_first(const DecisionModel& model, const prob::JointSignalModel& sig,
                         const SolverConfig& cfg) {
  return optimize_from_profile(model, sig, value_profile(model, sig, cfg), cfg);
}

std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::NonIncreasing:
      return "NonIncreasing";
    case Monotonicity::NonDecreasing:
      return "NonDecreasing";
    case Monotonicity::Constant:
      return "Constant";
    case Monotonicity::NonMonotone:
      return "NonMonotone";
  }
  return "?";
}

MonotonicityVerdict monotonicity_scan(std::span<const double> values, double tol) {
  if (values.size() < 2) throw ValidationError("monotonicity_scan needs at least two values");
  MonotonicityVerdict verdict;
  bool all_down = true;
  bool all_up = true;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double step = values[k + 1] - values[k];
    verdict.total_variation += std::abs(step);
    if (step > tol && !verdict.increase) verdict.increase = std::make_pair(k, k + 1);
    if (step < -tol && !verdict.decrease) verdict.decrease = std::make_pair(k, k + 1);
    all_down = all_down && step < -tol;
    all_up = all_up && step > tol;
  }
  if (verdict.total_variation <= tol) {
    verdict.kind = Monotonicity::Constant;
    verdict.increase.reset();
    verdict.decrease.reset();
  } else if (!verdict.increase) {
    verdict.kind = Monotonicity::NonIncreasing;
    verdict.strict = all_down;
  } else if (!verdict.decrease) {
    verdict.kind = Monotonicity::NonDecreasing;
    verdict.strict = all_up;
  } else {
    verdict.kind = Monotonicity::NonMonotone;
  }
  return verdict;
}

PrecautionReport precautionary_compare(const DecisionModel& model,
                                       const prob::JointSignalModel& fine,
                                       const prob::JointSignalModel& coarse,
                                       const SolverConfig& cfg) {
  prob::require_same_prior(fine, coarse);
  PrecautionReport report;
  const auto pf = value_profile(model, fine, cfg);
  const auto pc = value_profile(model, coarse, cfg);
  report.a_grid = pf.a;
  report.value_fine = pf.values;
  report.value_coarse = pc.values;
  report.delta.resize(pf.a.size());
  for (std::size_t k = 0; k < pf.a.size(); ++k) report.delta[k] = pf.values[k] - pc.values[k];
  report.delta_scan = monotonicity_scan(report.delta, cfg.scan_tol);
  report.a_star_fine = optimize_from_profile(model, fine, pf, cfg);
  report.a_star_coarse = optimize_from_profile(model, coarse, pc, cfg);
  report.ranking_holds = report.a_star_fine.sup() <= report.a_star_coarse.sup() + cfg.arg_tol;
  report.strict_ranking_holds =
      report.a_star_fine.sup() <= report.a_star_coarse.inf() + cfg.arg_tol;
  report.ranking_predicted = report.delta_scan.kind == Monotonicity::NonIncreasing ||
                             report.delta_scan.kind == Monotonicity::Constant;
  report.consistent = !report.ranking_predicted || report.ranking_holds;
  return report;
}

}  // namespace precaution::decision
