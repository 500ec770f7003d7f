#include "precaution/support_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "precaution/errors.hpp"
#include "precaution/random.hpp"

namespace precaution::geometry {

namespace {

void require_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) + " vs " +
                            std::to_string(b));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

bool dominates(const Vector& hi, const Vector& lo) {
  for (std::size_t i = 0; i < hi.size(); ++i) {
    if (hi[i] < lo[i]) return false;
  }
  return true;
}

// A hull-sized ceiling for the intermediate antichains of star_difference.
constexpr std::size_t kMaxAntichain = 200000;

}  // namespace

PayoffSet::PayoffSet(std::size_t m, std::vector<Vector> vectors)
    : m_(m), vectors_(std::move(vectors)) {
  check();
}

namespace {
std::size_t leading_dim(const std::vector<Vector>& vectors) {
  return vectors.empty() ? 0 : vectors.front().size();
}
}  // namespace

// m_ is declared first, so it is read before vectors is moved from.
PayoffSet::PayoffSet(std::vector<Vector> vectors)
    : m_(leading_dim(vectors)), vectors_(std::move(vectors)) {
  check();
}

void PayoffSet::check() const {
  if (vectors_.empty()) throw ValidationError("payoff set must be nonempty");
  if (m_ == 0) throw ValidationError("payoff vectors must have at least one state");
  for (std::size_t k = 0; k < vectors_.size(); ++k) {
    if (vectors_[k].size() != m_) {
      throw DimensionMismatch("payoff vector " + std::to_string(k) + " has dimension " +
                              std::to_string(vectors_[k].size()) + ", expected " +
                              std::to_string(m_));
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (!std::isfinite(vectors_[k][i])) {
        throw ValidationError("payoff vector " + std::to_string(k) + ", entry " +
                              std::to_string(i) + " is not finite");
      }
    }
  }
}


PayoffSet PayoffSet::shifted(std::span<const double> c) const {
  require_dim(c.size(), m_, "shift");
  auto out = vectors_;
  for (auto& v : out) {
    for (std::size_t i = 0; i < m_; ++i) v[i] += c[i];
  }
  return PayoffSet(m_, std::move(out));
}

double support_value(const PayoffSet& set, std::span<const double> rho) {
  require_dim(set.dim(), rho.size(), "support_value");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : set.vectors()) best = std::max(best, dot(v, rho));
  return best;
}

double support_value(const PayoffSet& set, const prob::Dist& rho) {
  return support_value(set, rho.values());
}

PayoffSet minkowski_sum(const PayoffSet& a, const PayoffSet& b) {
  require_dim(a.dim(), b.dim(), "minkowski_sum");
  std::vector<Vector> out;
  out.reserve(a.size() * b.size());
  for (const auto& u : a.vectors()) {
    for (const auto& v : b.vectors()) {
      Vector s(a.dim());
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = u[i] + v[i];
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
    }
  }
  return PayoffSet(a.dim(), std::move(out));
}

bool in_downward_closure(const PayoffSet& set, std::span<const double> point, double tol) {
  require_dim(set.dim(), point.size(), "in_downward_closure");
  for (const auto& v : set.vectors()) {
    bool ok = true;
    for (std::size_t i = 0; i < point.size() && ok; ++i) {
      ok = point[i] <= v[i] + tol * (1.0 + std::abs(v[i]));
    }
    if (ok) return true;
  }
  return false;
}

std::vector<Vector> maximal_elements(std::vector<Vector> points) {
  std::sort(points.begin(), points.end(), std::greater<>());
  std::vector<Vector> kept;
  for (auto& p : points) {
    bool dominated = false;
    for (const auto& q : kept) {
      if (dominates(q, p)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(std::move(p));
  }
  return kept;
}

// k + lambda0 lies in closure(outer) for every lambda0 iff there is a selection
// lambda0 -> lambda1 with k <= lambda1 - lambda0 for all lambda0. The feasible
// set is therefore the union over selections of the down-cones at the
// componentwise minima; folding in one inner vector at a time and pruning to
// maximal elements enumerates those minima without visiting every selection.
std::vector<Vector> star_difference(const PayoffSet& outer, const PayoffSet& inner) {
  require_dim(outer.dim(), inner.dim(), "star_difference");
  const std::size_t m = outer.dim();

  std::vector<Vector> frontier;
  {
    const auto& first = inner[0];
    for (const auto& l1 : outer.vectors()) {
      Vector k(m);
      for (std::size_t i = 0; i < m; ++i) k[i] = l1[i] - first[i];
      frontier.push_back(std::move(k));
    }
    frontier = maximal_elements(std::move(frontier));
  }
  for (std::size_t r = 1; r < inner.size(); ++r) {
    const auto& l0 = inner[r];
    std::vector<Vector> next;
    next.reserve(frontier.size() * outer.size());
    for (const auto& s : frontier) {
      for (const auto& l1 : outer.vectors()) {
        Vector k(m);
        for (std::size_t i = 0; i < m; ++i) k[i] = std::min(s[i], l1[i] - l0[i]);
        next.push_back(std::move(k));
      }
    }
    frontier = maximal_elements(std::move(next));
    if (frontier.size() > kMaxAntichain) {
      throw Error("star_difference: antichain exceeds " + std::to_string(kMaxAntichain) +
                  " elements");
    }
  }

  // Membership filter against the definition.
  std::vector<Vector> result;
  Vector probe(m);
  for (auto& k : frontier) {
    bool member = true;
    for (const auto& l0 : inner.vectors()) {
      for (std::size_t i = 0; i < m; ++i) probe[i] = k[i] + l0[i];
      if (!in_downward_closure(outer, probe)) {
        member = false;
        break;
      }
    }
    if (member) result.push_back(std::move(k));
  }
  return result;
}

std::vector<prob::Dist> simplex_landmarks(std::size_t m) {
  std::vector<prob::Dist> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(prob::Dist::point_mass(m, i));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      std::vector<double> p(m, 0.0);
      p[i] = 0.5;
      p[j] = 0.5;
      out.emplace_back(std::move(p));
    }
  }
  return out;
}

CertificateReport decomposition_certificate(const PayoffSet& outer, const PayoffSet& inner,
                                            std::size_t samples, std::uint64_t seed,
                                            double tol) {
  require_dim(outer.dim(), inner.dim(), "decomposition_certificate");
  const std::size_t m = outer.dim();
  CertificateReport report;
  report.star_difference = star_difference(outer, inner);
  if (report.star_difference.empty()) {
    throw EmptyStarDifference("star-difference is empty; certificate does not apply");
  }
  const PayoffSet k_set(m, report.star_difference);

  auto check = [&](std::span<const double> rho) {
    const double gap = std::abs(support_value(outer, rho) - support_value(inner, rho) -
                                support_value(k_set, rho));
    ++report.probes;
    if (gap > report.worst_gap || report.worst_rho.empty()) {
      report.worst_gap = std::max(report.worst_gap, gap);
      report.worst_rho.assign(rho.begin(), rho.end());
    }
  };
  for (const auto& rho : simplex_landmarks(m)) check(rho.values());
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, s));
    const auto rho = rng.simplex_uniform(m);
    check(rho);
  }
  report.passed = report.worst_gap <= tol;
  return report;
}

std::string_view to_string(Curvature c) {
  switch (c) {
    case Curvature::Convex:
      return "Convex";
    case Curvature::Concave:
      return "Concave";
    case Curvature::Affine:
      return "Affine";
    case Curvature::Neither:
      return "Neither";
  }
  return "?";
}

ConvexityVerdict convexity_probe(const SimplexFunction& f, std::size_t m, std::size_t trials,
                                 std::uint64_t seed, double tol) {
  if (m == 0) throw ValidationError("convexity_probe: dimension must be positive");
  ConvexityVerdict verdict;
  verdict.against_convex.defect = -std::numeric_limits<double>::infinity();
  verdict.against_concave.defect = std::numeric_limits<double>::infinity();

  auto record = [&](const prob::Dist& r1, const prob::Dist& r2, double t) {
    const double d =
        f(prob::Dist::mix(r1, r2, t)) - t * f(r1) - (1.0 - t) * f(r2);
    ++verdict.probes;
    auto fill = [&](ProbeWitness& w) {
      w.rho1.assign(r1.values().begin(), r1.values().end());
      w.rho2.assign(r2.values().begin(), r2.values().end());
      w.t = t;
      w.defect = d;
    };
    if (d > verdict.against_convex.defect) fill(verdict.against_convex);
    if (d < verdict.against_concave.defect) fill(verdict.against_concave);
  };

  const auto marks = simplex_landmarks(m);
  for (std::size_t i = 0; i < marks.size(); ++i) {
    for (std::size_t j = i + 1; j < marks.size(); ++j) {
      record(marks[i], marks[j], 0.5);
      record(marks[i], marks[j], 0.25);
    }
  }
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, k));
    prob::Dist r1(rng.simplex_uniform(m));
    prob::Dist r2(rng.simplex_uniform(m));
    record(r1, r2, rng.uniform_open01());
  }
  if (verdict.probes == 0) {
    verdict.against_convex.defect = verdict.against_concave.defect = 0.0;
  }

  const bool convex = verdict.against_convex.defect <= tol;
  const bool concave = verdict.against_concave.defect >= -tol;
  if (convex && concave) {
    verdict.kind = Curvature::Affine;
  } else if (convex) {
    verdict.kind = Curvature::Convex;
  } else if (concave) {
    verdict.kind = Curvature::Concave;
  } else {
    verdict.kind = Curvature::Neither;
  }
  return verdict;
}

}  // namespace precaution::geometry
