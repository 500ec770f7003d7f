#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "precaution/prob.hpp"
#include "precaution/tolerance.hpp"

namespace precaution::geometry {

using Vector = std::vector<double>;

/// Finite set of m-dimensional payoff vectors, one per feasible second
/// decision. Its downward closure is never materialized: membership in the
/// closure is a componentwise-domination query against this list.
class PayoffSet {
 public:
  PayoffSet(std::size_t m, std::vector<Vector> vectors);
  explicit PayoffSet(std::vector<Vector> vectors);

  std::size_t dim() const noexcept { return m_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  const std::vector<Vector>& vectors() const noexcept { return vectors_; }
  const Vector& operator[](std::size_t k) const { return vectors_[k]; }

  /// Translation by c.
  PayoffSet shifted(std::span<const double> c) const;

 private:
  void check() const;

  std::size_t m_;
  std::vector<Vector> vectors_;
};

/// sigma_Lambda(rho) = max over the set of <lambda, rho>. For rho >= 0 this is
/// also the support value of the downward closure.
double support_value(const PayoffSet& set, std::span<const double> rho);
double support_value(const PayoffSet& set, const prob::Dist& rho);

/// All pairwise sums, exact duplicates removed (first occurrence kept).
PayoffSet minkowski_sum(const PayoffSet& a, const PayoffSet& b);

/// True iff `point` is componentwise dominated (up to tol) by some vector of
/// `set`, i.e. lies in the downward closure.
bool in_downward_closure(const PayoffSet& set, std::span<const double> point,
                         double tol = kDefaultTolerances.structural);

/// Maximal elements (w.r.t. componentwise order) of a list of vectors, in
/// lexicographically decreasing order, exact duplicates merged.
std::vector<Vector> maximal_elements(std::vector<Vector> points);

/// Maximal elements of { k : k + lambda0 in closure(outer) for all lambda0 in inner }.
/// An empty vector list means the star-difference is empty.
std::vector<Vector> star_difference(const PayoffSet& outer, const PayoffSet& inner);

struct CertificateReport {
  bool passed = false;
  std::vector<Vector> star_difference;
  std::size_t probes = 0;
  /// Largest |sigma_outer - sigma_inner - sigma_K| over the probe set.
  double worst_gap = 0.0;
  Vector worst_rho;
};

/// Tests sigma_{Lambda1} = sigma_{Lambda0} + sigma_{K*} with K* the star-difference,
/// on `samples` uniform simplex draws plus all vertices and edge midpoints.
/// PASS means rho -> sigma_{Lambda1}(rho) - sigma_{Lambda0}(rho) agrees with a
/// support function (hence is convex) on the probe set.
/// Throws EmptyStarDifference when K* has no element.
CertificateReport decomposition_certificate(const PayoffSet& outer, const PayoffSet& inner,
                                            std::size_t samples, std::uint64_t seed,
                                            double tol = kDefaultTolerances.verdict);

enum class Curvature { Convex, Concave, Affine, Neither };

std::string_view to_string(Curvature c);

struct ProbeWitness {
  Vector rho1;
  Vector rho2;
  double t = 0.0;
  /// f(t rho1 + (1-t) rho2) - t f(rho1) - (1-t) f(rho2)
  double defect = 0.0;
};

struct ConvexityVerdict {
  Curvature kind = Curvature::Affine;
  std::size_t probes = 0;
  /// Triple with the largest defect (evidence against convexity).
  ProbeWitness against_convex;
  /// Triple with the smallest defect (evidence against concavity).
  ProbeWitness against_concave;
};

using SimplexFunction = std::function<double(const prob::Dist&)>;

/// Samples `trials` triples (rho1, rho2, t), rho uniform on the simplex and t
/// uniform on (0,1), plus deterministic triples over vertices and edge
/// midpoints. Trial k uses derive_seed(seed, k).
ConvexityVerdict convexity_probe(const SimplexFunction& f, std::size_t m, std::size_t trials,
                                 std::uint64_t seed, double tol = kDefaultTolerances.verdict);

/// Vertices followed by edge midpoints of the (m-1)-simplex.
std::vector<prob::Dist> simplex_landmarks(std::size_t m);

}  // namespace precaution::geometry
