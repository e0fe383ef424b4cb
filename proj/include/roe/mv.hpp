#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roe/controlled_k.hpp"
#include "roe/geometry.hpp"
#include "roe/operator.hpp"

namespace roe {

inline constexpr double kCoercity = 4.0;
inline constexpr double kNeighborhoodRadius = 0.1;
inline constexpr double kMaxMvDegree = 1.0 / 50.0;

// Disjoint point regions (first, overlap, second).
struct TripleMasks {
  SubsetMask first;
  SubsetMask overlap;
  SubsetMask second;
};

// (a \ b, a & b, b \ a).
TripleMasks triple_masks(const SubsetMask& a, const SubsetMask& b);

struct SplitResult {
  FiniteOperator x1;
  FiniteOperator x2;
  double norm = 0.0;
  double norm1 = 0.0;
  double norm2 = 0.0;
  // max(norm1, norm2) / norm; 0 for x = 0.
  double coercity() const;
};

// x1 = blocks (1,1) (1,2) (2,1) (2,2), x2 = blocks (2,3) (3,2) (3,3). The masks
// must partition the points (Error(shape_mismatch)). A (1,3) or (3,1) block
// above tau raises Error(propagation_violation).
SplitResult coercive_split(const FiniteOperator& x, const TripleMasks& pi, double tau = kDefaultTau);

struct CiaResult {
  FiniteOperator z;
  double gap = 0.0;      // |x - y|
  double x_dist = 0.0;   // |x - z|
  double y_dist = 0.0;   // |y - z|
  // max(x_dist, y_dist) / gap; 0 for gap = 0.
  double coercity() const;
};

// z = (x22 + y22) / 2 over the overlap region. x must live on
// first + overlap, y on overlap + second (Error(support_violation)), and
// |x - y| <= eps (Error(domain)).
CiaResult cia_midpoint(const FiniteOperator& x, const FiniteOperator& y, const TripleMasks& sigma, double eps,
                       double tau = kDefaultTau);

struct ContainmentViolation {
  std::size_t trial = 0;
  std::string product;  // "a*d", "d*a" or "a*d*a'"
  std::size_t row = 0;
  std::size_t col = 0;
};

struct ContainmentReport {
  bool ok = true;
  std::size_t trials = 0;
  std::vector<ContainmentViolation> violations;  // first per product and trial
  ExtReal worst_distance;                        // max distance of a product support point to A
};

// Random a, a' of propagation < 5r and d on delta x delta with propagation
// < r; checks that a d, d a and a d a' stay on A x A.
ContainmentReport neighborhood_containment(const SpacePtr& space, const SubsetMask& delta, const SubsetMask& a,
                                           double r, std::size_t trials, std::uint64_t seed,
                                           double tau = kDefaultTau);

struct MvPair {
  SubsetMask delta1;
  SubsetMask delta2;
  SubsetMask a1;
  SubsetMask a2;
  double r = 0.0;
  double coercity = kCoercity;
};

// Delta_i = X_i from decompose, A_i their 1/10 neighborhoods. Error(domain)
// unless 0 < r <= 1/50.
MvPair mv_pair(const SampledSpace& s, const SimplicialComplex& x, double r);

struct MvScaleRow {
  double s = 0.0;
  double split_coercity = 0.0;
  double cia_coercity = 0.0;
  double worst_reconstruction = 0.0;
};

struct MvReport {
  bool ok = false;
  std::size_t trials = 0;
  double split_coercity = 0.0;
  double cia_coercity = 0.0;
  double adversarial_coercity = 0.0;
  double worst_reconstruction = 0.0;
  bool containment_ok = false;
  std::vector<MvScaleRow> rows;  // s = r/4, r/2, 3r/4, r
  std::string reason;
};

// Randomized check of the pair: splits and CIA midpoints at every grid scale
// on amplifications 1 and 2, a hill-climbing adversary near the overlap,
// and neighborhood containment of Delta_i in A_i.
MvReport verify_weak_mv_pair(const SpacePtr& space, const MvPair& p, std::size_t trials, std::uint64_t seed,
                             double tau = kDefaultTau);

class CutFunction {
 public:
  // Throws Error(domain) for values outside [0, 1].
  explicit CutFunction(std::vector<double> values);
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_.at(i); }
  std::size_t size() const { return values_.size(); }

  // 1 on X_1 deep (center distance <= 0.45), 0 beyond 0.55, smooth in
  // between.
  static CutFunction from_decomposition(const SampledSpace& s, const SimplicialComplex& x);

  // Smoothed indicator of the upper half of a cyclic order: at position j of
  // n, smoothstep((sin(2 pi j / n) + w) / (2 w)).
  static CutFunction upper_arc(const std::vector<std::size_t>& order, double width = 0.25);

 private:
  std::vector<double> values_;
};

// Max |phi(x) - phi(y)| over pairs at distance < r.
double cut_variation(const SampledSpace& s, const CutFunction& phi, double r);

struct ClutchingResult {
  FiniteOperator p;
  double defect = 0.0;        // |p^2 - p|
  double bound = 0.0;         // (1 + a) a with a = |u*u - 1|
  double left_defect = 0.0;   // |u*u - 1|
  double right_defect = 0.0;  // |uu* - 1|
  double commutator = 0.0;    // |[u, phi]|
  ExtReal propagation{};
  ExtReal propagation_bound{};  // 2 prop(u)
};

// W diag(1, 0) W* with W = R diag(u, 1) R*, R the pointwise rotation by
// pi phi / 2. Amplification doubles.
ClutchingResult clutching_projection(const FiniteOperator& u, const CutFunction& phi, double tau = kDefaultTau);

// Components of the points where phi is not locally constant within
// `radius`, grown to a partition of the space by nearest component. Regions
// are ordered by their smallest cut sample.
std::vector<SubsetMask> cut_regions(const SampledSpace& s, const CutFunction& phi, double radius);

struct LocalIndex {
  long index = 0;
  double trace = 0.0;
};

// round(trace over region of chi(p(u, phi)) - chi(p(1, phi))). Error(domain)
// when either projection has defect >= 1/4; Error(detector_inconclusive) when
// the trace is more than 0.1 from an integer.
LocalIndex local_index(const FiniteOperator& u, const CutFunction& phi, const SubsetMask& region);

// Unitary e_{order[j]} -> e_{order[j + power]} (cyclic) on equal fibers.
FiniteOperator cyclic_shift(const SpacePtr& space, const std::vector<std::size_t>& order, int power = 1);

}  // namespace roe
