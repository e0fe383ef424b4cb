#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "roe/controlled_k.hpp"
#include "roe/ext_real.hpp"
#include "roe/operator.hpp"

namespace roe {

// Point map between sampled spaces.
class CoarseMap {
 public:
  // Throws Error(shape_mismatch) unless there is one in-range target per
  // source point.
  CoarseMap(SpacePtr source, SpacePtr target, std::vector<std::size_t> assignment);

  static CoarseMap identity(SpacePtr space);

  const SampledSpace& source() const { return *source_; }
  const SampledSpace& target() const { return *target_; }
  const SpacePtr& source_ptr() const { return source_; }
  const SpacePtr& target_ptr() const { return target_; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }
  std::size_t operator()(std::size_t x) const { return assignment_.at(x); }

  // Number of source points landing on each target point.
  std::vector<std::size_t> preimage_sizes() const;

 private:
  SpacePtr source_;
  SpacePtr target_;
  std::vector<std::size_t> assignment_;
};

// g after f.
CoarseMap compose(const CoarseMap& g, const CoarseMap& f);

// sup d(f x1, f x2) over sampled pairs with d(x1, x2) < r; 0 if none.
ExtReal expansion_function(const CoarseMap& f, double r);

// sup d(f x1, f x2) / d(x1, x2) over pairs at finite positive distance.
ExtReal lipschitz_constant(const CoarseMap& f);

// sup_x d(f x, g x).
ExtReal displacement(const CoarseMap& f, const CoarseMap& g);

// Isometry from the source module into the target module with every support
// pair (y, x) satisfying d(y, f x) < delta. matrix is target_dim x source_dim.
struct CoverIsometry {
  CoarseMap map;
  double delta = 0.0;
  Matrix matrix;

  // |V*V - 1|.
  double isometry_defect() const;
  // max d(y, f x) - delta over support pairs (negative when valid).
  double support_excess() const;
};

// Greedy fiber packing. Each source point takes unused coordinates of the
// nearest target points within delta of f(x), ties broken by index. Points
// are visited in `order`, by default by increasing room (total target fiber
// dimension within delta of f(x)), then index. Error(capacity) names the
// starved point.
CoverIsometry delta_cover(const CoarseMap& f, double delta,
                          const std::optional<std::vector<std::size_t>>& order = std::nullopt);

// (v2 v1) as a cover of (f2 f1) with delta = delta2 + omega_f2(delta1).
CoverIsometry compose(const CoverIsometry& v2, const CoverIsometry& v1);

// V T V* over the target, amplified to T's copies. A scalar part is carried
// unchanged (unital extension).
FiniteOperator ad(const CoverIsometry& v, const FiniteOperator& t);

struct RotationHomotopy {
  HomotopyCertificate certificate;
  double omega = 0.0;  // omega_f(r)
  double delta = 0.0;
  int steps = 0;
  FiniteOperator start;  // diag(ad(V, p), 0, 0, 0)
  FiniteOperator end;    // diag(0, ad(V', p), 0, 0)
};

// Conjugation of diag(ad(vf, p), 0, 0, 0) by
//   U_t = diag(U, 1) R(t) diag(1, U*) R(t)*,  t from pi/2 down to 0,
// U = [[1 - V V*, V V'*], [V' V*, 1 - V' V'*]], giving a certificate at
// (eps, omega_f(r) + 8 delta). Without `steps` the count is found by
// scanning upward from a lower estimate until every step is <= eps/15 and
// every margin is positive; an explicit count that misses either raises
// Error(refine_needed).
RotationHomotopy rotation_homotopy(const CoverIsometry& vf, const CoverIsometry& vf2, const FiniteOperator& p,
                                   const QuasiParams& q, std::optional<int> steps = std::nullopt,
                                   double tau = kDefaultTau);

// Frames F(t_j, .) of a homotopy with a common Lipschitz bound.
class LipschitzHomotopy {
 public:
  // Throws Error(domain) when frames disagree on spaces, there are none, or
  // a frame's Lipschitz constant exceeds c.
  LipschitzHomotopy(std::vector<CoarseMap> frames, double c);

  const std::vector<CoarseMap>& frames() const { return frames_; }
  double lipschitz_bound() const { return c_; }
  // sup_x d(F_j x, F_{j+1} x).
  const std::vector<ExtReal>& displacements() const { return table_; }

 private:
  std::vector<CoarseMap> frames_;
  double c_;
  std::vector<ExtReal> table_;
};

// Fewest frame indices, first and last included, with consecutive sup
// displacement < delta. Error(resolution) when adjacent frames already
// move a point by >= delta.
std::vector<std::size_t> partition_homotopy(const LipschitzHomotopy& f, double delta);

struct InvarianceResult {
  HomotopyCertificate certificate;
  std::vector<std::size_t> partition;
  QuasiParams achieved;  // worst defect and propagation over samples
  QuasiParams bound;     // (21 eps, 5 (c r + 4 delta))
  QuasiParams bound_2delta;  // (21 eps, 5 (c r + 2 delta))
  std::vector<std::string> stages;
  std::vector<std::size_t> stage_starts;  // first sample of each stage
};

// Connects (ad(V_0, u) + I) + (I + I)^l to (ad(V_l, u) + I) + (I + I)^l
// through the operators a, b, c built from w_i = u_i u_l*, with u_i the
// unital ad of delta-covers of the partition frames. u must be unitized.
// Any failing stage raises Error(construction) carrying the stage name.
InvarianceResult homotopy_invariance_certificate(const LipschitzHomotopy& f, const FiniteOperator& u,
                                                 const QuasiParams& q, double delta, double tau = kDefaultTau);

}  // namespace roe
