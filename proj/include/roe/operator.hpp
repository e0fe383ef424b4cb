#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "roe/ext_real.hpp"
#include "roe/geometry.hpp"
#include "roe/linalg.hpp"

namespace roe {

inline constexpr double kDefaultTau = 1e-12;

using SpacePtr = std::shared_ptr<const SampledSpace>;

inline SpacePtr share(SampledSpace s) { return std::make_shared<const SampledSpace>(std::move(s)); }

// Complex matrix on k copies of the module over a sampled space. Coordinates
// are copy-major: index = copy * D + offset(point) + fiber, D = total_dim.
//
// An optional k x k scalar part S stands for S (x) I_D, the unitization
// component; dense() folds it into the entries.
class FiniteOperator {
 public:
  FiniteOperator(SpacePtr space, int amplification, Matrix entries,
                 std::optional<Matrix> scalar_part = std::nullopt);

  static FiniteOperator zero(SpacePtr space, int amplification = 1);
  // Scalar part I_k, zero entries.
  static FiniteOperator identity(SpacePtr space, int amplification = 1);

  const SampledSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  int amplification() const { return k_; }
  const Matrix& entries() const { return entries_; }
  const std::optional<Matrix>& scalar_part() const { return scalar_; }
  bool unitized() const { return scalar_.has_value(); }
  Eigen::Index dim() const { return entries_.rows(); }

  Matrix dense() const;
  // Same operator with the scalar part folded into the entries.
  FiniteOperator folded() const;

  Eigen::Index index(int copy, std::size_t point, int fiber) const;

 private:
  SpacePtr space_;
  int k_;
  Matrix entries_;
  std::optional<Matrix> scalar_;
};

bool same_space(const SampledSpace& a, const SampledSpace& b);
// Throws Error(shape_mismatch).
void require_compatible(const FiniteOperator& a, const FiniteOperator& b);

struct SupportSet {
  std::size_t points = 0;
  // Sorted (row point y, column point x) pairs.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  bool contains(std::size_t y, std::size_t x) const;
  bool empty() const { return pairs.empty(); }
};

// Point-level max modulus of the dense operator, over all copies and fibers.
RealMatrix block_max_modulus(const FiniteOperator& t);

SupportSet support(const FiniteOperator& t, double tau = kDefaultTau);
ExtReal propagation(const FiniteOperator& t, double tau = kDefaultTau);

FiniteOperator add(const FiniteOperator& a, const FiniteOperator& b);
FiniteOperator subtract(const FiniteOperator& a, const FiniteOperator& b);
FiniteOperator multiply(const FiniteOperator& a, const FiniteOperator& b);
FiniteOperator adjoint(const FiniteOperator& a);
FiniteOperator scale(const FiniteOperator& a, Complex s);
double opnorm(const FiniteOperator& a);
// Threshold for products: tau * max(1, |a| |b|).
double product_tau(const FiniteOperator& a, const FiniteOperator& b, double tau = kDefaultTau);

inline FiniteOperator operator+(const FiniteOperator& a, const FiniteOperator& b) { return add(a, b); }
inline FiniteOperator operator-(const FiniteOperator& a, const FiniteOperator& b) { return subtract(a, b); }
inline FiniteOperator operator*(const FiniteOperator& a, const FiniteOperator& b) { return multiply(a, b); }
inline FiniteOperator operator*(Complex s, const FiniteOperator& a) { return scale(a, s); }

// Norm of the difference of dense forms.
double distance(const FiniteOperator& a, const FiniteOperator& b);

// Zeroes every block outside rows x cols (scalar part folded first).
FiniteOperator restrict(const FiniteOperator& t, const SubsetMask& rows, const SubsetMask& cols);

// Q T Q on the sub-space of kept points with the leading keep_dims fiber
// coordinates. Throws Error(domain) if keep_dims exceeds a fiber.
FiniteOperator compress(const FiniteOperator& t, const SubsetMask& keep_points,
                        const std::vector<int>& keep_dims);
// |T - Q T Q| with Q T Q embedded back in the original space.
double compression_defect(const FiniteOperator& t, const SubsetMask& keep_points,
                          const std::vector<int>& keep_dims);

// Zeroes every block (y, x) with d(y, x) >= r, so the result has
// propagation < r.
FiniteOperator truncate_propagation(const FiniteOperator& t, double r);

// Block diagonal over copies: amplification adds.
FiniteOperator direct_sum(const FiniteOperator& a, const FiniteOperator& b);
FiniteOperator direct_sum(const std::vector<FiniteOperator>& parts);

// Operator with a given dense matrix on k copies, no scalar part.
FiniteOperator from_dense(SpacePtr space, int amplification, Matrix m);

// Expands a space-level matrix A (total_dim square) to k copies: I_k (x) A.
Matrix amplify(const Matrix& a, int k);

}  // namespace roe
