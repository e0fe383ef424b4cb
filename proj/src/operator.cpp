#include "roe/operator.hpp"

#include <algorithm>
#include <cmath>

#include "roe/errors.hpp"

namespace roe {
namespace {

Matrix kron_identity(const Matrix& s, Eigen::Index d) {
  Matrix out = Matrix::Zero(s.rows() * d, s.cols() * d);
  for (Eigen::Index c2 = 0; c2 < s.cols(); ++c2) {
    for (Eigen::Index c1 = 0; c1 < s.rows(); ++c1) {
      if (s(c1, c2) == Complex(0.0)) continue;
      for (Eigen::Index i = 0; i < d; ++i) out(c1 * d + i, c2 * d + i) = s(c1, c2);
    }
  }
  return out;
}

// Coordinates of kept points (leading keep_dims fibers) on every copy.
std::vector<Eigen::Index> kept_coordinates(const SampledSpace& s, int k, const SubsetMask& keep,
                                           const std::vector<int>& dims) {
  std::vector<Eigen::Index> idx;
  const auto d = static_cast<Eigen::Index>(s.total_dim());
  for (int c = 0; c < k; ++c) {
    for (std::size_t p = 0; p < s.size(); ++p) {
      if (!keep[p]) continue;
      for (int f = 0; f < dims[p]; ++f) {
        idx.push_back(c * d + static_cast<Eigen::Index>(s.offset(p)) + f);
      }
    }
  }
  return idx;
}

void check_keep(const SampledSpace& s, const SubsetMask& keep, const std::vector<int>& dims) {
  if (keep.size() != s.size() || dims.size() != s.size()) {
    throw Error(Errc::shape_mismatch, "compression mask/dims length does not match space");
  }
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (!keep[p]) continue;
    if (dims[p] < 1 || dims[p] > s.internal_dim(p)) {
      throw Error(Errc::domain, "kept fiber dimension outside [1, internal_dim]", p);
    }
  }
}

}  // namespace

FiniteOperator::FiniteOperator(SpacePtr space, int amplification, Matrix entries,
                               std::optional<Matrix> scalar_part)
    : space_(std::move(space)), k_(amplification), entries_(std::move(entries)), scalar_(std::move(scalar_part)) {
  if (!space_) throw Error(Errc::malformed_input, "operator without a space");
  if (k_ < 1) throw Error(Errc::domain, "amplification must be >= 1");
  const auto n = static_cast<Eigen::Index>(k_) * static_cast<Eigen::Index>(space_->total_dim());
  if (entries_.rows() != n || entries_.cols() != n) {
    throw Error(Errc::shape_mismatch, "entries are " + std::to_string(entries_.rows()) + "x" +
                                          std::to_string(entries_.cols()) + ", expected " + std::to_string(n));
  }
  if (scalar_ && (scalar_->rows() != k_ || scalar_->cols() != k_)) {
    throw Error(Errc::shape_mismatch, "scalar part must be k x k");
  }
}

FiniteOperator FiniteOperator::zero(SpacePtr space, int amplification) {
  const auto n = static_cast<Eigen::Index>(amplification) * static_cast<Eigen::Index>(space->total_dim());
  return FiniteOperator(std::move(space), amplification, Matrix::Zero(n, n));
}

FiniteOperator FiniteOperator::identity(SpacePtr space, int amplification) {
  const auto n = static_cast<Eigen::Index>(amplification) * static_cast<Eigen::Index>(space->total_dim());
  return FiniteOperator(std::move(space), amplification, Matrix::Zero(n, n),
                        Matrix::Identity(amplification, amplification));
}

Matrix FiniteOperator::dense() const {
  if (!scalar_) return entries_;
  return entries_ + kron_identity(*scalar_, static_cast<Eigen::Index>(space_->total_dim()));
}

FiniteOperator FiniteOperator::folded() const { return FiniteOperator(space_, k_, dense()); }

Eigen::Index FiniteOperator::index(int copy, std::size_t point, int fiber) const {
  return static_cast<Eigen::Index>(copy) * static_cast<Eigen::Index>(space_->total_dim()) +
         static_cast<Eigen::Index>(space_->offset(point)) + fiber;
}

bool same_space(const SampledSpace& a, const SampledSpace& b) {
  return &a == &b || (a.hash() == b.hash() && a.size() == b.size() && a.total_dim() == b.total_dim());
}

void require_compatible(const FiniteOperator& a, const FiniteOperator& b) {
  if (!same_space(a.space(), b.space())) throw Error(Errc::shape_mismatch, "operators live on different spaces");
  if (a.amplification() != b.amplification()) throw Error(Errc::shape_mismatch, "amplifications differ");
}

bool SupportSet::contains(std::size_t y, std::size_t x) const {
  return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(y, x));
}

RealMatrix block_max_modulus(const FiniteOperator& t) {
  const SampledSpace& s = t.space();
  const auto d = static_cast<Eigen::Index>(s.total_dim());
  RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(s.size()));
  const Matrix a = t.dense();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const auto x = static_cast<Eigen::Index>(s.point_of(static_cast<std::size_t>(j % d)));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double v = std::abs(a(i, j));
      if (v == 0.0) continue;
      const auto y = static_cast<Eigen::Index>(s.point_of(static_cast<std::size_t>(i % d)));
      if (v > m(y, x)) m(y, x) = v;
    }
  }
  return m;
}

SupportSet support(const FiniteOperator& t, double tau) {
  const RealMatrix m = block_max_modulus(t);
  SupportSet out;
  out.points = t.space().size();
  for (Eigen::Index y = 0; y < m.rows(); ++y) {
    for (Eigen::Index x = 0; x < m.cols(); ++x) {
      if (m(y, x) > tau) out.pairs.emplace_back(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
    }
  }
  return out;
}

ExtReal propagation(const FiniteOperator& t, double tau) {
  const RealMatrix m = block_max_modulus(t);
  const auto& dist = t.space().distances();
  double best = 0.0;
  for (Eigen::Index x = 0; x < m.cols(); ++x) {
    for (Eigen::Index y = 0; y < m.rows(); ++y) {
      if (m(y, x) > tau) best = std::max(best, dist(y, x));
    }
  }
  return ExtReal(best);
}

FiniteOperator add(const FiniteOperator& a, const FiniteOperator& b) {
  require_compatible(a, b);
  std::optional<Matrix> s;
  if (a.unitized() || b.unitized()) {
    Matrix sum = Matrix::Zero(a.amplification(), a.amplification());
    if (a.scalar_part()) sum += *a.scalar_part();
    if (b.scalar_part()) sum += *b.scalar_part();
    s = std::move(sum);
  }
  return FiniteOperator(a.space_ptr(), a.amplification(), a.entries() + b.entries(), std::move(s));
}

FiniteOperator subtract(const FiniteOperator& a, const FiniteOperator& b) { return add(a, scale(b, -1.0)); }

FiniteOperator multiply(const FiniteOperator& a, const FiniteOperator& b) {
  require_compatible(a, b);
  const Matrix full = a.dense() * b.dense();
  if (a.unitized() && b.unitized()) {
    Matrix s = *a.scalar_part() * *b.scalar_part();
    Matrix e = full - kron_identity(s, static_cast<Eigen::Index>(a.space().total_dim()));
    return FiniteOperator(a.space_ptr(), a.amplification(), std::move(e), std::move(s));
  }
  return FiniteOperator(a.space_ptr(), a.amplification(), full);
}

FiniteOperator adjoint(const FiniteOperator& a) {
  std::optional<Matrix> s;
  if (a.scalar_part()) s = a.scalar_part()->adjoint();
  return FiniteOperator(a.space_ptr(), a.amplification(), a.entries().adjoint(), std::move(s));
}

FiniteOperator scale(const FiniteOperator& a, Complex c) {
  std::optional<Matrix> s;
  if (a.scalar_part()) s = *a.scalar_part() * c;
  return FiniteOperator(a.space_ptr(), a.amplification(), a.entries() * c, std::move(s));
}

double opnorm(const FiniteOperator& a) { return spectral_norm(a.dense()); }

double product_tau(const FiniteOperator& a, const FiniteOperator& b, double tau) {
  return tau * std::max(1.0, opnorm(a) * opnorm(b));
}

double distance(const FiniteOperator& a, const FiniteOperator& b) {
  require_compatible(a, b);
  return spectral_norm(a.dense() - b.dense());
}

FiniteOperator restrict(const FiniteOperator& t, const SubsetMask& rows, const SubsetMask& cols) {
  const SampledSpace& s = t.space();
  if (rows.size() != s.size() || cols.size() != s.size()) {
    throw Error(Errc::shape_mismatch, "mask size does not match space");
  }
  if (mask_count(rows) == s.size() && mask_count(cols) == s.size()) return t;
  Matrix a = t.dense();
  const auto d = static_cast<Eigen::Index>(s.total_dim());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const bool keep_col = cols[s.point_of(static_cast<std::size_t>(j % d))];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!keep_col || !rows[s.point_of(static_cast<std::size_t>(i % d))]) a(i, j) = 0.0;
    }
  }
  return FiniteOperator(t.space_ptr(), t.amplification(), std::move(a));
}

FiniteOperator compress(const FiniteOperator& t, const SubsetMask& keep_points,
                        const std::vector<int>& keep_dims) {
  const SampledSpace& s = t.space();
  check_keep(s, keep_points, keep_dims);
  auto sub = share(s.subspace(keep_points, keep_dims));
  const auto idx = kept_coordinates(s, t.amplification(), keep_points, keep_dims);
  const auto n = static_cast<Eigen::Index>(idx.size());
  Matrix e(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) e(r, c) = t.entries()(idx[r], idx[c]);
  }
  return FiniteOperator(std::move(sub), t.amplification(), std::move(e), t.scalar_part());
}

double compression_defect(const FiniteOperator& t, const SubsetMask& keep_points,
                          const std::vector<int>& keep_dims) {
  const SampledSpace& s = t.space();
  check_keep(s, keep_points, keep_dims);
  Matrix a = t.dense();
  const auto idx = kept_coordinates(s, t.amplification(), keep_points, keep_dims);
  for (Eigen::Index c : idx) {
    for (Eigen::Index r : idx) a(r, c) = 0.0;
  }
  return spectral_norm(a);
}

FiniteOperator truncate_propagation(const FiniteOperator& t, double r) {
  if (!(r > 0.0)) throw Error(Errc::domain, "truncation radius must be positive");
  const SampledSpace& s = t.space();
  const auto d = static_cast<Eigen::Index>(s.total_dim());
  Matrix e = t.entries();
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    const auto x = s.point_of(static_cast<std::size_t>(j % d));
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      const auto y = s.point_of(static_cast<std::size_t>(i % d));
      if (!(s.distances()(y, x) < r)) e(i, j) = 0.0;
    }
  }
  return FiniteOperator(t.space_ptr(), t.amplification(), std::move(e), t.scalar_part());
}

FiniteOperator direct_sum(const FiniteOperator& a, const FiniteOperator& b) { return direct_sum({a, b}); }

FiniteOperator direct_sum(const std::vector<FiniteOperator>& parts) {
  if (parts.empty()) throw Error(Errc::domain, "empty direct sum");
  int k = 0;
  bool unitized = false;
  std::vector<Matrix> blocks;
  for (const auto& p : parts) {
    if (!same_space(p.space(), parts[0].space())) throw Error(Errc::shape_mismatch, "direct sum across spaces");
    k += p.amplification();
    unitized = unitized || p.unitized();
    blocks.push_back(p.entries());
  }
  std::optional<Matrix> s;
  if (unitized) {
    std::vector<Matrix> sb;
    for (const auto& p : parts) {
      sb.push_back(p.scalar_part() ? *p.scalar_part() : Matrix::Zero(p.amplification(), p.amplification()));
    }
    s = block_diagonal(sb);
  }
  return FiniteOperator(parts[0].space_ptr(), k, block_diagonal(blocks), std::move(s));
}

FiniteOperator from_dense(SpacePtr space, int amplification, Matrix m) {
  return FiniteOperator(std::move(space), amplification, std::move(m));
}

Matrix amplify(const Matrix& a, int k) { return block_diagonal(std::vector<Matrix>(static_cast<std::size_t>(k), a)); }

}  // namespace roe
