#include "roe/random.hpp"

#include <cmath>

#include "roe/errors.hpp"

namespace roe {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Complex complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal(rng);
  return m;
}

Matrix random_hermitian(Eigen::Index n, Rng& rng) {
  Matrix g = random_gaussian(n, n, rng);
  return (g + g.adjoint()) * 0.5;
}

Matrix haar_unitary(Eigen::Index n, Rng& rng) {
  Matrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

FiniteOperator random_banded(SpacePtr space, int k, double r, Rng& rng, bool hermitian) {
  const SampledSpace& s = *space;
  const auto d = static_cast<Eigen::Index>(s.total_dim());
  const Eigen::Index n = d * k;
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto x = s.point_of(static_cast<std::size_t>(j % d));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto y = s.point_of(static_cast<std::size_t>(i % d));
      const Complex z = complex_normal(rng);
      if (s.distances()(y, x) < r) m(i, j) = z;
    }
  }
  if (hermitian) m = (m + m.adjoint()).eval() * 0.5;
  return FiniteOperator(std::move(space), k, std::move(m));
}

FiniteOperator random_perturbation(SpacePtr space, int k, double norm, double r, Rng& rng) {
  FiniteOperator e = random_banded(std::move(space), k, r, rng, true);
  const double n0 = opnorm(e);
  if (n0 == 0.0) return e;
  return scale(e, norm / n0);
}

FiniteOperator random_quasi_projection(SpacePtr space, int k, double eps, double r, Rng& rng) {
  if (!(eps > 0.0 && eps < 0.25)) throw Error(Errc::domain, "epsilon must lie in (0, 1/4)");
  if (!(r > 0.0)) throw Error(Errc::domain, "r must be positive");
  const SampledSpace& s = *space;
  const Eigen::Index n = static_cast<Eigen::Index>(s.total_dim()) * k;

  std::uniform_real_distribution<double> noise(-0.5 * eps, 0.5 * eps);
  std::bernoulli_distribution bit(0.5);
  RealVector diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double base = bit(rng) ? 1.0 : 0.0;
    diag(i) = base + noise(rng);
  }
  const Matrix h = random_banded(space, k, 0.5 * r, rng, true).entries();
  const HermitianEigen he = hermitian_eigen(h);
  const double hn = std::max(std::abs(he.values(0)), std::abs(he.values(n - 1)));
  std::uniform_real_distribution<double> theta0(0.2, 1.0);
  double theta = theta0(rng) / std::max(hn, 1e-300);

  for (int attempt = 0; attempt < 60; ++attempt) {
    Vector phases(n);
    for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::polar(1.0, theta * he.values(i));
    const Matrix v = he.vectors * phases.asDiagonal() * he.vectors.adjoint();
    Matrix p = v * diag.cast<Complex>().asDiagonal() * v.adjoint();
    p = (p + p.adjoint()).eval() * 0.5;
    FiniteOperator cand = truncate_propagation(FiniteOperator(space, k, p), r);
    Matrix c = cand.entries();
    c = (c + c.adjoint()).eval() * 0.5;
    cand = FiniteOperator(space, k, c);
    if (spectral_norm(c * c - c) < eps) return cand;
    theta *= 0.5;
  }
  return FiniteOperator(space, k, diag.cast<Complex>().asDiagonal().toDenseMatrix());
}

FiniteOperator random_pointwise_projection(SpacePtr space, const std::vector<int>& ranks, double noise,
                                           Rng& rng) {
  const SampledSpace& s = *space;
  if (ranks.size() != s.size()) throw Error(Errc::shape_mismatch, "one rank per point required");
  const auto n = static_cast<Eigen::Index>(s.total_dim());
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < s.size(); ++j) {
    const int d = s.internal_dim(j);
    if (ranks[j] < 0 || ranks[j] > d) throw Error(Errc::domain, "rank exceeds fiber dimension", j);
    const Matrix u = haar_unitary(d, rng);
    RealVector ones = RealVector::Zero(d);
    ones.head(ranks[j]).setOnes();
    Matrix block = u * ones.cast<Complex>().asDiagonal() * u.adjoint();
    if (noise > 0.0) {
      Matrix g = random_hermitian(d, rng);
      const double gn = spectral_norm(g);
      if (gn > 0) block += g * (noise / gn);
    }
    const auto off = static_cast<Eigen::Index>(s.offset(j));
    p.block(off, off, d, d) = (block + block.adjoint()) * 0.5;
  }
  return FiniteOperator(std::move(space), 1, std::move(p));
}

FiniteOperator phase_unitary(SpacePtr space, const Vector& psi, double theta) {
  const auto n = static_cast<Eigen::Index>(space->total_dim());
  if (psi.size() != n) throw Error(Errc::shape_mismatch, "psi length must equal total_dim");
  const double nrm = psi.norm();
  if (nrm == 0.0) throw Error(Errc::domain, "psi must be nonzero");
  const Vector v = psi / nrm;
  Matrix e = (std::polar(1.0, theta) - 1.0) * (v * v.adjoint());
  return FiniteOperator(std::move(space), 1, std::move(e), Matrix::Identity(1, 1));
}

}  // namespace roe
