#include "roe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "roe/errors.hpp"
#include "roe/format.hpp"

namespace roe {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

double block_norm(const Matrix& b) {
  if (b.rows() == 1) return std::abs(b(0, 0));
  const double scale = max_abs(b);
  if (scale == 0.0) return 0.0;
  if (is_hermitian(b, 1e-14 * scale)) {
    const RealVector ev = hermitian_eigenvalues(b);
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  Matrix g = b.adjoint() * b;
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

double max_abs(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
    }
  }
  return true;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() != a.cols()) {
    Matrix g = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  const auto n = static_cast<std::size_t>(a.rows());
  UnionFind uf(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j && a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != Complex(0.0)) {
        uf.unite(i, j);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[uf.find(i)].push_back(static_cast<Eigen::Index>(i));
  double best = 0.0;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    if (g.size() == n) return block_norm(a);
    Matrix sub(g.size(), g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
      for (std::size_t r = 0; r < g.size(); ++r) sub(r, c) = a(g[r], g[c]);
    }
    best = std::max(best, block_norm(sub));
  }
  return best;
}

RealVector hermitian_eigenvalues(const Matrix& a) {
  if (a.size() == 0) return RealVector();
  Matrix h = (a + a.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

HermitianEigen hermitian_eigen(const Matrix& a) {
  if (a.size() == 0) return {};
  Matrix h = (a + a.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix hermitian_function(const Matrix& a, const std::function<double(double)>& f) {
  if (a.size() == 0) return a;
  const HermitianEigen e = hermitian_eigen(a);
  RealVector fv(e.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(e.values(i));
  return e.vectors * fv.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

Matrix spectral_projection(const Matrix& a, double threshold) {
  return hermitian_function(a, [threshold](double x) { return x >= threshold ? 1.0 : 0.0; });
}

Matrix inverse_sqrt(const Matrix& a) {
  if (a.size() == 0) return a;
  const HermitianEigen e = hermitian_eigen(a);
  if (!(e.values(0) > 0.0)) {
    throw Error(Errc::singular, "matrix is not positive definite (min eigenvalue " +
                                    format_real(e.values(0)) + ")");
  }
  RealVector fv = e.values.cwiseSqrt().cwiseInverse();
  return e.vectors * fv.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  Matrix out = Matrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

}  // namespace roe
