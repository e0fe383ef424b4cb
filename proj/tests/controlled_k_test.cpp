#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roe/controlled_k.hpp"
#include "roe/errors.hpp"
#include "roe/random.hpp"

namespace roe {
namespace {

SpacePtr line_space(int n, double h, int fiber = 1) {
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = std::abs(i - j) * h;
  return share(SampledSpace::from_distances(d, std::vector<int>(n, fiber)));
}

// n isolated points at mutual distance r0.
SpacePtr discrete_space(int n, double r0, std::vector<int> dims) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, r0);
  d.diagonal().setZero();
  return share(SampledSpace::from_distances(d, std::move(dims)));
}

FiniteOperator diag_op(SpacePtr s, std::vector<double> v) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v[i];
  return FiniteOperator(std::move(s), 1, m);
}

TEST(QuasiProjection, Examples) {
  auto s = line_space(2, 1.0);
  auto exact = diag_op(s, {1.0, 0.0});
  EXPECT_TRUE(is_quasi_projection(exact, {0.01, 0.5}).ok);
  EXPECT_EQ(is_quasi_projection(exact, {0.01, 0.5}).defect, 0.0);

  auto p = diag_op(s, {0.9, 0.1});
  const auto w = is_quasi_projection(p, {0.1, 0.5});
  EXPECT_NEAR(w.defect, 0.09, 1e-15);
  EXPECT_TRUE(w.ok);
  EXPECT_FALSE(is_quasi_projection(p, {0.09, 0.5}).ok);
  EXPECT_FALSE(is_quasi_projection(p, {0.08, 0.5}).ok);

  auto x = build_complex({{0}, {1}});
  auto two = share(discretize(x, 1.0, 1));
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = m(1, 0) = 1e-3;
  const auto off = is_quasi_projection(FiniteOperator(two, 1, m), {0.1, 5.0});
  EXPECT_TRUE(off.propagation.is_infinite());
  EXPECT_FALSE(off.ok);
}

TEST(QuasiUnitary, Examples) {
  auto s = line_space(3, 1.0);
  EXPECT_TRUE(is_quasi_unitary(FiniteOperator::identity(s), {0.01, 0.5}).ok);
  auto half = scale(FiniteOperator::identity(s), 0.5);
  const auto w = is_quasi_unitary(half, {0.2, 0.5});
  EXPECT_NEAR(w.defect, 0.75, 1e-15);
  EXPECT_FALSE(w.ok);
}

TEST(QuasiUnitary, CircleShiftOracle) {
  auto x = build_complex({{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  auto s = share(discretize(x, 0.25, 1));
  auto order = cyclic_order(*s, x);
  const auto n = static_cast<Eigen::Index>(order.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(static_cast<Eigen::Index>(order[(k + 1) % n]), static_cast<Eigen::Index>(order[k])) = 1.0;
  FiniteOperator shift(s, 1, m);
  // Oracle: adjacent arc lengths from the exact per-edge formula
  // theta = atan(w1 / w0) along each edge.
  double adjacent = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto a = order[k], b = order[(k + 1) % n];
    bool found = false;
    for (const auto& e : x.simplices_of_dimension(1)) {
      const auto& edge = x.simplices()[e];
      const auto& ca = x.simplices()[s->point(a).carrier];
      const auto& cb = x.simplices()[s->point(b).carrier];
      if (std::includes(edge.begin(), edge.end(), ca.begin(), ca.end()) &&
          std::includes(edge.begin(), edge.end(), cb.begin(), cb.end())) {
        const auto wa = weights_on(x, s->point(a), edge), wb = weights_on(x, s->point(b), edge);
        const double ta = std::atan2(wa[1], wa[0]), tb = std::atan2(wb[1], wb[0]);
        adjacent = std::max(adjacent, std::abs(ta - tb));
        found = true;
        break;
      }
    }
    ASSERT_TRUE(found);
  }
  const auto w = is_quasi_unitary(shift, {0.01, adjacent + 1e-9});
  EXPECT_EQ(w.defect, 0.0);
  EXPECT_NEAR(w.propagation.value(), adjacent, 1e-12);
  EXPECT_TRUE(w.ok);
  EXPECT_FALSE(is_quasi_unitary(shift, {0.01, adjacent - 1e-9}).ok);
}

TEST(PerturbBound, Examples) {
  auto s = line_space(2, 1.0);
  auto p = diag_op(s, {0.95, 0.05});
  auto p2 = diag_op(s, {0.96, 0.05});
  const auto q = perturb_bound(p, p2, {0.1, 0.5});
  EXPECT_NEAR(q.epsilon, 0.15, 1e-15);
  EXPECT_EQ(q.r, 0.5);
  const auto same = perturb_bound(p, p, {0.1, 0.5});
  EXPECT_EQ(same.epsilon, 0.1);
  try {
    perturb_bound(p, diag_op(s, {0.6, 0.05}), {0.1, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::out_of_range);
  }
}

TEST(PerturbBound, RandomSixBySixMeasured) {
  auto s = line_space(6, 0.1);
  Rng rng(41);
  for (int t = 0; t < 200; ++t) {
    const double eps = 0.1;
    auto p = random_quasi_projection(s, 1, eps, 0.25, rng);
    auto e = random_perturbation(s, 1, 0.02 * (t % 5 + 1) / 5.0, 0.25, rng);
    auto p2 = p + e;
    const double delta = distance(p, p2);
    const auto q = perturb_bound(p, p2, {eps, 0.25});
    const double measured = quasi_defect(Parity::even, p2);
    EXPECT_LE(measured, 5 * delta + eps + 1e-9);
    EXPECT_NEAR(q.epsilon, eps + 5 * delta, 1e-15);
  }
}

TEST(Stabilize, Bookkeeping) {
  auto s = discrete_space(3, 1.0, {1, 2, 1});
  KClassRep x{Parity::even, diag_op(s, {1.0, 0.0, 1.0, 0.0}), 0, {0.1, 0.5}};
  EXPECT_EQ(stabilize(x, 0).rep.amplification(), 1);
  auto y = stabilize(x, 2);
  EXPECT_EQ(y.ell, 2u);
  EXPECT_EQ(y.rep.amplification(), 3);
  EXPECT_EQ(scalar_rank(y.rep), 2u);
  EXPECT_TRUE(check_rep(y).ok);
  EXPECT_EQ(k0_class(x), k0_class(y));
  EXPECT_EQ(k0_class(x), (std::vector<long>{1, 1, 0}));
  KClassRep u{Parity::odd, FiniteOperator::identity(s), 0, {0.1, 0.5}};
  auto u2 = stabilize(u, 3);
  EXPECT_EQ(u2.rep.amplification(), 4);
  EXPECT_EQ(u2.ell, 0u);
}

TEST(KappaEven, Examples) {
  auto s = line_space(2, 1.0);
  auto exact = diag_op(s, {1.0, 0.0});
  EXPECT_EQ(max_abs(kappa_even(exact).dense() - exact.dense()), 0.0);
  auto p = diag_op(s, {0.9, 0.1});
  EXPECT_LT(max_abs(kappa_even(p).dense() - exact.dense()), 1e-15);
  EXPECT_LT(max_abs(kappa_even(p, 0.1).dense() - exact.dense()), 1e-15);
  try {
    kappa_even(diag_op(s, {0.5, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::spectral_gap_violation);
  }
  try {
    kappa_even(diag_op(s, {0.8, 0.0}), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::spectral_gap_violation);
  }
}

TEST(KappaEven, RandomRankProfile) {
  auto x = build_complex({{0, 1}, {1, 2}});
  auto s = share(discretize(x, 0.3, 2));
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    const auto n = static_cast<Eigen::Index>(s->total_dim());
    const Matrix v = haar_unitary(n, rng);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    std::bernoulli_distribution bit(0.4);
    RealVector d(n);
    long rank = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool one = bit(rng);
      rank += one;
      d(i) = (one ? 1.0 : 0.0) + noise(rng);
    }
    FiniteOperator p(s, 1, v * d.cast<Complex>().asDiagonal() * v.adjoint());
    ASSERT_LT(quasi_defect(Parity::even, p), 0.1);
    auto chi = kappa_even(p, 0.1);
    const Matrix c = chi.dense();
    EXPECT_LE(spectral_norm(c * c - c), 1e-12);
    EXPECT_NEAR(c.trace().real(), static_cast<double>(rank), 1e-9);
  }
}

TEST(KappaOdd, Examples) {
  auto s = line_space(3, 1.0);
  Rng rng(47);
  FiniteOperator u(s, 1, haar_unitary(3, rng));
  EXPECT_LT(max_abs(kappa_odd(u).dense() - u.dense()), 1e-13);
  auto big = scale(FiniteOperator::identity(s), 1.1);
  EXPECT_LT(max_abs(kappa_odd(big).dense() - Matrix::Identity(3, 3)), 1e-15);
  for (int t = 0; t < 30; ++t) {
    Matrix a = haar_unitary(3, rng) + random_gaussian(3, 3, rng) * 0.03;
    FiniteOperator w(s, 1, a);
    const Matrix k = kappa_odd(w).dense();
    EXPECT_LT(spectral_norm(k.adjoint() * k - Matrix::Identity(3, 3)), 1e-12);
    const Matrix g = inverse_sqrt(a.adjoint() * a) - Matrix::Identity(3, 3);
    EXPECT_LE(spectral_norm(k - a), spectral_norm(g) * spectral_norm(a) + 1e-12);
  }
}

TEST(K0Points, Examples) {
  auto s = discrete_space(5, 1.0, {1, 1, 1, 1, 1});
  EXPECT_EQ(k0_points(FiniteOperator::zero(s), {0.1, 0.5}), (std::vector<long>(5, 0)));
  auto p = diag_op(s, {0, 0, 1, 0, 0});
  EXPECT_EQ(k0_points(p, {0.1, 0.5}), (std::vector<long>{0, 0, 1, 0, 0}));

  auto s3 = discrete_space(5, 1.0, {2, 3, 1, 2, 4});
  Rng rng(53);
  const std::vector<int> ranks{1, 2, 0, 1, 3};
  for (int t = 0; t < 10; ++t) {
    auto q = random_pointwise_projection(s3, ranks, 0.02, rng);
    auto got = k0_points(q, {0.1, 0.5});
    for (std::size_t j = 0; j < ranks.size(); ++j) EXPECT_EQ(got[j], ranks[j]);
  }
  Matrix m = diag_op(s, {1, 0, 0, 0, 0}).dense();
  m(0, 1) = m(1, 0) = 0.01;
  try {
    k0_points(FiniteOperator(s, 1, m), {0.1, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_block_diagonal);
  }
}

TEST(SpectralBand, AcceptedQuasiProjections) {
  auto x = build_complex({{0, 1}, {1, 2}, {2, 0}});
  auto s = share(discretize(x, 0.4, 1));
  Rng rng(59);
  for (double eps : {0.01, 0.05, 0.1, 0.2}) {
    for (int t = 0; t < 25; ++t) {
      auto p = random_quasi_projection(s, 1, eps, 0.3, rng);
      ASSERT_TRUE(is_quasi_projection(p, {eps, 0.3}).ok);
      const RealVector ev = hermitian_eigenvalues(p.dense());
      const double a = band_outer(eps), b = band_inner(eps);
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double v = ev(i);
        EXPECT_TRUE((v >= -a - 1e-9 && v <= b + 1e-9) || (v >= 1 - b - 1e-9 && v <= 1 + a + 1e-9)) << v;
      }
    }
  }
  // The outer edge a alone is not enough: diag(0.9, 0.1) at eps = 0.1.
  auto two = line_space(2, 1.0);
  const RealVector ev = hermitian_eigenvalues(diag_op(two, {0.9, 0.1}).dense());
  EXPECT_GT(ev(0), band_outer(0.1));
  EXPECT_LE(ev(0), band_inner(0.1));
}

TEST(InterpolationCertificate, Examples) {
  auto s = line_space(2, 1.0);
  auto p = diag_op(s, {0.9, 0.1});
  auto c0 = interpolation_certificate(p, p, {0.2, 0.5});
  EXPECT_TRUE(verify_certificate(c0).ok);

  auto p2 = diag_op(s, {0.91, 0.09});
  auto c1 = interpolation_certificate(p, p2, {0.16, 0.5});
  EXPECT_NEAR(c1.step_bounds[0], 0.01, 1e-15);
  EXPECT_TRUE(verify_certificate(c1).ok);

  auto p3 = diag_op(s, {0.95, 0.1});
  try {
    interpolation_certificate(p, p3, {0.2, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_certificate);
  }
}

TEST(VerifyCertificate, ReportsBadSample) {
  auto s = line_space(3, 1.0);
  auto p = diag_op(s, {1, 0, 0});
  Matrix m = p.dense();
  m(0, 2) = m(2, 0) = 1e-3;
  FiniteOperator wide(s, 1, m);
  HomotopyCertificate c{Parity::even, {p, wide, p}, {0.1, 1.5}, {1e-3, 1e-3}};
  auto rep = verify_certificate(c);
  EXPECT_FALSE(rep.ok);
  ASSERT_TRUE(rep.bad_sample.has_value());
  EXPECT_EQ(*rep.bad_sample, 1u);

  HomotopyCertificate understated{Parity::even, {p, diag_op(s, {0.99, 0, 0})}, {0.1, 1.5}, {0.001}};
  EXPECT_FALSE(verify_certificate(understated).ok);
}

TEST(Resample, ConstantAndJump) {
  auto s = line_space(3, 1.0);
  auto p = diag_op(s, {1, 0, 1});
  std::vector<FiniteOperator> path(10, p);
  auto c = resample_certificate(path, 0.1, {Parity::even, 0.5, false});
  EXPECT_EQ(c.samples.size(), 2u);
  EXPECT_TRUE(verify_certificate(c).ok);
  EXPECT_NEAR(c.params.epsilon, 0.2, 1e-15);

  std::vector<FiniteOperator> jump{p, p, diag_op(s, {0.7, 0, 1}), p};
  try {
    resample_certificate(jump, 0.1, {Parity::even, 0.5, false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::refine_needed);
    EXPECT_EQ(e.index().value_or(99), 1u);
  }
}

TEST(Resample, RotationPath) {
  auto s = line_space(4, 0.1);
  Rng rng(61);
  auto p = random_quasi_projection(s, 1, 0.02, 0.35, rng);
  const Matrix h = random_hermitian(4, rng);
  const HermitianEigen he = hermitian_eigen(h);
  const double hn = std::max(std::abs(he.values(0)), std::abs(he.values(3)));
  const double eps = 0.1;
  // |d/dt U p U*| <= 2 |H| |p|; choose steps so each sample gap is <= eps/15.
  const double total = 1.0;
  const int steps = 3 * (static_cast<int>(std::ceil(2 * hn * opnorm(p) * total / (eps / 15))) + 1);
  std::vector<FiniteOperator> path;
  for (int j = 0; j <= steps; ++j) {
    const double t = total * j / steps;
    Vector ph(4);
    for (int i = 0; i < 4; ++i) ph(i) = std::polar(1.0, t * he.values(i));
    const Matrix u = he.vectors * ph.asDiagonal() * he.vectors.adjoint();
    path.emplace_back(s, 1, u * p.dense() * u.adjoint());
  }
  auto c = resample_certificate(path, eps, {Parity::even, 1.0, false});
  auto rep = verify_certificate(c);
  EXPECT_TRUE(rep.ok) << rep.reason;
  EXPECT_LT(c.samples.size(), path.size());
  // Rank of chi is constant along an accepted certificate.
  const double r0 = kappa_even(c.samples.front()).dense().trace().real();
  for (const auto& x : c.samples) EXPECT_NEAR(kappa_even(x).dense().trace().real(), r0, 1e-9);
}

TEST(Resample, SubstitutionWithinTolerance) {
  auto s = line_space(5, 0.1);
  Rng rng(67);
  auto p = random_quasi_projection(s, 1, 0.02, 0.25, rng);
  Matrix m = p.dense();
  m(0, 4) += 1e-4;
  m(4, 0) += 1e-4;
  FiniteOperator far(s, 1, m);
  std::vector<FiniteOperator> path{far, far};
  auto c = resample_certificate(path, 0.1, {Parity::even, 0.25, true});
  EXPECT_LT(propagation(c.samples[0]).value(), 0.25);
  m(0, 4) += 0.02;
  m(4, 0) += 0.02;
  try {
    resample_certificate({FiniteOperator(s, 1, m)}, 0.1, {Parity::even, 0.25, true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::refine_needed);
  }
}

}  // namespace
}  // namespace roe
