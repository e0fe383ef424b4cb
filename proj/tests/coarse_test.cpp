#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roe/coarse.hpp"
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

// A = n points at spacing h with fiber 2, B = 2n points at spacing h/2 with
// fiber 1; i -> 2i and j -> j/2 are coarse identities.
struct TwoScale {
  SpacePtr a, b;
  CoarseMap up, down;
};

TwoScale two_scale(int n, double h) {
  auto a = line_space(n, h, 2);
  auto b = line_space(2 * n, h / 2, 1);
  std::vector<std::size_t> up(n), down(2 * n);
  for (int i = 0; i < n; ++i) up[i] = 2 * i;
  for (int j = 0; j < 2 * n; ++j) down[j] = j / 2;
  return {a, b, CoarseMap(a, b, up), CoarseMap(b, a, down)};
}

CoarseMap shift_map(const SpacePtr& src, const SpacePtr& tgt, int by) {
  std::vector<std::size_t> a(src->size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::min<std::size_t>(i + by, tgt->size() - 1);
  return CoarseMap(src, tgt, a);
}

CoarseMap shift_map(const SpacePtr& s, int by) { return shift_map(s, s, by); }


TEST(ExpansionFunction, Examples) {
  auto s = line_space(21, 0.1);
  auto id = CoarseMap::identity(s);
  for (double r : {0.05, 0.1, 0.25, 0.3, 1.0}) EXPECT_LT(expansion_function(id, r).value(), r);
  CoarseMap constant(s, s, std::vector<std::size_t>(21, 4));
  EXPECT_EQ(expansion_function(constant, 0.7).value(), 0.0);

  std::vector<std::size_t> dbl(21);
  for (std::size_t i = 0; i < 21; ++i) dbl[i] = std::min<std::size_t>(2 * i, 20);
  CoarseMap twice(s, s, dbl);
  // Largest index gap below r is ceil(r/h) - 1; doubling maps it to twice that.
  for (double r : {0.15, 0.35, 0.55}) {
    const int g = static_cast<int>(std::ceil(r / 0.1 - 1e-12)) - 1;
    EXPECT_NEAR(expansion_function(twice, r).value(), 2 * g * 0.1, 1e-12);
  }
  EXPECT_NEAR(expansion_function(twice, 0.35).value(), 2 * 0.35 - 0.1, 1e-12);
  EXPECT_NEAR(lipschitz_constant(twice).value(), 2.0, 1e-12);
  EXPECT_NEAR(lipschitz_constant(id).value(), 1.0, 1e-12);
}

TEST(DeltaCover, IdentityIsBlockIdentity) {
  auto s = line_space(5, 0.2, 2);
  auto v = delta_cover(CoarseMap::identity(s), 0.01);
  EXPECT_EQ(max_abs(v.matrix - Matrix::Identity(10, 10)), 0.0);
  EXPECT_LT(v.support_excess(), 0.0);
}

TEST(DeltaCover, StackedFibers) {
  auto src = line_space(2, 0.1, 1);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(1, 1);
  auto tgt = share(SampledSpace::from_distances(d, {2}));
  auto v = delta_cover(CoarseMap(src, tgt, {0, 0}), 0.5);
  EXPECT_EQ(max_abs(v.matrix - Matrix::Identity(2, 2)), 0.0);
  EXPECT_EQ(v.isometry_defect(), 0.0);
  auto small = share(SampledSpace::from_distances(d, {1}));
  try {
    delta_cover(CoarseMap(src, small, {0, 0}), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::capacity);
    EXPECT_EQ(e.index().value_or(99), 1u);
  }
}

TEST(DeltaCover, RandomSupportScan) {
  auto x = build_complex({{0, 1, 2}, {2, 3}});
  auto src = share(discretize(x, 0.4, 2));
  auto tgt = share(discretize(x, 0.4, 3));
  Rng rng(71);
  for (int t = 0; t < 10; ++t) {
    std::uniform_int_distribution<std::size_t> pick(0, tgt->size() - 1);
    std::vector<std::size_t> a(src->size());
    for (auto& y : a) y = pick(rng);
    const double delta = 0.45;
    CoarseMap f(src, tgt, a);
    CoverIsometry v = [&] {
      try {
        return delta_cover(f, delta);
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::capacity);
        return delta_cover(f, 10.0);
      }
    }();
    EXPECT_LT(v.isometry_defect(), 1e-12);
    for (Eigen::Index c = 0; c < v.matrix.cols(); ++c) {
      int ones = 0;
      for (Eigen::Index r = 0; r < v.matrix.rows(); ++r) {
        if (std::abs(v.matrix(r, c)) == 0.0) continue;
        ++ones;
        const auto py = tgt->point_of(static_cast<std::size_t>(r));
        const auto px = src->point_of(static_cast<std::size_t>(c));
        EXPECT_LT(tgt->distances()(static_cast<Eigen::Index>(py), static_cast<Eigen::Index>(a[px])), v.delta);
      }
      EXPECT_EQ(ones, 1);
    }
  }
}

TEST(Ad, IdentityAndPropagationBound) {
  auto x = build_complex({{0, 1}, {1, 2}, {2, 3}});
  auto s = share(discretize(x, 2.0 / 7 + 1e-9, 1));
  Rng rng(73);
  FiniteOperator t = random_banded(s, 2, 0.4, rng);
  auto v = delta_cover(CoarseMap::identity(s), 0.1);
  EXPECT_EQ(max_abs(ad(v, t).dense() - t.dense()), 0.0);

  // Lattice 1/14 refines lattice 1/7, so every source sample is a target sample.
  auto tgt = share(discretize(x, 2.0 / 14 + 1e-9, 2));
  std::vector<std::size_t> a(s->size());
  for (std::size_t i = 0; i < s->size(); ++i) {
    auto hit = find_sample(*tgt, s->point(i));
    ASSERT_TRUE(hit.has_value());
    a[i] = *hit;
  }
  CoarseMap f(s, tgt, a);
  for (double delta : {0.05, 0.2}) {
    auto vf = delta_cover(f, delta);
    const double r = 0.35;
    for (int trial = 0; trial < 10; ++trial) {
      FiniteOperator tt = random_banded(s, 1, r, rng);
      ASSERT_LT(propagation(tt).value(), r);
      const FiniteOperator out = ad(vf, tt);
      EXPECT_LT(propagation(out).value(), expansion_function(f, r).value() + 2 * delta);
      EXPECT_LE(opnorm(out), opnorm(tt) + 1e-12);
      FiniteOperator ss = random_banded(s, 1, r, rng);
      EXPECT_LT(max_abs(ad(vf, tt * ss).dense() - (ad(vf, tt) * ad(vf, ss)).dense()), 1e-12);
      EXPECT_LT(max_abs(ad(vf, adjoint(tt)).dense() - adjoint(ad(vf, tt)).dense()), 1e-15);
    }
    auto p = random_quasi_projection(s, 1, 0.05, 0.35, rng);
    EXPECT_NEAR(quasi_defect(Parity::even, ad(vf, p)), quasi_defect(Parity::even, p), 1e-12);
  }
}

TEST(ComposeCovers, TwoDeltaCoverOfIdentity) {
  auto t = two_scale(8, 0.1);
  const double delta = 0.06;
  auto v1 = delta_cover(t.up, delta);
  auto v2 = delta_cover(t.down, delta);
  auto v = compose(v2, v1);
  EXPECT_EQ(v.map.assignment(), CoarseMap::identity(t.a).assignment());
  // omega_down(0.06) = 0.1: neighbours at spacing 0.05 may land 0.1 apart.
  EXPECT_NEAR(v.delta, delta + 0.1, 1e-15);
  EXPECT_LT(v.support_excess(), 0.0);
  EXPECT_LT(v.isometry_defect(), 1e-12);
  EXPECT_LT(v1.isometry_defect(), 1e-12);
  EXPECT_LT(v2.isometry_defect(), 1e-12);
}

TEST(RotationHomotopy, SameCoverAndEndpoints) {
  auto x = build_complex({{0, 1}, {1, 2}});
  auto s = share(discretize(x, 0.5, 1));
  Rng rng(79);
  const QuasiParams q{0.05, 0.6};
  auto p = random_quasi_projection(s, 1, 0.02, q.r, rng);
  auto tgt = share(discretize(x, 0.5, 2));
  std::vector<std::size_t> same(s->size());
  for (std::size_t i = 0; i < same.size(); ++i) same[i] = i;
  CoarseMap f(s, tgt, same);
  const double delta = 0.3;
  auto vf = delta_cover(f, delta);
  auto rh = rotation_homotopy(vf, vf, p, q);
  EXPECT_TRUE(verify_certificate(rh.certificate).ok);

  // A second cover of the same map: fill target fibers in reverse order.
  std::vector<std::size_t> rev(s->size());
  for (std::size_t i = 0; i < rev.size(); ++i) rev[i] = rev.size() - 1 - i;
  auto vf2 = delta_cover(f, delta, rev);
  auto r2 = rotation_homotopy(vf, vf2, p, q);
  const auto rep = verify_certificate(r2.certificate);
  EXPECT_TRUE(rep.ok) << rep.reason;
  const double bound = expansion_function(f, q.r).value() + 8 * delta;
  EXPECT_NEAR(r2.certificate.params.r, bound, 1e-15);
  for (const auto& pr : rep.propagations) EXPECT_LT(pr.value(), bound);
  for (double st : r2.certificate.step_bounds) EXPECT_LE(st, q.epsilon / 15);

  const auto n = static_cast<Eigen::Index>(tgt->total_dim());
  Matrix start = Matrix::Zero(4 * n, 4 * n), finish = Matrix::Zero(4 * n, 4 * n);
  start.topLeftCorner(n, n) = vf.matrix * p.entries() * vf.matrix.adjoint();
  finish.block(n, n, n, n) = vf2.matrix * p.entries() * vf2.matrix.adjoint();
  EXPECT_LT(max_abs(r2.certificate.samples.front().dense() - start), 1e-15);
  EXPECT_LT(max_abs(r2.certificate.samples.back().dense() - finish), 1e-15);
  // The sample just before the end comes from the rotation formula.
  const auto& near_end = r2.certificate.samples[r2.certificate.samples.size() - 2];
  EXPECT_LT(distance(near_end, r2.certificate.samples.back()), q.epsilon / 15 + 1e-15);

  try {
    rotation_homotopy(vf, vf2, p, q, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::refine_needed);
  }
}

TEST(RotationHomotopy, AsymptoticInverse) {
  auto t = two_scale(6, 0.1);
  const double delta = 0.06;
  auto v21 = compose(delta_cover(t.down, delta), delta_cover(t.up, delta));
  auto vid = delta_cover(CoarseMap::identity(t.a), v21.delta);
  Rng rng(83);
  const QuasiParams q{0.08, 0.25};
  auto p = random_quasi_projection(t.a, 1, 0.03, q.r, rng);
  auto rh = rotation_homotopy(v21, vid, p, q);
  EXPECT_TRUE(verify_certificate(rh.certificate).ok);
  EXPECT_LE(rh.certificate.params.r, q.r + 32 * delta);
  // The far end is p itself in the second slot.
  const auto n = static_cast<Eigen::Index>(t.a->total_dim());
  EXPECT_LT(max_abs(rh.end.dense().block(n, n, n, n) - p.dense()), 1e-15);
}

TEST(PartitionHomotopy, Examples) {
  auto s = line_space(41, 0.025);
  std::vector<CoarseMap> constant(5, CoarseMap::identity(s));
  LipschitzHomotopy fc(constant, 1.0);
  EXPECT_EQ(partition_homotopy(fc, 0.1), (std::vector<std::size_t>{0, 4}));

  std::vector<CoarseMap> slide;
  for (int j = 0; j <= 40; ++j) slide.push_back(shift_map(s, j));
  LipschitzHomotopy fs(slide, 1.0);
  EXPECT_NEAR(displacement(slide.front(), slide.back()).value(), 1.0, 1e-12);
  const auto cut = partition_homotopy(fs, 0.3);
  // Largest admissible jump is 11 frames (0.275 < 0.3 <= 0.3).
  EXPECT_EQ(cut.size(), static_cast<std::size_t>(std::ceil(40.0 / 11.0)) + 1);
  for (std::size_t i = 0; i + 1 < cut.size(); ++i) {
    EXPECT_LT(displacement(slide[cut[i]], slide[cut[i + 1]]).value(), 0.3);
  }
  EXPECT_EQ(partition_homotopy(fs, 1.5), (std::vector<std::size_t>{0, 40}));
  try {
    partition_homotopy(fs, 0.02);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::resolution);
  }
  std::vector<std::size_t> dbl(41);
  for (std::size_t i = 0; i < 41; ++i) dbl[i] = std::min<std::size_t>(2 * i, 40);
  try {
    LipschitzHomotopy({CoarseMap(s, s, dbl)}, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain);
  }
}

TEST(HomotopyInvariance, ConstantSingleFrame) {
  auto s = line_space(6, 0.05);
  Vector psi = Vector::Zero(6);
  psi(2) = 1.0;
  psi(3) = 0.5;
  auto u = phase_unitary(s, psi, 1.0);
  LipschitzHomotopy f({CoarseMap::identity(s)}, 1.0);
  auto res = homotopy_invariance_certificate(f, u, {0.01, 0.1}, 0.02);
  EXPECT_EQ(res.partition, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(verify_certificate(res.certificate).ok);
  EXPECT_LE(res.achieved.epsilon, res.bound.epsilon);
  EXPECT_LT(res.achieved.r, res.bound.r);
}

TEST(HomotopyInvariance, SlideOnLine) {
  auto s = line_space(10, 0.04);
  auto y = line_space(10, 0.04, 2);
  Vector psi = Vector::Zero(10);
  psi(4) = 1.0;
  psi(5) = 1.0;
  auto u = phase_unitary(s, psi, 2.0);
  std::vector<CoarseMap> frames;
  for (int j = 0; j <= 3; ++j) frames.push_back(shift_map(s, y, j));
  LipschitzHomotopy f(frames, 1.0);
  const QuasiParams q{0.01, 0.05};
  const double delta = 0.05;
  auto res = homotopy_invariance_certificate(f, u, q, delta);
  EXPECT_EQ(res.partition.size(), 4u);
  const auto rep = verify_certificate(res.certificate);
  EXPECT_TRUE(rep.ok) << rep.reason;
  EXPECT_NEAR(res.bound.epsilon, 21 * q.epsilon, 1e-15);
  EXPECT_NEAR(res.bound.r, 5 * (q.r + 4 * delta), 1e-15);
  EXPECT_NEAR(res.bound_2delta.r, 5 * (q.r + 2 * delta), 1e-15);
  EXPECT_LE(res.achieved.epsilon, res.bound.epsilon);
  EXPECT_LT(res.achieved.r, res.bound.r);
  EXPECT_EQ(res.stages.size(), res.partition.size() + 1);

  // Endpoints: stabilized ad(V_f, u) and ad(V_g, u).
  const int k2 = 2 * static_cast<int>(res.partition.size());
  EXPECT_EQ(res.certificate.samples.front().amplification(), k2);
  auto vf = delta_cover(frames.front(), delta);
  auto vg = delta_cover(frames.back(), delta);
  const auto n = static_cast<Eigen::Index>(y->total_dim());
  EXPECT_LT(max_abs(res.certificate.samples.front().dense().topLeftCorner(n, n) - ad(vf, u).dense()), 1e-14);
  EXPECT_LT(max_abs(res.certificate.samples.back().dense().topLeftCorner(n, n) - ad(vg, u).dense()), 1e-14);
}

TEST(HomotopyInvariance, RejectsNonUnitized) {
  auto s = line_space(3, 0.1);
  LipschitzHomotopy f({CoarseMap::identity(s)}, 1.0);
  try {
    homotopy_invariance_certificate(f, FiniteOperator::zero(s), {0.01, 0.1}, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain);
  }
}

}  // namespace
}  // namespace roe
