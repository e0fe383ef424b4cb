#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "roe/errors.hpp"
#include "roe/geometry.hpp"

namespace roe {
namespace {

// Oracle: arc-cosine of the normalized inner product.
double acos_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return std::acos(std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0));
}

// Oracle: Floyd-Warshall over the same sample graph, built independently.
Eigen::MatrixXd floyd_oracle(const SampledSpace& s, const SimplicialComplex& x) {
  const auto n = s.size();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0;
  for (std::size_t top : x.maximal()) {
    const auto& host = x.simplices()[top];
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ci = x.simplices()[s.point(i).carrier];
      if (!std::includes(host.begin(), host.end(), ci.begin(), ci.end())) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& cj = x.simplices()[s.point(j).carrier];
        if (!std::includes(host.begin(), host.end(), cj.begin(), cj.end())) continue;
        d(i, j) = std::min(d(i, j), acos_distance(weights_on(x, s.point(i), host),
                                                  weights_on(x, s.point(j), host)));
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

std::size_t sample_at(const SampledSpace& s, const SimplicialComplex& x, Simplex carrier,
                      std::vector<double> w) {
  auto idx = find_sample(s, {x.index_of(carrier), std::move(w)});
  EXPECT_TRUE(idx.has_value());
  return idx.value_or(npos);
}

TEST(BuildComplex, PathOfTwoEdges) {
  auto x = build_complex({{0, 1}, {1, 2}});
  std::vector<Simplex> expect{{0}, {1}, {2}, {0, 1}, {1, 2}};
  EXPECT_EQ(x.simplices(), expect);
  EXPECT_EQ(x.dimension(), 1);
  EXPECT_EQ(x.maximal().size(), 2u);
}

TEST(BuildComplex, Triangle) {
  auto x = build_complex({{2, 0, 1}});
  EXPECT_EQ(x.vertices().size(), 3u);
  EXPECT_EQ(x.simplices_of_dimension(1).size(), 3u);
  EXPECT_EQ(x.simplices_of_dimension(2).size(), 1u);
  EXPECT_EQ(x.dimension(), 2);
}

TEST(BuildComplex, IsolatedPoints) {
  auto x = build_complex({{0}, {1}});
  EXPECT_EQ(x.simplices().size(), 2u);
  EXPECT_EQ(x.dimension(), 0);
}

TEST(BuildComplex, FaceClosure) {
  auto x = build_complex({{0, 1, 2, 3}, {3, 4}});
  for (const auto& s : x.simplices()) {
    for (std::size_t drop = 0; drop < s.size() && s.size() > 1; ++drop) {
      Simplex f = s;
      f.erase(f.begin() + static_cast<long>(drop));
      EXPECT_TRUE(x.contains(f));
    }
  }
  EXPECT_EQ(x.simplices().size(), 15u + 1u + 1u);
  EXPECT_EQ(x.dimension(), 3);
}

TEST(BuildComplex, DuplicateVertexRejected) {
  try {
    build_complex({{0, 1, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::malformed_input);
  }
}

TEST(SimplexCenter, Examples) {
  auto x = build_complex({{0, 1, 2}});
  auto e = simplex_center(x, {1, 0});
  EXPECT_EQ(e.weights, (std::vector<double>{0.5, 0.5}));
  auto t = simplex_center(x, {0, 1, 2});
  EXPECT_EQ(t.weights, (std::vector<double>(3, 1.0 / 3.0)));
  auto v = simplex_center(x, {0});
  EXPECT_EQ(v.weights, (std::vector<double>{1.0}));
  try {
    simplex_center(x, {0, 3});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::unknown_simplex);
  }
}

TEST(SphericalMetric, CenterDistances) {
  // Center to vertex: pi/4 on an edge, acos(1/sqrt 3) on a triangle.
  EXPECT_NEAR(spherical_distance({0.5, 0.5}, {1.0, 0.0}), std::numbers::pi / 4, 1e-15);
  EXPECT_NEAR(spherical_distance({1, 1, 1}, {1, 0, 0}), std::acos(1 / std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(spherical_distance({1, 0}, {0, 1}), std::numbers::pi / 2, 1e-15);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    EXPECT_NEAR(spherical_distance(a, b), acos_distance(a, b), 1e-7);
  }
}

TEST(Discretize, EdgeMatchesExactArcLength) {
  auto x = build_complex({{0, 1}});
  auto s = discretize(x, 0.5, 1);
  sample_at(s, x, {0}, {1.0});
  sample_at(s, x, {1}, {1.0});
  sample_at(s, x, {0, 1}, {0.5, 0.5});
  const Simplex edge{0, 1};
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double exact = acos_distance(weights_on(x, s.point(i), edge), weights_on(x, s.point(j), edge));
      EXPECT_NEAR(s.dist(i, j).value(), exact, 1e-12);
    }
  }
  // Adjacent samples along the edge are within the mesh.
  auto order = std::vector<std::pair<double, std::size_t>>{};
  for (std::size_t i = 0; i < s.size(); ++i) order.emplace_back(weights_on(x, s.point(i), edge)[1], i);
  std::sort(order.begin(), order.end());
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    EXPECT_LE(s.dist(order[k].second, order[k + 1].second).value(), 0.5);
  }
}

TEST(Discretize, DisconnectedIsInfinite) {
  auto x = build_complex({{0}, {1}});
  auto s = discretize(x, 0.1, 1);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.dist(0, 1).is_infinite());
  EXPECT_EQ(s.dist(0, 0).value(), 0.0);
}

TEST(Discretize, CoarseMeshGivesVerticesAndCenters) {
  auto x = build_complex({{0, 1, 2}, {2, 3}});
  auto s = discretize(x, 2.0, 1);
  EXPECT_EQ(s.size(), x.simplices().size());
  for (const auto& sigma : x.simplices()) {
    EXPECT_TRUE(find_sample(s, simplex_center(x, sigma)).has_value());
  }
}

TEST(Discretize, CoversAtMesh) {
  auto x = build_complex({{0, 1, 2}});
  const double mesh = 0.3;
  auto s = discretize(x, mesh, 1);
  const Simplex host{0, 1, 2};
  std::vector<std::vector<double>> coords;
  for (const auto& p : s.points()) coords.push_back(weights_on(x, p, host));
  std::mt19937_64 rng(11);
  std::exponential_distribution<double> e(1.0);
  double worst = 0;
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> q{e(rng), e(rng), e(rng)};
    double best = 1e9;
    for (const auto& c : coords) best = std::min(best, acos_distance(q, c));
    worst = std::max(worst, best);
  }
  EXPECT_LE(worst, mesh);
}

TEST(Discretize, GeodesicsMatchFloydWarshallOracle) {
  auto x = build_complex({{0, 1, 2}, {1, 2, 3}, {3, 4}});
  auto s = discretize(x, 0.7, 2);
  auto oracle = floyd_oracle(s, x);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_NEAR(s.dist(i, j).value(), oracle(i, j), 1e-12);
  EXPECT_LE(s.triangle_defect(), 1e-9);
  for (int d : s.internal_dims()) EXPECT_EQ(d, 2);
}

TEST(Discretize, RefinementIsMonotone) {
  auto x = build_complex({{0, 1, 2}, {2, 3}, {3, 0}});
  auto coarse = discretize(x, 0.8, 1);
  auto fine = discretize(x, 0.4, 1);
  std::size_t shared = 0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    auto fi = find_sample(fine, coarse.point(i));
    if (!fi) continue;
    for (std::size_t j = 0; j < coarse.size(); ++j) {
      auto fj = find_sample(fine, coarse.point(j));
      if (!fj) continue;
      ++shared;
      EXPECT_LE(fine.dist(*fi, *fj).value(), coarse.dist(i, j).value() + 1e-9);
    }
  }
  EXPECT_GT(shared, 0u);
}

TEST(SampledSpace, FromDistancesChecksTriangle) {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 3, 1, 0, 1, 3, 1, 0;
  try {
    SampledSpace::from_distances(d, {1, 1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::malformed_input);
  }
  d(0, 2) = d(2, 0) = 2;
  auto s = SampledSpace::from_distances(d, {1, 2, 1});
  EXPECT_EQ(s.total_dim(), 4u);
  EXPECT_EQ(s.offset(2), 3u);
  EXPECT_EQ(s.point_of(2), 1u);
}

TEST(Neighborhood, Basics) {
  auto x = build_complex({{0, 1}, {1, 2}});
  auto s = discretize(x, 0.3, 1);
  SubsetMask a(s.size(), false);
  a[2] = true;
  a[5] = true;
  EXPECT_EQ(neighborhood(s, a, 0.0), a);
  EXPECT_EQ(neighborhood(s, mask_all(s.size()), 1.7), mask_all(s.size()));
}

TEST(Neighborhood, IntervalBruteForce) {
  const double h = 0.1;
  const int n = 10;
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = std::abs(i - j) * h;
  auto s = SampledSpace::from_distances(d, std::vector<int>(n, 1));
  SubsetMask a(n, false);
  a[0] = true;
  auto nb = neighborhood(s, a, 2.5 * h);
  for (int i = 0; i < n; ++i) EXPECT_EQ(nb[i], d(i, 0) <= 2.5 * h) << i;
  EXPECT_GE(mask_count(nb), 3u);
  EXPECT_LE(mask_count(nb), 4u);
}

TEST(Decompose, SingleEdge) {
  auto x = build_complex({{0, 1}});
  auto s = discretize(x, 0.05, 1);
  auto d = decompose(s, x);
  const auto c = sample_at(s, x, {0, 1}, {0.5, 0.5});
  EXPECT_TRUE(d.x1[c]);
  EXPECT_FALSE(d.x2[c]);
  const auto v0 = sample_at(s, x, {0}, {1.0});
  const auto v1 = sample_at(s, x, {1}, {1.0});
  EXPECT_TRUE(d.x2[v0]);
  EXPECT_TRUE(d.x2[v1]);
  EXPECT_FALSE(d.x1[v0]);
  EXPECT_EQ(mask_or(d.x1, d.x2), mask_all(s.size()));
  auto cd = center_distances(s, x);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool band = cd[i] >= kInnerThreshold && cd[i] <= kOuterThreshold;
    EXPECT_EQ(d.x1[i] && d.x2[i], band) << i;
  }
}

TEST(Decompose, TriangleVerticesInOuterPiece) {
  auto x = build_complex({{0, 1, 2}});
  auto s = discretize(x, 0.2, 1);
  auto d = decompose(s, x);
  for (int v = 0; v < 3; ++v) {
    const auto i = sample_at(s, x, {v}, {1.0});
    EXPECT_TRUE(d.x2[i]);
    EXPECT_NEAR(center_distance(s, x, x.index_of({0, 1, 2}), i), std::acos(1 / std::sqrt(3.0)), 1e-15);
  }
  EXPECT_EQ(mask_or(d.x1, d.x2), mask_all(s.size()));
}

TEST(Decompose, DimensionZeroUnsupported) {
  auto x = build_complex({{0}, {1}});
  auto s = discretize(x, 0.5, 1);
  try {
    decompose(s, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_decomposition);
  }
}

TEST(Retract, FixedPointsAndRadialProjection) {
  auto x = build_complex({{0, 1}});
  auto s = discretize(x, 0.5, 1);  // lattice step 1/4
  auto all = mask_all(s.size());
  auto cluster = retract_onto_pieces(s, x, all, RetractionKind::cluster_to_centers);
  const auto c = sample_at(s, x, {0, 1}, {0.5, 0.5});
  EXPECT_EQ(cluster.at(c), c);

  SubsetMask no_center = all;
  no_center[c] = false;
  auto collapse = retract_onto_pieces(s, x, no_center, RetractionKind::collapse_to_skeleton);
  const auto v0 = sample_at(s, x, {0}, {1.0});
  const auto v1 = sample_at(s, x, {1}, {1.0});
  EXPECT_EQ(collapse.at(v0), v0);
  EXPECT_EQ(collapse.at(v1), v1);
  // (3/4, 1/4): ray from (1/2, 1/2) exits at (1, 0).
  const auto q = sample_at(s, x, {0, 1}, {0.75, 0.25});
  EXPECT_EQ(collapse.at(q), v0);
  EXPECT_EQ(collapse.at(sample_at(s, x, {0, 1}, {0.25, 0.75})), v1);
  try {
    collapse.at(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain);
  }
}

TEST(Retract, ClusterDisplacementBound) {
  auto x = build_complex({{0, 1, 2}, {1, 2, 3}});
  const double mesh = 0.15;
  auto s = discretize(x, mesh, 1);
  auto d = decompose(s, x);
  auto nb = neighborhood(s, d.x1, 0.1);
  auto t = retract_onto_pieces(s, x, nb, RetractionKind::cluster_to_centers);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!nb[i]) continue;
    EXPECT_LE(s.dist(i, t.at(i)).value(), 0.55 + 0.1 + mesh);
  }
}

TEST(CyclicOrder, FourCycle) {
  auto x = build_complex({{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  auto s = discretize(x, 0.25, 1);
  ASSERT_EQ(s.size(), 32u);
  auto order = cyclic_order(s, x);
  ASSERT_EQ(order.size(), 32u);
  EXPECT_EQ(order[0], sample_at(s, x, {0}, {1.0}));
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto a = order[k], b = order[(k + 1) % order.size()];
    double nearest = 1e9;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (j != a) nearest = std::min(nearest, s.dist(a, j).value());
    EXPECT_LE(s.dist(a, b).value(), 2.5 * nearest);
    EXPECT_LT(s.dist(a, b).value(), 0.25);
  }
}

}  // namespace
}  // namespace roe
