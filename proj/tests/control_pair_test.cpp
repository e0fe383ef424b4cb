#include <gtest/gtest.h>

#include <cmath>

#include "roe/control_pair.hpp"
#include "roe/errors.hpp"

namespace roe {
namespace {

ControlPair power_law(double lambda, double c, double p) {
  return ControlPair::tabulate(lambda, [=](double e) { return c * std::pow(e * 4 * lambda, -p); });
}

ControlPair constant(double lambda, double v) {
  return ControlPair::tabulate(lambda, [=](double) { return v; });
}

TEST(ControlPair, GridLayout) {
  auto a = constant(2.0, 3.0);
  ASSERT_EQ(a.grid().size(), 64u);
  EXPECT_NEAR(a.grid().front(), 1e-4 / 8.0, 1e-20);
  EXPECT_LT(a.grid().back(), 1.0 / 8.0);
  EXPECT_EQ(a.dominating(), a.values());
}

TEST(ControlPair, ComposeExamples) {
  auto a = constant(2.0, 2.0);
  auto b = constant(3.0, 2.0);
  auto c = compose_control_pairs(a, b);
  EXPECT_EQ(c.lambda(), 6.0);
  for (double v : c.values()) EXPECT_EQ(v, 4.0);

  auto near_id = constant(1.0 + 1e-9, 1.0 + 1e-9);
  auto x = power_law(1.5, 2.0, 0.25);
  auto y = compose_control_pairs(near_id, x);
  for (std::size_t i = 0; i < y.grid().size(); ++i) {
    EXPECT_NEAR(y.values()[i], x.h(y.grid()[i]), 1e-6 * y.values()[i]);
  }
}

TEST(ControlPair, ApplyExamples) {
  auto a = constant(2.0, 3.0);
  const auto q = apply_control_pair(a, {0.01, 0.1});
  EXPECT_NEAR(q.epsilon, 0.02, 1e-17);
  EXPECT_NEAR(q.r, 0.3, 1e-16);
  auto n = constant(1.0, 1.0);
  const auto same = apply_control_pair(n, {0.05, 0.7});
  EXPECT_EQ(same.epsilon, 0.05);
  EXPECT_EQ(same.r, 0.7);
  try {
    apply_control_pair(a, {0.2, 0.1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain);
  }
}

TEST(ControlPair, ComposedEqualsSequentialOnGrid) {
  auto a = power_law(2.0, 1.5, 0.3);
  auto b = power_law(1.5, 2.0, 0.1);
  auto ab = compose_control_pairs(a, b);
  for (double e : ab.grid()) {
    const auto direct = apply_control_pair(ab, {e, 1.0});
    const auto seq = apply_control_pair(a, apply_control_pair(b, {e, 1.0}));
    EXPECT_NEAR(direct.epsilon, seq.epsilon, 1e-12 * seq.epsilon);
    EXPECT_NEAR(direct.r, seq.r, 1e-12 * seq.r);
  }
}

TEST(ControlPair, Associativity) {
  auto a = power_law(1.2, 1.5, 0.3);
  auto b = power_law(1.5, 2.0, 0.1);
  auto c = power_law(2.0, 1.1, 0.05);
  auto left = compose_control_pairs(compose_control_pairs(a, b), c);
  auto right = compose_control_pairs(a, compose_control_pairs(b, c));
  EXPECT_NEAR(left.lambda(), right.lambda(), 1e-15);
  ASSERT_EQ(left.grid().size(), right.grid().size());
  for (std::size_t i = 0; i < left.grid().size(); ++i) {
    EXPECT_NEAR(left.grid()[i], right.grid()[i], 1e-15 * right.grid()[i]);
    EXPECT_NEAR(left.values()[i], right.values()[i], 1e-12 * right.values()[i]);
  }
  auto k1 = constant(2.0, 2.0), k2 = constant(3.0, 5.0), k3 = constant(1.5, 1.25);
  auto l2 = compose_control_pairs(compose_control_pairs(k1, k2), k3);
  auto r2 = compose_control_pairs(k1, compose_control_pairs(k2, k3));
  for (std::size_t i = 0; i < l2.values().size(); ++i) EXPECT_NEAR(l2.values()[i], r2.values()[i], 1e-12);
}

TEST(ControlPair, RelaxedParams) {
  auto h = power_law(2.0, 3.0, 0.2);
  auto k = constant(1.0, 4.0);
  const QuasiParams q{0.01, 0.5};
  const auto a = relaxed_params(k, h, q);
  EXPECT_NEAR(a.r, h.h(0.01) * 0.5, 1e-15);
  EXPECT_NEAR(a.epsilon, 0.02, 1e-17);

  auto hk = power_law(1.0, 2.0, 0.15);
  const auto b = relaxed_params(hk, hk, q);
  EXPECT_NEAR(b.r, hk.h(0.01) * hk.h(0.01) / hk.h(0.01) * 0.5, 1e-12);

  auto tab_h = power_law(2.0, 1.7, 0.25);
  auto tab_k = power_law(1.25, 1.3, 0.4);
  const auto c = relaxed_params(tab_k, tab_h, q);
  const double expect = 1.7 * std::pow(1.25 * 0.01 * 8.0, -0.25) * (1.3 * std::pow(0.01 * 5.0, -0.4)) /
                        (1.3 * std::pow(2.0 * 0.01 * 5.0, -0.4)) * 0.5;
  EXPECT_NEAR(c.r, expect, 1e-12 * expect);
}

TEST(ControlPair, DomainCollapse) {
  auto a = constant(2e4, 2.0);
  auto b = constant(1.0, 2.0);
  try {
    compose_control_pairs(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain_collapse);
  }
}

TEST(ControlPair, Validation) {
  try {
    ControlPair(0.5, {0.1}, {2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain);
  }
  try {
    ControlPair(1.0, {0.1, 0.05}, {2.0, 2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain);
  }
}

}  // namespace
}  // namespace roe
