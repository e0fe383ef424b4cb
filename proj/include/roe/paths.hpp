#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roe/controlled_k.hpp"
#include "roe/operator.hpp"

namespace roe {

// Path contexts accept (eps, r) only for eps < 1/8.
inline constexpr double kPathEpsilonGate = 1.0 / 8.0;

// Operator path sampled at times 1 = t_0 < t_1 < ... <= T.
class PathOperator {
 public:
  // Throws Error(domain) when times do not start at 1 or are not strictly
  // increasing, Error(shape_mismatch) when sizes or spaces disagree, and
  // Error(domain) when a consecutive gap exceeds a given modulus. Without a
  // modulus the max consecutive gap is recorded.
  PathOperator(std::vector<double> times, std::vector<FiniteOperator> values,
               std::optional<double> modulus = std::nullopt);

  const std::vector<double>& times() const { return times_; }
  const std::vector<FiniteOperator>& values() const { return values_; }
  double modulus() const { return modulus_; }
  double horizon() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }

  // Sample index of an exact time.
  std::optional<std::size_t> find(double t) const;

 private:
  std::vector<double> times_;
  std::vector<FiniteOperator> values_;
  double modulus_ = 0.0;
};

// Smallest sampled time N with prop(P(t)) < r for every sampled t >= N.
// Error(no_decay) when even the last sample fails.
double eventual_propagation(const PathOperator& p, double r, double tau = kDefaultTau);

// t -> P(N + t - 1) on the samples t >= N. Error(out_of_range) unless N is a
// sampled time.
PathOperator trim(const PathOperator& p, double n);

// Stored sample at t; with `interpolate`, the linear blend of the neighbors
// for t in (1, T). Error(out_of_range) otherwise.
FiniteOperator evaluate(const PathOperator& p, double t, bool interpolate = false);

// (eps + 5 modulus, r): parameters of every linear interpolant when each
// sample is an (eps, r)-quasi-element. Error(domain) unless eps < 1/8.
QuasiParams interpolated_params(const PathOperator& p, const QuasiParams& q);

struct PathCheck {
  bool ok = false;
  double gate = kPathEpsilonGate;
  std::vector<QuasiWitness> samples;
  std::optional<std::size_t> bad_sample;
  std::string reason;
};

// Quasi test of every sample at q. Error(domain) unless eps < 1/8.
PathCheck check_path(const PathOperator& p, Parity parity, const QuasiParams& q, double tau = kDefaultTau);

}  // namespace roe
