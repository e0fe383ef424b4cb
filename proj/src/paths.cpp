#include "roe/paths.hpp"

#include <algorithm>
#include <cmath>

#include "roe/errors.hpp"
#include "roe/format.hpp"

namespace roe {

PathOperator::PathOperator(std::vector<double> times, std::vector<FiniteOperator> values,
                           std::optional<double> modulus)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty()) throw Error(Errc::domain, "path needs at least one sample");
  if (times_.size() != values_.size()) throw Error(Errc::shape_mismatch, "one value per time");
  if (times_.front() != 1.0) throw Error(Errc::domain, "path times must start at 1");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1]) || !std::isfinite(times_[i])) {
      throw Error(Errc::domain, "path times must be strictly increasing", i);
    }
    require_compatible(values_[0], values_[i]);
  }
  double gap = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    const double g = distance(values_[i - 1], values_[i]);
    if (modulus && g > *modulus) {
      throw Error(Errc::domain, "gap " + format_real(g) + " exceeds the modulus", i);
    }
    gap = std::max(gap, g);
  }
  modulus_ = modulus ? *modulus : gap;
  if (!(modulus_ >= 0.0)) throw Error(Errc::domain, "modulus must be nonnegative");
}

std::optional<std::size_t> PathOperator::find(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - times_.begin());
}

double eventual_propagation(const PathOperator& p, double r, double tau) {
  std::size_t n = p.size();
  while (n > 0 && propagation(p.values()[n - 1], tau) < r) --n;
  if (n == p.size()) {
    throw Error(Errc::no_decay, "propagation is not below " + format_real(r) + " by the horizon " +
                                    format_real(p.horizon()));
  }
  return p.times()[n];
}

PathOperator trim(const PathOperator& p, double n) {
  const auto idx = p.find(n);
  if (!idx) throw Error(Errc::out_of_range, "trim time " + format_real(n) + " is not sampled");
  std::vector<double> times;
  std::vector<FiniteOperator> values;
  for (std::size_t i = *idx; i < p.size(); ++i) {
    times.push_back(i == *idx ? 1.0 : p.times()[i] - n + 1.0);
    values.push_back(p.values()[i]);
  }
  return PathOperator(std::move(times), std::move(values), p.modulus());
}

FiniteOperator evaluate(const PathOperator& p, double t, bool interpolate) {
  if (const auto idx = p.find(t)) return p.values()[*idx];
  if (!interpolate || !(t > 1.0 && t < p.horizon())) {
    throw Error(Errc::out_of_range, "time " + format_real(t) + " is not sampled");
  }
  const auto hi = static_cast<std::size_t>(std::upper_bound(p.times().begin(), p.times().end(), t) -
                                           p.times().begin());
  const double t0 = p.times()[hi - 1], t1 = p.times()[hi];
  const double s = (t - t0) / (t1 - t0);
  return scale(p.values()[hi - 1], 1.0 - s) + scale(p.values()[hi], s);
}

namespace {

void gate(const QuasiParams& q) {
  if (!(q.epsilon > 0.0 && q.epsilon < kPathEpsilonGate)) {
    throw Error(Errc::domain, "path contexts need 0 < epsilon < 1/8");
  }
  if (!(q.r > 0.0)) throw Error(Errc::domain, "r must be positive");
}

}  // namespace

QuasiParams interpolated_params(const PathOperator& p, const QuasiParams& q) {
  gate(q);
  return {q.epsilon + 5.0 * p.modulus(), q.r};
}

PathCheck check_path(const PathOperator& p, Parity parity, const QuasiParams& q, double tau) {
  gate(q);
  PathCheck out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.samples.push_back(is_quasi(parity, p.values()[i], q, tau));
    if (!out.samples.back().ok && !out.bad_sample) {
      out.bad_sample = i;
      out.reason = "sample at t = " + format_real(p.times()[i]) + " fails the quasi test";
    }
  }
  out.ok = !out.bad_sample;
  return out;
}

}  // namespace roe
