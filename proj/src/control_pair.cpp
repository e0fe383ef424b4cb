#include "roe/control_pair.hpp"

#include <algorithm>
#include <cmath>

#include "roe/errors.hpp"
#include "roe/format.hpp"

namespace roe {

ControlPair::ControlPair(double lambda, std::vector<double> grid, std::vector<double> values)
    : lambda_(lambda), grid_(std::move(grid)), values_(std::move(values)) {
  if (!(lambda_ >= 1.0) || !std::isfinite(lambda_)) throw Error(Errc::domain, "lambda must be >= 1");
  if (grid_.empty() || grid_.size() != values_.size()) throw Error(Errc::domain, "grid/values mismatch");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!(grid_[i] > 0.0) || !(grid_[i] < domain_end())) {
      throw Error(Errc::domain, "grid point outside (0, 1/(4 lambda))", i);
    }
    if (i > 0 && !(grid_[i] > grid_[i - 1])) throw Error(Errc::domain, "grid not increasing", i);
    if (!(values_[i] >= 1.0) || !std::isfinite(values_[i])) throw Error(Errc::domain, "h value must be >= 1", i);
  }
}

std::vector<double> control_grid(double lambda, std::size_t points) {
  std::vector<double> g(points);
  const double end = 0.25 / lambda;
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = end * std::pow(10.0, -4.0 + 4.0 * static_cast<double>(i) / static_cast<double>(points));
  }
  return g;
}

ControlPair ControlPair::tabulate(double lambda, const std::function<double(double)>& h, std::size_t points) {
  auto g = control_grid(lambda, points);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = h(g[i]);
  return ControlPair(lambda, std::move(g), std::move(v));
}

double ControlPair::h(double eps) const {
  if (!(eps > 0.0) || !(eps < domain_end())) {
    throw Error(Errc::domain, "epsilon " + format_real(eps) + " outside (0, " + format_real(domain_end()) + ")");
  }
  if (grid_.size() == 1) return values_[0];
  auto it = std::lower_bound(grid_.begin(), grid_.end(), eps);
  if (it != grid_.end() && *it == eps) return values_[static_cast<std::size_t>(it - grid_.begin())];
  std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
  hi = std::clamp<std::size_t>(hi, 1, grid_.size() - 1);
  const std::size_t lo = hi - 1;
  const double x0 = std::log(grid_[lo]), x1 = std::log(grid_[hi]);
  const double y0 = std::log(values_[lo]), y1 = std::log(values_[hi]);
  const double y = y0 + (std::log(eps) - x0) * (y1 - y0) / (x1 - x0);
  return std::max(1.0, std::exp(y));
}

std::vector<double> ControlPair::dominating() const {
  std::vector<double> out(values_);
  for (std::size_t i = out.size(); i-- > 1;) out[i - 1] = std::max(out[i - 1], out[i]);
  return out;
}

ControlPair compose_control_pairs(const ControlPair& a, const ControlPair& b) {
  const double lambda = a.lambda() * b.lambda();
  if (0.25 / lambda <= b.grid().front()) {
    throw Error(Errc::domain_collapse, "composed domain (0, 1/(4 lambda lambda')) misses the tabulated grid");
  }
  auto g = control_grid(lambda, a.grid().size());
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = a.h(b.lambda() * g[i]) * b.h(g[i]);
  return ControlPair(lambda, std::move(g), std::move(v));
}

QuasiParams apply_control_pair(const ControlPair& a, const QuasiParams& q) {
  return {a.lambda() * q.epsilon, a.h(q.epsilon) * q.r};
}

QuasiParams relaxed_params(const ControlPair& relax, const ControlPair& morphism, const QuasiParams& q) {
  const double alpha = relax.lambda();
  const double lambda = morphism.lambda();
  const double hp = morphism.h(alpha * q.epsilon) * relax.h(q.epsilon) / relax.h(lambda * q.epsilon);
  return {lambda * q.epsilon, hp * q.r};
}

}  // namespace roe
