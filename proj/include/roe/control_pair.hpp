#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "roe/controlled_k.hpp"

namespace roe {

// (lambda, h) with h tabulated on a geometric grid of (0, 1/(4 lambda)) and
// interpolated linearly in log-log coordinates (extrapolated from the end
// segments inside the domain).
class ControlPair {
 public:
  static constexpr std::size_t kGridPoints = 64;

  // Throws Error(domain) unless lambda >= 1, the grid is strictly increasing
  // inside (0, 1/(4 lambda)) and every value is finite and >= 1.
  ControlPair(double lambda, std::vector<double> grid, std::vector<double> values);

  static ControlPair tabulate(double lambda, const std::function<double(double)>& h,
                              std::size_t points = kGridPoints);

  double lambda() const { return lambda_; }
  double domain_end() const { return 0.25 / lambda_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

  // Error(domain) outside (0, 1/(4 lambda)).
  double h(double eps) const;

  // Smallest non-increasing function dominating h on the grid.
  std::vector<double> dominating() const;

 private:
  double lambda_;
  std::vector<double> grid_;
  std::vector<double> values_;
};

// eps_i = 1/(4 lambda) * 10^(-4 + 4 i / points), i = 0 .. points-1.
std::vector<double> control_grid(double lambda, std::size_t points = ControlPair::kGridPoints);

// (lambda a.lambda, eps -> a.h(b.lambda eps) * b.h(eps)): a applied after b.
// Error(domain_collapse) when 1/(4 lambda a.lambda) <= b.grid().front().
ControlPair compose_control_pairs(const ControlPair& a, const ControlPair& b);

// (lambda eps, h(eps) r).
QuasiParams apply_control_pair(const ControlPair& a, const QuasiParams& q);

// (lambda eps, h'(eps) r) with h'(eps) = h(alpha eps) k(eps) / k(lambda eps),
// where relax = (alpha, k) and morphism = (lambda, h).
QuasiParams relaxed_params(const ControlPair& relax, const ControlPair& morphism, const QuasiParams& q);

}  // namespace roe
