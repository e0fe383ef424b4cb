#include "roe/mv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roe/errors.hpp"
#include "roe/random.hpp"

namespace roe {

namespace {

void require_mask(const SampledSpace& s, const SubsetMask& m, const char* what) {
  if (m.size() != s.size()) throw Error(Errc::shape_mismatch, std::string(what) + " mask size does not match space");
}

// First point pair (y, x) outside rows x cols carrying a block above tau.
std::optional<std::pair<std::size_t, std::size_t>> outside(const FiniteOperator& t, const SubsetMask& rows,
                                                           const SubsetMask& cols, double tau) {
  const RealMatrix b = block_max_modulus(t);
  for (Eigen::Index x = 0; x < b.cols(); ++x) {
    for (Eigen::Index y = 0; y < b.rows(); ++y) {
      if (b(y, x) > tau && (!rows[static_cast<std::size_t>(y)] || !cols[static_cast<std::size_t>(x)])) {
        return std::pair{static_cast<std::size_t>(y), static_cast<std::size_t>(x)};
      }
    }
  }
  return std::nullopt;
}

void check_partition(const SampledSpace& s, const TripleMasks& m) {
  require_mask(s, m.first, "first");
  require_mask(s, m.overlap, "overlap");
  require_mask(s, m.second, "second");
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int c = int(m.first[i]) + int(m.overlap[i]) + int(m.second[i]);
    if (c != 1) throw Error(Errc::shape_mismatch, "region masks must partition the points", i);
  }
}

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

TripleMasks triple_masks(const SubsetMask& a, const SubsetMask& b) {
  if (a.size() != b.size()) throw Error(Errc::shape_mismatch, "mask sizes differ");
  return {mask_minus(a, b), mask_and(a, b), mask_minus(b, a)};
}

double SplitResult::coercity() const { return norm == 0.0 ? 0.0 : std::max(norm1, norm2) / norm; }

SplitResult coercive_split(const FiniteOperator& x, const TripleMasks& pi, double tau) {
  const SampledSpace& s = x.space();
  check_partition(s, pi);
  const RealMatrix b = block_max_modulus(x);
  for (std::size_t c = 0; c < s.size(); ++c) {
    for (std::size_t r = 0; r < s.size(); ++r) {
      const bool corner = (pi.first[r] && pi.second[c]) || (pi.second[r] && pi.first[c]);
      if (corner && b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) > tau) {
        throw Error(Errc::propagation_violation,
                    "block (" + std::to_string(r) + ", " + std::to_string(c) + ") joins the outer regions", r);
      }
    }
  }
  const SubsetMask left = mask_or(pi.first, pi.overlap);
  const SubsetMask right = mask_or(pi.overlap, pi.second);
  FiniteOperator x1 = restrict(x, left, left);
  FiniteOperator x2 = restrict(x, pi.second, right) + restrict(x, pi.overlap, pi.second);
  SplitResult out{x1, x2};
  out.norm = opnorm(x);
  out.norm1 = opnorm(out.x1);
  out.norm2 = opnorm(out.x2);
  return out;
}

double CiaResult::coercity() const { return gap == 0.0 ? 0.0 : std::max(x_dist, y_dist) / gap; }

CiaResult cia_midpoint(const FiniteOperator& x, const FiniteOperator& y, const TripleMasks& sigma, double eps,
                       double tau) {
  require_compatible(x, y);
  const SampledSpace& s = x.space();
  check_partition(s, sigma);
  const SubsetMask left = mask_or(sigma.first, sigma.overlap);
  const SubsetMask right = mask_or(sigma.overlap, sigma.second);
  if (auto bad = outside(x, left, left, tau)) {
    throw Error(Errc::support_violation, "x reaches the second region", bad->first);
  }
  if (auto bad = outside(y, right, right, tau)) {
    throw Error(Errc::support_violation, "y reaches the first region", bad->first);
  }
  CiaResult out{scale(restrict(x, sigma.overlap, sigma.overlap) + restrict(y, sigma.overlap, sigma.overlap), 0.5)};
  out.gap = distance(x, y);
  if (!(out.gap <= eps * (1.0 + 1e-12))) throw Error(Errc::domain, "|x - y| exceeds epsilon");
  out.x_dist = distance(x, out.z);
  out.y_dist = distance(y, out.z);
  return out;
}

ContainmentReport neighborhood_containment(const SpacePtr& space, const SubsetMask& delta, const SubsetMask& a,
                                           double r, std::size_t trials, std::uint64_t seed, double tau) {
  const SampledSpace& s = *space;
  require_mask(s, delta, "delta");
  require_mask(s, a, "neighborhood");
  if (!(r > 0.0)) throw Error(Errc::domain, "r must be positive");
  ContainmentReport rep;
  rep.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const FiniteOperator d = restrict(random_banded(space, 1, r, rng), delta, delta);
    const FiniteOperator a1 = random_banded(space, 1, 5.0 * r, rng);
    const FiniteOperator a2 = random_banded(space, 1, 5.0 * r, rng);
    const std::pair<const char*, FiniteOperator> products[] = {
        {"a*d", a1 * d}, {"d*a", d * a2}, {"a*d*a'", a1 * d * a2}};
    for (const auto& [name, prod] : products) {
      const RealMatrix b = block_max_modulus(prod);
      const double cut = tau * std::max(1.0, b.maxCoeff());
      bool first = true;
      for (Eigen::Index x = 0; x < b.cols(); ++x) {
        for (Eigen::Index y = 0; y < b.rows(); ++y) {
          if (b(y, x) <= cut) continue;
          const auto yi = static_cast<std::size_t>(y), xi = static_cast<std::size_t>(x);
          rep.worst_distance = max(rep.worst_distance, max(s.dist_to_set(yi, a), s.dist_to_set(xi, a)));
          if ((!a[yi] || !a[xi]) && first) {
            rep.violations.push_back({t, name, yi, xi});
            first = false;
          }
        }
      }
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

MvPair mv_pair(const SampledSpace& s, const SimplicialComplex& x, double r) {
  if (!(r > 0.0 && r <= kMaxMvDegree)) throw Error(Errc::domain, "degree must lie in (0, 1/50]");
  const Decomposition d = decompose(s, x);
  MvPair p;
  p.delta1 = d.x1;
  p.delta2 = d.x2;
  p.a1 = neighborhood(s, d.x1, kNeighborhoodRadius);
  p.a2 = neighborhood(s, d.x2, kNeighborhoodRadius);
  p.r = r;
  return p;
}

namespace {

// Hill climb on x supported near the overlap, maximizing the split coercity.
double adversarial_split(const SpacePtr& space, const TripleMasks& pi, double s, Rng& rng) {
  const SubsetMask zone = neighborhood(*space, pi.overlap, 2.0 * s);
  auto draw = [&] { return restrict(random_banded(space, 1, s, rng), zone, zone); };
  FiniteOperator x = draw();
  double best = coercive_split(x, pi).coercity();
  for (int it = 0; it < 60; ++it) {
    const FiniteOperator cand = x + scale(draw(), 0.3);
    const double c = coercive_split(cand, pi).coercity();
    if (c > best) {
      best = c;
      x = cand;
    }
  }
  return best;
}

}  // namespace

MvReport verify_weak_mv_pair(const SpacePtr& space, const MvPair& p, std::size_t trials, std::uint64_t seed,
                             double tau) {
  const SampledSpace& s = *space;
  for (const auto* m : {&p.delta1, &p.delta2, &p.a1, &p.a2}) require_mask(s, *m, "pair");
  MvReport rep;
  rep.trials = trials;
  if (!mask_subset(p.delta1, p.a1) || !mask_subset(p.delta2, p.a2)) {
    rep.reason = "Delta_i is not inside A_i";
    return rep;
  }
  const TripleMasks pi = triple_masks(p.delta1, p.delta2);
  const double fractions[] = {0.25, 0.5, 0.75, 1.0};
  for (double f : fractions) rep.rows.push_back({f * p.r});
  const SubsetMask a12 = mask_and(p.a1, p.a2);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t row = t % rep.rows.size();
    const double sc = rep.rows[row].s;
    Rng rng(derive_seed(seed, t));
    const int k = t < rep.rows.size() ? 2 : 1;
    const FiniteOperator x = random_banded(space, k, sc, rng);
    const SplitResult sp = coercive_split(x, pi, tau);
    const double rec = distance(x, sp.x1 + sp.x2);
    const FiniteOperator w = restrict(random_banded(space, k, sc, rng), a12, a12);
    const FiniteOperator xa = w + scale(restrict(random_banded(space, k, sc, rng), p.a1, p.a1), 0.1);
    const FiniteOperator ya = w + scale(restrict(random_banded(space, k, sc, rng), p.a2, p.a2), 0.1);
    const TripleMasks sigma = triple_masks(neighborhood(s, p.delta1, kNeighborhoodRadius + sc),
                                           neighborhood(s, p.delta2, kNeighborhoodRadius + sc));
    const CiaResult cia = cia_midpoint(xa, ya, sigma, distance(xa, ya), tau);
    MvScaleRow& r = rep.rows[row];
    r.split_coercity = std::max(r.split_coercity, sp.coercity());
    r.cia_coercity = std::max(r.cia_coercity, cia.coercity());
    r.worst_reconstruction = std::max(r.worst_reconstruction, rec);
  }
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    Rng rng(derive_seed(seed, trials + i));
    rep.adversarial_coercity = std::max(rep.adversarial_coercity, adversarial_split(space, pi, rep.rows[i].s, rng));
  }
  for (const auto& r : rep.rows) {
    rep.split_coercity = std::max(rep.split_coercity, r.split_coercity);
    rep.cia_coercity = std::max(rep.cia_coercity, r.cia_coercity);
    rep.worst_reconstruction = std::max(rep.worst_reconstruction, r.worst_reconstruction);
  }
  const auto c1 = neighborhood_containment(space, p.delta1, p.a1, p.r, 2, derive_seed(seed, ~0ull), tau);
  const auto c2 = neighborhood_containment(space, p.delta2, p.a2, p.r, 2, derive_seed(seed, ~1ull), tau);
  rep.containment_ok = c1.ok && c2.ok;
  const double worst = std::max({rep.split_coercity, rep.cia_coercity, rep.adversarial_coercity});
  if (worst > p.coercity) {
    rep.reason = "measured coercity above " + std::to_string(p.coercity);
  } else if (!rep.containment_ok) {
    rep.reason = "neighborhood products leave A_i";
  } else if (rep.worst_reconstruction > 1e-14) {
    rep.reason = "split does not reconstruct x";
  } else {
    rep.ok = true;
  }
  return rep;
}

CutFunction::CutFunction(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) throw Error(Errc::domain, "cut value outside [0, 1]", i);
  }
}

CutFunction CutFunction::from_decomposition(const SampledSpace& s, const SimplicialComplex& x) {
  const std::vector<double> cd = center_distances(s, x);
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    v[i] = smoothstep((kOuterThreshold - cd[i]) / (kOuterThreshold - kInnerThreshold));
  }
  return CutFunction(std::move(v));
}

CutFunction CutFunction::upper_arc(const std::vector<std::size_t>& order, double width) {
  if (!(width > 0.0)) throw Error(Errc::domain, "arc width must be positive");
  const std::size_t n = order.size();
  std::vector<double> v(n, -1.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (order[j] >= n || v[order[j]] >= 0.0) throw Error(Errc::shape_mismatch, "order must list every point once");
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    v[order[j]] = smoothstep((std::sin(th) + width) / (2.0 * width));
  }
  return CutFunction(std::move(v));
}

double cut_variation(const SampledSpace& s, const CutFunction& phi, double r) {
  if (phi.size() != s.size()) throw Error(Errc::shape_mismatch, "cut function size does not match space");
  double v = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (s.distances()(i, j) < r) v = std::max(v, std::abs(phi[i] - phi[j]));
    }
  }
  return v;
}

ClutchingResult clutching_projection(const FiniteOperator& u, const CutFunction& phi, double tau) {
  const SampledSpace& s = u.space();
  if (phi.size() != s.size()) throw Error(Errc::shape_mismatch, "cut function size does not match space");
  const Matrix ud = u.dense();
  const Eigen::Index n = ud.rows();
  const auto dim = static_cast<Eigen::Index>(s.total_dim());
  RealVector c(n), sn(n), ph(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ph(i) = phi[s.point_of(static_cast<std::size_t>(i % dim))];
    const double th = 0.5 * std::numbers::pi * ph(i);
    c(i) = std::cos(th);
    sn(i) = std::sin(th);
  }
  // W diag(1, 0) W* = X X* with X = [C u C + S^2; S u C - C S].
  Matrix x(2 * n, n);
  const Matrix uc = ud * c.asDiagonal();
  x.topRows(n) = c.asDiagonal() * uc;
  x.topRows(n).diagonal() += (sn.array() * sn.array()).matrix().cast<Complex>();
  x.bottomRows(n) = sn.asDiagonal() * uc;
  x.bottomRows(n).diagonal() -= (c.array() * sn.array()).matrix().cast<Complex>();
  Matrix p = x * x.adjoint();
  p = (p + p.adjoint()).eval() * 0.5;

  ClutchingResult out{FiniteOperator(u.space_ptr(), 2 * u.amplification(), std::move(p))};
  const Matrix& pm = out.p.entries();
  out.defect = spectral_norm(pm * pm - pm);
  const Matrix id = Matrix::Identity(n, n);
  out.left_defect = spectral_norm(ud.adjoint() * ud - id);
  out.right_defect = spectral_norm(ud * ud.adjoint() - id);
  out.bound = (1.0 + out.left_defect) * out.left_defect;
  out.commutator = spectral_norm(ud * ph.asDiagonal() - ph.asDiagonal() * ud);
  out.propagation = propagation(out.p, tau);
  out.propagation_bound = 2.0 * propagation(u, tau);
  return out;
}

std::vector<SubsetMask> cut_regions(const SampledSpace& s, const CutFunction& phi, double radius) {
  if (phi.size() != s.size()) throw Error(Errc::shape_mismatch, "cut function size does not match space");
  const auto& d = s.distances();
  const std::size_t n = s.size();
  SubsetMask cut(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (d(i, j) <= radius && std::abs(phi[i] - phi[j]) > 1e-12) cut[i] = true;
    }
  }
  std::vector<long> comp(n, -1);
  std::vector<SubsetMask> regions;
  for (std::size_t i = 0; i < n; ++i) {
    if (!cut[i] || comp[i] >= 0) continue;
    const long id = static_cast<long>(regions.size());
    regions.emplace_back(n, false);
    std::vector<std::size_t> stack{i};
    comp[i] = id;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      regions.back()[a] = true;
      for (std::size_t b = 0; b < n; ++b) {
        if (cut[b] && comp[b] < 0 && d(a, b) <= radius) {
          comp[b] = id;
          stack.push_back(b);
        }
      }
    }
  }
  if (regions.empty()) return regions;
  const std::vector<SubsetMask> cores = regions;
  for (std::size_t i = 0; i < n; ++i) {
    if (cut[i]) continue;
    std::size_t best = 0;
    ExtReal bd = ExtReal::infinity();
    for (std::size_t r = 0; r < cores.size(); ++r) {
      const ExtReal dr = s.dist_to_set(i, cores[r]);
      if (dr < bd) {
        bd = dr;
        best = r;
      }
    }
    if (bd.is_finite()) regions[best][i] = true;
  }
  return regions;
}

LocalIndex local_index(const FiniteOperator& u, const CutFunction& phi, const SubsetMask& region) {
  const SampledSpace& s = u.space();
  require_mask(s, region, "region");
  const ClutchingResult pu = clutching_projection(u, phi);
  const ClutchingResult p1 = clutching_projection(FiniteOperator::identity(u.space_ptr(), u.amplification()), phi);
  if (!(pu.defect < 0.25)) throw Error(Errc::domain, "clutching projection of u has defect >= 1/4");
  if (!(p1.defect < 0.25)) throw Error(Errc::domain, "clutching projection of 1 has defect >= 1/4");
  const Matrix diff = spectral_projection(pu.p.entries()) - spectral_projection(p1.p.entries());
  const auto dim = static_cast<Eigen::Index>(s.total_dim());
  LocalIndex out;
  for (Eigen::Index i = 0; i < diff.rows(); ++i) {
    if (region[s.point_of(static_cast<std::size_t>(i % dim))]) out.trace += diff(i, i).real();
  }
  const double rounded = std::round(out.trace);
  if (std::abs(out.trace - rounded) > 0.1) {
    throw Error(Errc::detector_inconclusive, "local trace " + std::to_string(out.trace) + " is not near an integer");
  }
  out.index = static_cast<long>(rounded);
  return out;
}

FiniteOperator cyclic_shift(const SpacePtr& space, const std::vector<std::size_t>& order, int power) {
  const SampledSpace& s = *space;
  const std::size_t n = order.size();
  if (n != s.size()) throw Error(Errc::shape_mismatch, "order must list every point once");
  std::vector<bool> seen(n, false);
  for (std::size_t i : order) {
    if (i >= n || seen[i]) throw Error(Errc::shape_mismatch, "order must list every point once");
    seen[i] = true;
  }
  const int f = s.internal_dim(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.internal_dim(i) != f) throw Error(Errc::domain, "cyclic shift needs equal fibers", i);
  }
  const auto d = static_cast<Eigen::Index>(s.total_dim());
  Matrix m = Matrix::Zero(d, d);
  const long ln = static_cast<long>(n);
  for (long j = 0; j < ln; ++j) {
    const long to = ((j + power) % ln + ln) % ln;
    const auto col = static_cast<Eigen::Index>(s.offset(order[static_cast<std::size_t>(j)]));
    const auto row = static_cast<Eigen::Index>(s.offset(order[static_cast<std::size_t>(to)]));
    for (int q = 0; q < f; ++q) m(row + q, col + q) = 1.0;
  }
  return FiniteOperator(space, 1, std::move(m));
}

}  // namespace roe
