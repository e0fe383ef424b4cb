#include "roe/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include "roe/errors.hpp"
#include "roe/format.hpp"

namespace roe {
namespace {

bool simplex_less(const Simplex& a, const Simplex& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool is_face(const Simplex& face, const Simplex& host) {
  return std::includes(host.begin(), host.end(), face.begin(), face.end());
}

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffu;
      h_ *= 0x100000001b3ull;
    }
  }
  void add(double d) { add(std::bit_cast<std::uint64_t>(d)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

std::string simplex_text(const Simplex& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

// All compositions of m into k nonnegative parts.
void compositions(int m, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k - 1) {
    int used = 0;
    for (int v : cur) used += v;
    cur.push_back(m - used);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  int used = 0;
  for (int v : cur) used += v;
  for (int a = 0; a <= m - used; ++a) {
    cur.push_back(a);
    compositions(m, k, cur, out);
    cur.pop_back();
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SimplicialComplex

SimplicialComplex SimplicialComplex::build(const std::vector<std::vector<int>>& maximal) {
  std::set<Simplex> all;
  for (const auto& raw : maximal) {
    if (raw.empty()) throw Error(Errc::malformed_input, "empty simplex");
    Simplex s = raw;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw Error(Errc::malformed_input, "duplicate vertex in simplex " + simplex_text(s));
    }
    if (s.size() > 20) throw Error(Errc::malformed_input, "simplex too large");
    const std::size_t k = s.size();
    for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
      Simplex f;
      for (std::size_t i = 0; i < k; ++i) {
        if (bits & (1u << i)) f.push_back(s[i]);
      }
      all.insert(std::move(f));
    }
  }
  SimplicialComplex x;
  x.simplices_.assign(all.begin(), all.end());
  std::sort(x.simplices_.begin(), x.simplices_.end(), simplex_less);
  std::vector<bool> is_max(x.simplices_.size(), true);
  for (const auto& s : x.simplices_) {
    if (s.size() < 2) continue;
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      Simplex f;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i != drop) f.push_back(s[i]);
      }
      is_max[*x.find(f)] = false;
    }
  }
  for (std::size_t i = 0; i < x.simplices_.size(); ++i) {
    if (is_max[i]) x.maximal_.push_back(i);
    if (x.simplices_[i].size() == 1) x.vertices_.push_back(x.simplices_[i][0]);
    x.dimension_ = std::max(x.dimension_, static_cast<int>(x.simplices_[i].size()) - 1);
  }
  return x;
}

SimplicialComplex build_complex(const std::vector<std::vector<int>>& maximal) {
  return SimplicialComplex::build(maximal);
}

std::optional<std::size_t> SimplicialComplex::find(const Simplex& s) const {
  auto it = std::lower_bound(simplices_.begin(), simplices_.end(), s, simplex_less);
  if (it == simplices_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - simplices_.begin());
}

std::size_t SimplicialComplex::index_of(const Simplex& s) const {
  Simplex sorted = s;
  std::sort(sorted.begin(), sorted.end());
  auto idx = find(sorted);
  if (!idx) throw Error(Errc::unknown_simplex, "simplex " + simplex_text(sorted) + " not in complex");
  return *idx;
}

std::vector<std::size_t> SimplicialComplex::simplices_of_dimension(int d) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < simplices_.size(); ++i) {
    if (static_cast<int>(simplices_[i].size()) - 1 == d) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Points and metric

std::vector<double> weights_on(const SimplicialComplex& x, const SamplePoint& p, const Simplex& host) {
  const Simplex& carrier = x.simplices().at(p.carrier);
  std::vector<double> out(host.size(), 0.0);
  for (std::size_t i = 0; i < carrier.size(); ++i) {
    auto it = std::lower_bound(host.begin(), host.end(), carrier[i]);
    if (it == host.end() || *it != carrier[i]) {
      throw Error(Errc::domain, "carrier " + simplex_text(carrier) + " is not a face of " + simplex_text(host));
    }
    out[static_cast<std::size_t>(it - host.begin())] = p.weights[i];
  }
  return out;
}

double spherical_distance(const std::vector<double>& t, const std::vector<double>& s) {
  double nt = 0.0, ns = 0.0;
  for (double v : t) nt += v * v;
  for (double v : s) ns += v * v;
  nt = std::sqrt(nt);
  ns = std::sqrt(ns);
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double a = t[i] / nt, b = s[i] / ns;
    diff += (a - b) * (a - b);
    sum += (a + b) * (a + b);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

SubsetMask mask_all(std::size_t n, bool value) { return SubsetMask(n, value); }

SubsetMask mask_and(const SubsetMask& a, const SubsetMask& b) {
  if (a.size() != b.size()) throw Error(Errc::shape_mismatch, "mask sizes differ");
  SubsetMask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}

SubsetMask mask_or(const SubsetMask& a, const SubsetMask& b) {
  if (a.size() != b.size()) throw Error(Errc::shape_mismatch, "mask sizes differ");
  SubsetMask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
  return out;
}

SubsetMask mask_not(const SubsetMask& a) {
  SubsetMask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = !a[i];
  return out;
}

SubsetMask mask_minus(const SubsetMask& a, const SubsetMask& b) { return mask_and(a, mask_not(b)); }

std::size_t mask_count(const SubsetMask& a) {
  return static_cast<std::size_t>(std::count(a.begin(), a.end(), true));
}

bool mask_subset(const SubsetMask& a, const SubsetMask& b) {
  if (a.size() != b.size()) throw Error(Errc::shape_mismatch, "mask sizes differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// SampledSpace

SampledSpace::SampledSpace(std::vector<SamplePoint> points, Eigen::MatrixXd dist,
                           std::vector<int> internal_dims, double mesh)
    : points_(std::move(points)), dist_(std::move(dist)), dims_(std::move(internal_dims)), mesh_(mesh) {
  const auto n = points_.size();
  if (static_cast<std::size_t>(dist_.rows()) != n || static_cast<std::size_t>(dist_.cols()) != n) {
    throw Error(Errc::malformed_input, "distance matrix shape does not match point count");
  }
  if (dims_.size() != n) throw Error(Errc::malformed_input, "internal_dims length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (dims_[i] < 1) throw Error(Errc::malformed_input, "internal dimension must be >= 1", i);
    if (dist_(i, i) != 0.0) throw Error(Errc::malformed_input, "nonzero diagonal distance", i);
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist_(i, j);
      if (std::isnan(d) || d < 0.0) throw Error(Errc::malformed_input, "negative or NaN distance", i);
      if (d != dist_(j, i)) throw Error(Errc::malformed_input, "distance matrix not symmetric", i);
    }
  }
  offsets_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    offsets_[i] = total_;
    total_ += static_cast<std::size_t>(dims_[i]);
  }
  owner_.resize(total_);
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < dims_[i]; ++f) owner_[offsets_[i] + static_cast<std::size_t>(f)] = i;
  }
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(n));
  h.add(mesh_);
  for (std::size_t i = 0; i < n; ++i) {
    h.add(static_cast<std::uint64_t>(dims_[i]));
    h.add(static_cast<std::uint64_t>(points_[i].carrier));
    for (double w : points_[i].weights) h.add(w);
  }
  for (Eigen::Index j = 0; j < dist_.cols(); ++j) {
    for (Eigen::Index i = 0; i < dist_.rows(); ++i) h.add(dist_(i, j));
  }
  hash_ = h.value();
}

SampledSpace SampledSpace::from_distances(const Eigen::MatrixXd& dist, std::vector<int> internal_dims) {
  std::vector<SamplePoint> pts(static_cast<std::size_t>(dist.rows()));
  SampledSpace s(std::move(pts), dist, std::move(internal_dims), 0.0);
  const double defect = s.triangle_defect();
  if (defect > 1e-9) {
    throw Error(Errc::malformed_input, "triangle inequality violated by " + format_real(defect));
  }
  return s;
}

SampledSpace SampledSpace::subspace(const SubsetMask& keep, const std::vector<int>& dims) const {
  if (keep.size() != size() || dims.size() != size()) throw Error(Errc::shape_mismatch, "subspace mask size");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < size(); ++i) {
    if (keep[i]) idx.push_back(i);
  }
  std::vector<SamplePoint> pts;
  std::vector<int> d;
  Eigen::MatrixXd m(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    pts.push_back(points_[idx[a]]);
    d.push_back(dims[idx[a]]);
    for (std::size_t b = 0; b < idx.size(); ++b) m(a, b) = dist_(idx[a], idx[b]);
  }
  return SampledSpace(std::move(pts), std::move(m), std::move(d), mesh_);
}

SampledSpace SampledSpace::with_internal_dims(std::vector<int> dims) const {
  return SampledSpace(points_, dist_, std::move(dims), mesh_);
}

double SampledSpace::triangle_defect() const {
  const auto n = static_cast<Eigen::Index>(size());
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dij = dist_(i, j);
      if (std::isinf(dij)) continue;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double djk = dist_(j, k);
        if (std::isinf(djk)) continue;
        worst = std::max(worst, dist_(i, k) - dij - djk);
      }
    }
  }
  return n == 0 ? 0.0 : worst;
}

ExtReal SampledSpace::dist_to_set(std::size_t i, const SubsetMask& a) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < size(); ++j) {
    if (a[j]) best = std::min(best, dist_(i, j));
  }
  return ExtReal(best);
}

// ---------------------------------------------------------------------------
// Discretization

int lattice_refinement(int dimension, double mesh) {
  if (!(mesh > 0.0)) throw Error(Errc::domain, "mesh must be positive");
  if (mesh >= std::numbers::pi / 2.0 || dimension <= 0) return 1;
  const double m = std::ceil(static_cast<double>(dimension + 1) / mesh);
  if (m > 1e6) throw Error(Errc::capacity, "mesh too fine");
  return static_cast<int>(m);
}

SampledSpace discretize(const SimplicialComplex& x, double mesh, int fiber_dim) {
  if (fiber_dim < 1) throw Error(Errc::domain, "fiber dimension must be >= 1");
  const int m = lattice_refinement(x.dimension(), mesh);
  const auto& simp = x.simplices();

  std::set<std::pair<std::size_t, std::vector<double>>> keys;
  for (std::size_t top : x.maximal()) {
    const Simplex& s = simp[top];
    std::vector<std::vector<int>> comps;
    std::vector<int> cur;
    compositions(m, static_cast<int>(s.size()), cur, comps);
    for (const auto& a : comps) {
      Simplex carrier;
      std::vector<double> w;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (a[i] > 0) {
          carrier.push_back(s[i]);
          w.push_back(static_cast<double>(a[i]) / static_cast<double>(m));
        }
      }
      keys.emplace(*x.find(carrier), std::move(w));
    }
  }
  for (std::size_t i = 0; i < simp.size(); ++i) {
    const double c = 1.0 / static_cast<double>(simp[i].size());
    keys.emplace(i, std::vector<double>(simp[i].size(), c));
  }

  std::vector<SamplePoint> pts;
  pts.reserve(keys.size());
  for (const auto& [carrier, w] : keys) pts.push_back({carrier, w});
  const auto n = pts.size();
  const double inf = std::numeric_limits<double>::infinity();

  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(n, n, inf);
  for (std::size_t i = 0; i < n; ++i) w(i, i) = 0.0;
  for (std::size_t top : x.maximal()) {
    const Simplex& host = simp[top];
    std::vector<std::size_t> members;
    std::vector<std::vector<double>> coords;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_face(simp[pts[i].carrier], host)) {
        members.push_back(i);
        coords.push_back(weights_on(x, pts[i], host));
      }
    }
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const double d = spherical_distance(coords[a], coords[b]);
        const auto i = members[a], j = members[b];
        if (d < w(i, j)) {
          w(i, j) = d;
          w(j, i) = d;
        }
      }
    }
  }

  // Dense Dijkstra from every source.
  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(n, n, inf);
  std::vector<double> best(n);
  std::vector<bool> done(n);
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(best.begin(), best.end(), inf);
    std::fill(done.begin(), done.end(), false);
    best[src] = 0.0;
    for (std::size_t it = 0; it < n; ++it) {
      std::size_t u = npos;
      double bu = inf;
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v] && best[v] < bu) {
          bu = best[v];
          u = v;
        }
      }
      if (u == npos) break;
      done[u] = true;
      for (std::size_t v = 0; v < n; ++v) {
        const double wuv = w(u, v);
        if (!done[v] && wuv < inf && bu + wuv < best[v]) best[v] = bu + wuv;
      }
    }
    for (std::size_t v = 0; v < n; ++v) dist(src, v) = best[v];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::min(dist(i, j), dist(j, i));
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return SampledSpace(std::move(pts), std::move(dist), std::vector<int>(n, fiber_dim), mesh);
}

std::optional<std::size_t> find_sample(const SampledSpace& s, const SamplePoint& p) {
  const auto& pts = s.points();
  auto less = [](const SamplePoint& a, const SamplePoint& b) {
    if (a.carrier != b.carrier) return a.carrier < b.carrier;
    return a.weights < b.weights;
  };
  auto it = std::lower_bound(pts.begin(), pts.end(), p, less);
  if (it != pts.end() && it->carrier == p.carrier && it->weights == p.weights) {
    return static_cast<std::size_t>(it - pts.begin());
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].carrier == p.carrier && pts[i].weights == p.weights) return i;
  }
  return std::nullopt;
}

SubsetMask neighborhood(const SampledSpace& s, const SubsetMask& a, double r) {
  if (!(r >= 0.0)) throw Error(Errc::domain, "neighborhood radius must be nonnegative");
  if (a.size() != s.size()) throw Error(Errc::shape_mismatch, "mask size does not match space");
  SubsetMask out(s.size(), false);
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s.dist_to_set(i, a) <= r;
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition

double center_distance(const SampledSpace& s, const SimplicialComplex& x, std::size_t top, std::size_t i) {
  const Simplex& host = x.simplices().at(top);
  const std::vector<double> c(host.size(), 1.0 / static_cast<double>(host.size()));
  return spherical_distance(weights_on(x, s.point(i), host), c);
}

std::vector<double> center_distances(const SampledSpace& s, const SimplicialComplex& x) {
  const int n = x.dimension();
  std::vector<double> out(s.size(), std::numeric_limits<double>::infinity());
  for (std::size_t top : x.simplices_of_dimension(n)) {
    const Simplex& host = x.simplices()[top];
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto carrier = s.point(i).carrier;
      if (carrier == npos) throw Error(Errc::domain, "sample has no carrier simplex", i);
      if (is_face(x.simplices()[carrier], host)) out[i] = std::min(out[i], center_distance(s, x, top, i));
    }
  }
  return out;
}

Decomposition decompose(const SampledSpace& s, const SimplicialComplex& x) {
  const int n = x.dimension();
  if (n < 1) throw Error(Errc::unsupported_decomposition, "decomposition needs dimension >= 1");
  Decomposition d{SubsetMask(s.size(), false), SubsetMask(s.size(), false)};
  for (std::size_t top : x.simplices_of_dimension(n)) {
    const Simplex& host = x.simplices()[top];
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto carrier = s.point(i).carrier;
      if (carrier == npos) throw Error(Errc::domain, "sample has no carrier simplex", i);
      if (!is_face(x.simplices()[carrier], host)) continue;
      const double dc = center_distance(s, x, top, i);
      if (dc <= kOuterThreshold) d.x1[i] = true;
      if (dc >= kInnerThreshold) d.x2[i] = true;
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (x.simplex_dimension(s.point(i).carrier) < n) d.x2[i] = true;
  }
  return d;
}

SamplePoint simplex_center(const SimplicialComplex& x, const Simplex& sigma) {
  const std::size_t idx = x.index_of(sigma);
  const auto k = x.simplices()[idx].size();
  return {idx, std::vector<double>(k, 1.0 / static_cast<double>(k))};
}

std::size_t RetractionTable::at(std::size_t i) const {
  if (!defined(i)) throw Error(Errc::domain, "sample outside the retraction domain", i);
  return target_[i];
}

RetractionTable retract_onto_pieces(const SampledSpace& s, const SimplicialComplex& x,
                                    const SubsetMask& mask, RetractionKind kind) {
  if (mask.size() != s.size()) throw Error(Errc::shape_mismatch, "mask size does not match space");
  const int n = x.dimension();
  const auto tops = x.simplices_of_dimension(n);
  std::vector<std::size_t> target(s.size(), npos);

  if (kind == RetractionKind::cluster_to_centers) {
    std::vector<std::size_t> centers;
    for (std::size_t top : tops) {
      auto c = find_sample(s, simplex_center(x, x.simplices()[top]));
      if (!c) throw Error(Errc::domain, "space does not contain the simplex centers");
      centers.push_back(*c);
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!mask[i]) continue;
      std::size_t best = npos;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c : centers) {
        const double d = s.distances()(i, c);
        if (d < bd || (d == bd && best != npos && c < best)) {
          bd = d;
          best = c;
        }
      }
      if (best == npos) throw Error(Errc::domain, "sample has no reachable top-simplex center", i);
      target[i] = best;
    }
    return RetractionTable(std::move(target));
  }

  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!mask[i]) continue;
    const SamplePoint& p = s.point(i);
    if (p.carrier == npos) throw Error(Errc::domain, "sample has no carrier simplex", i);
    if (x.simplex_dimension(p.carrier) < n) {
      target[i] = i;
      continue;
    }
    const Simplex& host = x.simplices()[p.carrier];
    const double c = 1.0 / static_cast<double>(host.size());
    const double tmin = *std::min_element(p.weights.begin(), p.weights.end());
    if (tmin >= c) throw Error(Errc::domain, "center sample has no radial projection", i);
    const double lambda = c / (c - tmin);
    std::vector<double> q(host.size());
    for (std::size_t k = 0; k < host.size(); ++k) {
      q[k] = p.weights[k] == tmin ? 0.0 : c + lambda * (p.weights[k] - c);
    }
    std::size_t best = npos;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.size(); ++j) {
      const auto cj = s.point(j).carrier;
      if (x.simplex_dimension(cj) >= n || !is_face(x.simplices()[cj], host)) continue;
      const double d = spherical_distance(weights_on(x, s.point(j), host), q);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    if (best == npos) throw Error(Errc::domain, "no skeleton sample on the carrier boundary", i);
    target[i] = best;
  }
  return RetractionTable(std::move(target));
}

std::vector<std::size_t> cyclic_order(const SampledSpace& s, const SimplicialComplex& x) {
  if (x.dimension() != 1) throw Error(Errc::domain, "cyclic order needs a 1-dimensional complex");
  std::map<int, std::vector<int>> adj;
  for (std::size_t idx : x.maximal()) {
    const Simplex& e = x.simplices()[idx];
    if (e.size() != 2) throw Error(Errc::domain, "complex has an isolated vertex");
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  for (auto& [v, nb] : adj) {
    if (nb.size() != 2) throw Error(Errc::domain, "vertex " + std::to_string(v) + " does not have degree 2");
    std::sort(nb.begin(), nb.end());
  }
  std::vector<int> cycle{adj.begin()->first};
  int prev = cycle[0];
  int cur = adj.begin()->second[0];
  while (cur != cycle[0]) {
    cycle.push_back(cur);
    const auto& nb = adj[cur];
    const int next = nb[0] == prev ? nb[1] : nb[0];
    prev = cur;
    cur = next;
  }
  if (cycle.size() != adj.size()) throw Error(Errc::domain, "complex is not connected");

  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    const int a = cycle[k], b = cycle[(k + 1) % cycle.size()];
    Simplex edge{std::min(a, b), std::max(a, b)};
    const std::size_t b_pos = (edge[0] == b) ? 0 : 1;
    std::vector<std::pair<double, std::size_t>> on_edge;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto carrier = s.point(i).carrier;
      if (carrier == npos || !is_face(x.simplices()[carrier], edge)) continue;
      const auto w = weights_on(x, s.point(i), edge);
      if (w[b_pos] == 1.0) continue;
      on_edge.emplace_back(w[b_pos], i);
    }
    std::sort(on_edge.begin(), on_edge.end());
    for (const auto& e : on_edge) order.push_back(e.second);
  }
  if (order.size() != s.size()) throw Error(Errc::domain, "samples do not form a single cycle");
  return order;
}

}  // namespace roe
