#include "roe/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "roe/errors.hpp"
#include "roe/format.hpp"

namespace roe {
namespace {

Matrix kron_identity_left(const Matrix& v, int k) {
  Matrix out = Matrix::Zero(v.rows() * k, v.cols() * k);
  for (int c = 0; c < k; ++c) out.block(c * v.rows(), c * v.cols(), v.rows(), v.cols()) = v;
  return out;
}

void require_same_maps(const CoarseMap& a, const CoarseMap& b) {
  if (!same_space(a.source(), b.source()) || !same_space(a.target(), b.target()) ||
      a.assignment() != b.assignment()) {
    throw Error(Errc::shape_mismatch, "covers must belong to the same coarse map");
  }
}

// x + I_k over the same space (amplification doubles).
FiniteOperator plus_identity(const FiniteOperator& x) {
  return direct_sum(x, FiniteOperator::identity(x.space_ptr(), x.amplification()));
}

struct Sample {
  FiniteOperator op;
  double defect;
};

}  // namespace

CoarseMap::CoarseMap(SpacePtr source, SpacePtr target, std::vector<std::size_t> assignment)
    : source_(std::move(source)), target_(std::move(target)), assignment_(std::move(assignment)) {
  if (!source_ || !target_) throw Error(Errc::shape_mismatch, "coarse map needs both spaces");
  if (assignment_.size() != source_->size()) {
    throw Error(Errc::shape_mismatch, "assignment has " + std::to_string(assignment_.size()) +
                                          " entries for " + std::to_string(source_->size()) + " source points");
  }
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    if (assignment_[i] >= target_->size()) throw Error(Errc::shape_mismatch, "target point out of range", i);
  }
}

CoarseMap CoarseMap::identity(SpacePtr space) {
  std::vector<std::size_t> a(space->size());
  std::iota(a.begin(), a.end(), std::size_t{0});
  return CoarseMap(space, space, std::move(a));
}

std::vector<std::size_t> CoarseMap::preimage_sizes() const {
  std::vector<std::size_t> out(target_->size(), 0);
  for (auto y : assignment_) ++out[y];
  return out;
}

CoarseMap compose(const CoarseMap& g, const CoarseMap& f) {
  if (!same_space(f.target(), g.source())) throw Error(Errc::shape_mismatch, "maps do not compose");
  std::vector<std::size_t> a(f.assignment().size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = g(f(i));
  return CoarseMap(f.source_ptr(), g.target_ptr(), std::move(a));
}

ExtReal expansion_function(const CoarseMap& f, double r) {
  const auto& x = f.source();
  const auto& y = f.target();
  ExtReal best(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (x.dist(i, j) < r) best = max(best, y.dist(f(i), f(j)));
    }
  }
  return best;
}

ExtReal lipschitz_constant(const CoarseMap& f) {
  const auto& x = f.source();
  const auto& y = f.target();
  ExtReal best(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const ExtReal d = x.dist(i, j);
      if (d.is_infinite() || !(d > 0.0)) continue;
      const ExtReal e = y.dist(f(i), f(j));
      best = max(best, e.is_infinite() ? ExtReal::infinity() : ExtReal(e.value() / d.value()));
    }
  }
  return best;
}

ExtReal displacement(const CoarseMap& f, const CoarseMap& g) {
  if (!same_space(f.source(), g.source()) || !same_space(f.target(), g.target())) {
    throw Error(Errc::shape_mismatch, "maps act between different spaces");
  }
  ExtReal best(0.0);
  for (std::size_t i = 0; i < f.assignment().size(); ++i) best = max(best, f.target().dist(f(i), g(i)));
  return best;
}

double CoverIsometry::isometry_defect() const {
  return spectral_norm(matrix.adjoint() * matrix - Matrix::Identity(matrix.cols(), matrix.cols()));
}

double CoverIsometry::support_excess() const {
  const auto& x = map.source();
  const auto& y = map.target();
  double worst = -delta;
  for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
      if (matrix(r, c) == Complex(0.0)) continue;
      const std::size_t py = y.point_of(static_cast<std::size_t>(r));
      const std::size_t px = x.point_of(static_cast<std::size_t>(c));
      worst = std::max(worst, y.dist(py, map(px)).value() - delta);
    }
  }
  return worst;
}

CoverIsometry delta_cover(const CoarseMap& f, double delta, const std::optional<std::vector<std::size_t>>& order) {
  if (!(delta > 0.0)) throw Error(Errc::domain, "delta must be positive");
  const auto& x = f.source();
  const auto& y = f.target();
  std::vector<std::size_t> seq(x.size());
  std::iota(seq.begin(), seq.end(), std::size_t{0});
  if (order) {
    std::vector<std::size_t> sorted = *order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != seq) throw Error(Errc::domain, "order must be a permutation of the source points");
    seq = *order;
  } else {
    std::vector<long> room(x.size(), 0);
    for (std::size_t px = 0; px < x.size(); ++px) {
      for (std::size_t py = 0; py < y.size(); ++py) {
        if (y.dist(py, f(px)) < delta) room[px] += y.internal_dim(py);
      }
    }
    std::stable_sort(seq.begin(), seq.end(), [&](std::size_t a, std::size_t b) { return room[a] < room[b]; });
  }
  std::vector<int> used(y.size(), 0);
  Matrix v = Matrix::Zero(static_cast<Eigen::Index>(y.total_dim()), static_cast<Eigen::Index>(x.total_dim()));
  for (std::size_t px : seq) {
    const std::size_t fx = f(px);
    std::vector<std::size_t> near;
    for (std::size_t py = 0; py < y.size(); ++py) {
      if (y.dist(py, fx) < delta) near.push_back(py);
    }
    std::stable_sort(near.begin(), near.end(), [&](std::size_t a, std::size_t b) {
      return y.distances()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(fx)) <
             y.distances()(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(fx));
    });
    std::size_t cursor = 0;
    for (int i = 0; i < x.internal_dim(px); ++i) {
      while (cursor < near.size() && used[near[cursor]] >= y.internal_dim(near[cursor])) ++cursor;
      if (cursor == near.size()) {
        throw Error(Errc::capacity, "target fibers within delta of f(" + std::to_string(px) +
                                        ") are exhausted", px);
      }
      const std::size_t py = near[cursor];
      v(static_cast<Eigen::Index>(y.offset(py)) + used[py], static_cast<Eigen::Index>(x.offset(px)) + i) = 1.0;
      ++used[py];
    }
  }
  return {f, delta, std::move(v)};
}

CoverIsometry compose(const CoverIsometry& v2, const CoverIsometry& v1) {
  const ExtReal w = expansion_function(v2.map, v1.delta);
  if (w.is_infinite()) throw Error(Errc::domain, "expansion of the outer map is unbounded at delta");
  return {compose(v2.map, v1.map), v2.delta + w.value(), v2.matrix * v1.matrix};
}

FiniteOperator ad(const CoverIsometry& v, const FiniteOperator& t) {
  if (!same_space(t.space(), v.map.source())) throw Error(Errc::shape_mismatch, "operator is not over the cover's source");
  const int k = t.amplification();
  const auto ny = v.matrix.rows();
  const auto nx = v.matrix.cols();
  Matrix out(ny * k, ny * k);
  for (int b = 0; b < k; ++b) {
    for (int a = 0; a < k; ++a) {
      out.block(a * ny, b * ny, ny, ny) = v.matrix * t.entries().block(a * nx, b * nx, nx, nx) * v.matrix.adjoint();
    }
  }
  return FiniteOperator(v.map.target_ptr(), k, std::move(out), t.scalar_part());
}

RotationHomotopy rotation_homotopy(const CoverIsometry& vf, const CoverIsometry& vf2, const FiniteOperator& p,
                                   const QuasiParams& q, std::optional<int> steps, double tau) {
  require_same_maps(vf.map, vf2.map);
  if (p.unitized()) throw Error(Errc::domain, "rotation homotopy expects p without scalar part");
  q.validate();
  const QuasiWitness w = is_quasi_projection(p, q, tau);
  if (!w.ok) throw Error(Errc::domain, "p is not an (eps, r)-quasi-projection");
  const ExtReal omega = expansion_function(vf.map, q.r);
  if (omega.is_infinite()) throw Error(Errc::domain, "omega_f(r) is infinite");
  const double delta = std::max(vf.delta, vf2.delta);
  const QuasiParams ambient{q.epsilon, omega.value() + 8.0 * delta};

  const int k = p.amplification();
  const Matrix a = kron_identity_left(vf.matrix, k);
  const Matrix b = kron_identity_left(vf2.matrix, k);
  const Eigen::Index n = a.rows();
  const Matrix pe = ad(vf, p).entries();
  const Matrix pe2 = ad(vf2, p).entries();
  const Matrix id = Matrix::Identity(n, n);
  Matrix u(2 * n, 2 * n);
  u << id - a * a.adjoint(), a * b.adjoint(), b * a.adjoint(), id - b * b.adjoint();
  const Matrix id2 = Matrix::Identity(2 * n, 2 * n);
  const Matrix ustar = u.adjoint();
  const Matrix uu = u * ustar;
  const Matrix lower = id2 - ustar;
  const SpacePtr& target = vf.map.target_ptr();

  Matrix start = Matrix::Zero(4 * n, 4 * n);
  start.topLeftCorner(n, n) = pe;
  Matrix finish = Matrix::Zero(4 * n, 4 * n);
  finish.block(n, n, n, n) = pe2;

  const auto sample = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    // First n columns of U_t = diag(U, 1) R diag(1, U*) R*.
    Matrix col(4 * n, n);
    col.topRows(2 * n) = c * c * u.leftCols(n) + s * s * uu.leftCols(n);
    col.bottomRows(2 * n) = s * c * lower.leftCols(n);
    Matrix m = col * pe * col.adjoint();
    return Matrix((m + m.adjoint()) * 0.5);
  };

  struct Attempt {
    std::vector<FiniteOperator> samples;
    std::vector<double> steps;
    std::optional<std::size_t> bad;
  };
  // Stops at the first step that is too long or misses the margin.
  const auto attempt = [&](int count) {
    Attempt r;
    double prev_defect = 0.0;
    for (int j = 0; j <= count; ++j) {
      Matrix m = j == 0 ? start : j == count ? finish
                                             : sample(0.5 * std::numbers::pi * (1.0 - static_cast<double>(j) / count));
      const double defect = spectral_norm(m * m - m);
      r.samples.emplace_back(target, 4 * k, std::move(m));
      if (j > 0) {
        const double d = distance(r.samples[j - 1], r.samples[j]);
        r.steps.push_back(d);
        if (d > q.epsilon / 15.0 || !(step_margin(ambient.epsilon, d, prev_defect, defect) > 0.0)) {
          r.bad = static_cast<std::size_t>(j - 1);
          return r;
        }
      }
      prev_defect = defect;
    }
    return r;
  };

  Attempt chosen;
  int count = 0;
  if (steps) {
    if (*steps < 1) throw Error(Errc::domain, "steps must be positive");
    count = *steps;
    chosen = attempt(count);
    if (chosen.bad) {
      throw Error(Errc::refine_needed, "step " + std::to_string(*chosen.bad) + " of " + std::to_string(count) +
                                           " exceeds eps/15 or the perturbation margin", chosen.bad);
    }
  } else {
    // Lower estimate from the longest step at 16 samples, then scan upward.
    constexpr int kPilot = 16;
    double longest = 0.0;
    Matrix prev = start;
    for (int j = 1; j <= kPilot; ++j) {
      Matrix m = j == kPilot ? finish : sample(0.5 * std::numbers::pi * (1.0 - static_cast<double>(j) / kPilot));
      longest = std::max(longest, spectral_norm(m - prev));
      prev = std::move(m);
    }
    count = std::max(1, static_cast<int>(std::floor(kPilot * longest / (q.epsilon / 15.0))));
    chosen = attempt(count);
    while (chosen.bad) {
      if (count > (1 << 22)) throw Error(Errc::construction, "no admissible step count", std::nullopt, "rotation");
      count += 1 + count / 50;
      chosen = attempt(count);
    }
  }

  RotationHomotopy out{{Parity::even, std::move(chosen.samples), ambient, std::move(chosen.steps)},
                       omega.value(),
                       delta,
                       count,
                       FiniteOperator(target, 4 * k, start),
                       FiniteOperator(target, 4 * k, finish)};
  const CertificateReport rep = verify_certificate(out.certificate, tau);
  if (!rep.ok) throw Error(Errc::construction, rep.reason, rep.bad_sample, "rotation");
  return out;
}

LipschitzHomotopy::LipschitzHomotopy(std::vector<CoarseMap> frames, double c) : frames_(std::move(frames)), c_(c) {
  if (frames_.empty()) throw Error(Errc::domain, "homotopy needs at least one frame");
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error(Errc::domain, "Lipschitz bound must be finite and >= 0");
  for (std::size_t j = 0; j < frames_.size(); ++j) {
    if (!same_space(frames_[j].source(), frames_[0].source()) ||
        !same_space(frames_[j].target(), frames_[0].target())) {
      throw Error(Errc::domain, "frames act between different spaces", j);
    }
    const ExtReal lc = lipschitz_constant(frames_[j]);
    if (lc > c + 1e-12) {
      throw Error(Errc::domain, "frame Lipschitz constant " + lc.to_string() + " exceeds " + format_real(c), j);
    }
  }
  for (std::size_t j = 0; j + 1 < frames_.size(); ++j) table_.push_back(displacement(frames_[j], frames_[j + 1]));
}

std::vector<std::size_t> partition_homotopy(const LipschitzHomotopy& f, double delta) {
  if (!(delta > 0.0)) throw Error(Errc::domain, "delta must be positive");
  const auto& frames = f.frames();
  const std::size_t n = frames.size();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!(f.displacements()[j] < delta)) {
      throw Error(Errc::resolution, "frames " + std::to_string(j) + " and " + std::to_string(j + 1) +
                                        " are " + f.displacements()[j].to_string() + " apart (>= delta)", j);
    }
  }
  if (n == 1) return {0};
  std::vector<std::size_t> parent(n, npos);
  std::deque<std::size_t> queue{0};
  parent[0] = 0;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    if (i == n - 1) break;
    for (std::size_t j = n - 1; j > i; --j) {
      if (parent[j] != npos) continue;
      if (displacement(frames[i], frames[j]) < delta) {
        parent[j] = i;
        queue.push_back(j);
      }
    }
  }
  std::vector<std::size_t> path{n - 1};
  while (path.back() != 0) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

// Scalar rotation by theta in the plane of blocks (i, i+1), each block of
// `width` copies; identity elsewhere.
FiniteOperator block_rotation(const SpacePtr& space, int blocks, int width, int i, double theta) {
  const int k = blocks * width;
  Matrix s = Matrix::Identity(k, k);
  const double c = std::cos(theta), sn = std::sin(theta);
  const Matrix id = Matrix::Identity(width, width);
  s.block(i * width, i * width, width, width) = c * id;
  s.block(i * width, (i + 1) * width, width, width) = -sn * id;
  s.block((i + 1) * width, i * width, width, width) = sn * id;
  s.block((i + 1) * width, (i + 1) * width, width, width) = c * id;
  const auto dim = static_cast<Eigen::Index>(space->total_dim()) * k;
  return FiniteOperator(space, k, Matrix::Zero(dim, dim), std::move(s));
}

class StageBuilder {
 public:
  StageBuilder(QuasiParams ambient, double tau) : ambient_(ambient), tau_(tau) {}

  // Appends samples of path(s), s in [0, 1], with exact endpoints x0, x1;
  // x0 must equal the previous stage's last sample.
  void run(const std::string& name, const FiniteOperator& x0, const FiniteOperator& x1,
           const std::function<FiniteOperator(double)>& path, int initial) {
    stages_.push_back(name);
    if (samples_.empty()) push(name, x0);
    starts_.push_back(samples_.size() - 1);
    std::vector<std::pair<double, Sample>> pts;
    pts.emplace_back(0.0, Sample{samples_.back(), defects_.back()});
    for (int j = 1; j < initial; ++j) {
      const double s = static_cast<double>(j) / initial;
      pts.emplace_back(s, check(name, path(s)));
    }
    pts.emplace_back(1.0, check(name, x1));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) refine(name, path, pts[i], pts[i + 1], 0);
  }

  HomotopyCertificate certificate() const { return {Parity::odd, samples_, ambient_, steps_}; }
  const std::vector<std::string>& stages() const { return stages_; }
  const std::vector<std::size_t>& starts() const { return starts_; }

 private:
  Sample check(const std::string& name, FiniteOperator x) {
    const QuasiWitness w = is_quasi_unitary(x, ambient_, tau_);
    if (!w.ok) {
      throw Error(Errc::construction,
                  "stage " + name + ": sample has defect " + format_real(w.defect) + " and propagation " +
                      w.propagation.to_string() + " against (" + format_real(ambient_.epsilon) + ", " +
                      format_real(ambient_.r) + ")",
                  samples_.size(), name);
    }
    return {std::move(x), w.defect};
  }

  void push(const std::string& name, const FiniteOperator& x) {
    const Sample s = check(name, x);
    samples_.push_back(s.op);
    defects_.push_back(s.defect);
  }

  void refine(const std::string& name, const std::function<FiniteOperator(double)>& path,
              const std::pair<double, Sample>& a, const std::pair<double, Sample>& b, int depth) {
    const double d = distance(a.second.op, b.second.op);
    if (step_margin(ambient_.epsilon, d, a.second.defect, b.second.defect) > 0.0) {
      samples_.push_back(b.second.op);
      defects_.push_back(b.second.defect);
      steps_.push_back(d);
      return;
    }
    if (depth >= 24) {
      throw Error(Errc::construction, "stage " + name + ": step does not shrink below the margin",
                  samples_.size(), name);
    }
    const double mid = 0.5 * (a.first + b.first);
    const std::pair<double, Sample> m{mid, check(name, path(mid))};
    refine(name, path, a, m, depth + 1);
    refine(name, path, m, b, depth + 1);
  }

  QuasiParams ambient_;
  double tau_;
  std::vector<FiniteOperator> samples_;
  std::vector<double> defects_;
  std::vector<double> steps_;
  std::vector<std::string> stages_;
  std::vector<std::size_t> starts_;
};

}  // namespace

InvarianceResult homotopy_invariance_certificate(const LipschitzHomotopy& f, const FiniteOperator& u,
                                                 const QuasiParams& q, double delta, double tau) {
  if (!u.unitized()) throw Error(Errc::domain, "u must be unitized");
  q.validate();
  const auto& frames = f.frames();
  if (!same_space(u.space(), frames[0].source())) throw Error(Errc::shape_mismatch, "u is not over the source");
  const QuasiWitness uw = is_quasi_unitary(u, q, tau);
  if (!uw.ok) throw Error(Errc::domain, "u is not an (eps, r)-quasi-unitary");

  InvarianceResult out;
  out.partition = partition_homotopy(f, delta);
  const double c = f.lipschitz_bound();
  out.bound = {21.0 * q.epsilon, 5.0 * (c * q.r + 4.0 * delta)};
  out.bound_2delta = {21.0 * q.epsilon, 5.0 * (c * q.r + 2.0 * delta)};
  const std::size_t l = out.partition.size() - 1;
  const int m = static_cast<int>(l + 1);
  const int k = u.amplification();
  const SpacePtr& target = frames[0].target_ptr();

  std::vector<CoverIsometry> covers;
  std::vector<FiniteOperator> ui;
  for (std::size_t i = 0; i <= l; ++i) {
    covers.push_back(delta_cover(frames[out.partition[i]], delta));
    ui.push_back(ad(covers.back(), u));
  }
  const FiniteOperator ul_star = adjoint(ui[l]);
  std::vector<FiniteOperator> w;
  for (std::size_t i = 0; i <= l; ++i) w.push_back(ui[i] * ul_star);

  std::vector<FiniteOperator> pa, pc;
  for (std::size_t i = 0; i <= l; ++i) pa.push_back(plus_identity(w[i]));
  pc.push_back(plus_identity(w[l]));
  for (std::size_t i = 1; i <= l; ++i) pc.push_back(plus_identity(w[i]));
  const FiniteOperator a = direct_sum(pa);
  const FiniteOperator cc = direct_sum(pc);

  const FiniteOperator id2 = FiniteOperator::identity(target, 2 * k);
  std::vector<FiniteOperator> s0_parts{plus_identity(ui[0])}, l_parts{plus_identity(ui[l])};
  for (std::size_t i = 0; i < l; ++i) {
    s0_parts.push_back(id2);
    l_parts.push_back(id2);
  }
  const FiniteOperator s0 = direct_sum(s0_parts);
  const FiniteOperator big_l = direct_sum(l_parts);

  const FiniteOperator a_l = a * big_l;
  const FiniteOperator g1 = adjoint(cc) * a_l;
  const FiniteOperator g3 = adjoint(a) * a_l;

  // Ad V_{i,i+1}(t) (u + I) with V(t) = R(t) diag(V_i, V_{i+1}) R(t)*.
  const Matrix te = u.entries();
  Matrix scal = Matrix::Zero(2 * k, 2 * k);
  scal.topLeftCorner(k, k) = *u.scalar_part();
  scal.bottomRightCorner(k, k) = Matrix::Identity(k, k);
  std::vector<Matrix> lifted;
  for (const auto& v : covers) lifted.push_back(kron_identity_left(v.matrix, k));
  const auto rotated = [&](std::size_t i, double t) {
    const double cs = std::cos(0.5 * std::numbers::pi * t), sn = std::sin(0.5 * std::numbers::pi * t);
    const Matrix& va = lifted[i];
    const Matrix& vb = lifted[i + 1];
    Matrix col(2 * va.rows(), va.cols());
    col.topRows(va.rows()) = cs * cs * va + sn * sn * vb;
    col.bottomRows(va.rows()) = cs * sn * (vb - va);
    return FiniteOperator(target, 2 * k, col * te * col.adjoint(), scal);
  };
  std::vector<FiniteOperator> ulstar_parts(l + 1, plus_identity(ul_star));
  const FiniteOperator ulstar_sum = direct_sum(ulstar_parts);
  const auto h = [&](double t) {
    std::vector<FiniteOperator> parts;
    for (std::size_t i = 0; i < l; ++i) parts.push_back(rotated(i, t));
    parts.push_back(plus_identity(ui[l]));
    return direct_sum(parts) * ulstar_sum;
  };

  StageBuilder sb(out.bound, tau);
  sb.run("perturb-start", s0, g1, [&](double s) { return (1.0 - s) * s0 + Complex(s) * g1; }, 1);
  if (l > 0) {
    // c = (w_l, w_1, ..., w_l) reaches b = (w_1, ..., w_l, w_l) by swapping
    // blocks (0, 1), (1, 2), ..., (l-2, l-1); each swap is a rotation.
    std::vector<FiniteOperator> order = pc;
    FiniteOperator from = g1;
    for (std::size_t i = 0; i + 1 < l; ++i) {
      std::swap(order[i], order[i + 1]);
      const FiniteOperator d = direct_sum(order);
      const FiniteOperator next = adjoint(d) * a_l;
      const FiniteOperator cur = direct_sum([&] {
        auto o = order;
        std::swap(o[i], o[i + 1]);
        return o;
      }());
      sb.run("shift-swap-" + std::to_string(i), from, next,
             [&, i](double s) {
               const FiniteOperator rot = block_rotation(target, m, 2 * k, static_cast<int>(i),
                                                         0.5 * std::numbers::pi * s);
               return adjoint(rot * cur * adjoint(rot)) * a_l;
             },
             2);
      from = next;
    }
    sb.run("cover-rotation", from, g3, [&](double s) { return adjoint(h(1.0 - s)) * a_l; }, 4);
  }
  sb.run("perturb-end", g3, big_l, [&](double s) { return (1.0 - s) * g3 + Complex(s) * big_l; }, 1);

  out.certificate = sb.certificate();
  out.stages = sb.stages();
  out.stage_starts = sb.starts();
  const CertificateReport rep = verify_certificate(out.certificate, tau);
  if (!rep.ok) throw Error(Errc::construction, rep.reason, rep.bad_sample, "verify");
  out.achieved = {rep.worst_defect, rep.worst_propagation.value()};
  return out;
}

}  // namespace roe
