#include "roe/controlled_k.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roe/errors.hpp"
#include "roe/format.hpp"

namespace roe {
namespace {

constexpr double kBandTolerance = 1e-9;

Matrix identity_like(const FiniteOperator& x) { return Matrix::Identity(x.dim(), x.dim()); }

// Embeds a k x k scalar matrix S as S (x) I_D.
Matrix scalar_dense(const FiniteOperator& x, const Matrix& s) {
  return FiniteOperator(x.space_ptr(), x.amplification(), Matrix::Zero(x.dim(), x.dim()), s).dense();
}

std::vector<Eigen::Index> point_coordinates(const FiniteOperator& p, std::size_t j) {
  std::vector<Eigen::Index> idx;
  for (int c = 0; c < p.amplification(); ++c) {
    for (int f = 0; f < p.space().internal_dim(j); ++f) idx.push_back(p.index(c, j, f));
  }
  return idx;
}

void require_block_diagonal(const FiniteOperator& p, double tau) {
  const RealMatrix m = block_max_modulus(p);
  for (Eigen::Index y = 0; y < m.rows(); ++y) {
    for (Eigen::Index x = 0; x < m.cols(); ++x) {
      if (x != y && m(y, x) > tau) {
        throw Error(Errc::not_block_diagonal,
                    "block (" + std::to_string(y) + ", " + std::to_string(x) + ") has modulus " + format_real(m(y, x)),
                    static_cast<std::size_t>(y));
      }
    }
  }
}

long count_upper(const RealVector& ev, double eps) {
  const double b = band_inner(std::min(eps, 0.25));
  long rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double v = ev(i);
    if (v > b - kBandTolerance && v < 1.0 - b + kBandTolerance) {
      throw Error(Errc::spectral_gap_violation, "eigenvalue " + format_real(v) + " inside the forbidden band (" +
                                                    format_real(b) + ", " + format_real(1.0 - b) + ")");
    }
    if (v >= 0.5) ++rank;
  }
  return rank;
}

}  // namespace

void QuasiParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 0.25)) throw Error(Errc::domain, "epsilon must lie in (0, 1/4)");
  if (!(r > 0.0)) throw Error(Errc::domain, "r must be positive");
}

const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

double quasi_defect(Parity parity, const FiniteOperator& x) {
  const Matrix a = x.dense();
  if (parity == Parity::even) return spectral_norm(a * a - a);
  const Matrix id = identity_like(x);
  return std::max(spectral_norm(a.adjoint() * a - id), spectral_norm(a * a.adjoint() - id));
}

QuasiWitness is_quasi_projection(const FiniteOperator& p, const QuasiParams& q, double tau) {
  QuasiWitness w;
  const Matrix a = p.dense();
  w.hermitian_defect = spectral_norm(a - a.adjoint());
  w.defect = spectral_norm(a * a - a);
  w.propagation = propagation(p, tau);
  w.ok = w.hermitian_defect <= kHermitianTolerance && w.defect < q.epsilon && w.propagation < q.r;
  return w;
}

QuasiWitness is_quasi_unitary(const FiniteOperator& u, const QuasiParams& q, double tau) {
  QuasiWitness w;
  const Matrix a = u.dense();
  const Matrix id = identity_like(u);
  w.left_defect = spectral_norm(a.adjoint() * a - id);
  w.right_defect = spectral_norm(a * a.adjoint() - id);
  w.defect = std::max(w.left_defect, w.right_defect);
  w.propagation = propagation(u, tau);
  w.ok = w.defect < q.epsilon && w.propagation < q.r;
  return w;
}

QuasiWitness is_quasi(Parity parity, const FiniteOperator& x, const QuasiParams& q, double tau) {
  return parity == Parity::even ? is_quasi_projection(x, q, tau) : is_quasi_unitary(x, q, tau);
}

QuasiParams perturb_bound(const FiniteOperator& p, const FiniteOperator& p2, const QuasiParams& q, double tau) {
  require_compatible(p, p2);
  const QuasiWitness w = is_quasi_projection(p, q, tau);
  if (!w.ok) throw Error(Errc::domain, "p is not an (eps, r)-quasi-projection");
  if (!(propagation(p2, tau) < q.r)) throw Error(Errc::domain, "perturbed operator has propagation >= r");
  const double delta = distance(p, p2);
  if (delta >= 0.25) throw Error(Errc::out_of_range, "|p - p'| = " + format_real(delta) + " >= 1/4");
  const QuasiParams out{q.epsilon + 5.0 * delta, q.r};
  const Matrix a = p.dense(), b = p2.dense();
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Matrix m = t * a + (1.0 - t) * b;
    const double d = spectral_norm(m * m - m);
    if (!(d < out.epsilon)) {
      throw Error(Errc::construction, "interpolant at t=" + format_real(t) + " has defect " + format_real(d));
    }
  }
  return out;
}

double band_outer(double eps) { return (std::sqrt(1.0 + 4.0 * eps) - 1.0) / 2.0; }
double band_inner(double eps) { return (1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * eps))) / 2.0; }

FiniteOperator kappa_even(const FiniteOperator& p, double eps) {
  const HermitianEigen e = hermitian_eigen(p.dense());
  count_upper(e.values, eps);
  RealVector f(e.values.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = e.values(i) >= 0.5 ? 1.0 : 0.0;
  Matrix proj = e.vectors * f.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  proj = (proj + proj.adjoint()).eval() * 0.5;
  if (!p.scalar_part()) return FiniteOperator(p.space_ptr(), p.amplification(), std::move(proj));
  const Matrix s = spectral_projection(*p.scalar_part(), 0.5);
  return FiniteOperator(p.space_ptr(), p.amplification(), proj - scalar_dense(p, s), s);
}

FiniteOperator kappa_odd(const FiniteOperator& u) {
  const Matrix a = u.dense();
  const Matrix v = a * inverse_sqrt(a.adjoint() * a);
  if (!u.scalar_part()) return FiniteOperator(u.space_ptr(), u.amplification(), v);
  const Matrix& s = *u.scalar_part();
  const Matrix sv = s * inverse_sqrt(s.adjoint() * s);
  return FiniteOperator(u.space_ptr(), u.amplification(), v - scalar_dense(u, sv), sv);
}

std::vector<long> k0_points(const FiniteOperator& p, const QuasiParams& q, double tau) {
  if (p.unitized()) throw Error(Errc::domain, "k0_points expects an operator without scalar part");
  require_block_diagonal(p, tau);
  const Matrix a = p.dense();
  const double defect = spectral_norm(a * a - a);
  if (!(defect < q.epsilon)) {
    throw Error(Errc::domain, "|p^2 - p| = " + format_real(defect) + " is not below epsilon");
  }
  std::vector<long> out(p.space().size(), 0);
  for (std::size_t j = 0; j < p.space().size(); ++j) {
    const auto idx = point_coordinates(p, j);
    const auto n = static_cast<Eigen::Index>(idx.size());
    Matrix b(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index r = 0; r < n; ++r) b(r, c) = a(idx[r], idx[c]);
    out[j] = count_upper(hermitian_eigenvalues(b), q.epsilon);
  }
  return out;
}

std::size_t scalar_rank(const FiniteOperator& p) {
  if (!p.scalar_part()) return 0;
  const RealVector ev = hermitian_eigenvalues(*p.scalar_part());
  return static_cast<std::size_t>((ev.array() >= 0.5).count());
}

QuasiWitness check_rep(const KClassRep& x, double tau) {
  QuasiWitness w = is_quasi(x.parity, x.rep, x.params, tau);
  if (x.parity == Parity::even && scalar_rank(x.rep) != x.ell) w.ok = false;
  return w;
}

KClassRep stabilize(const KClassRep& x, std::size_t k) {
  if (k == 0) return x;
  KClassRep out = x;
  out.rep = direct_sum(x.rep, FiniteOperator::identity(x.rep.space_ptr(), static_cast<int>(k)));
  if (x.parity == Parity::even) out.ell = x.ell + k;
  return out;
}

std::vector<long> k0_class(const KClassRep& x, double tau) {
  if (x.parity != Parity::even) throw Error(Errc::domain, "k0_class needs an even representative");
  require_block_diagonal(x.rep, tau);
  const Matrix a = x.rep.dense();
  std::vector<long> out(x.rep.space().size(), 0);
  for (std::size_t j = 0; j < x.rep.space().size(); ++j) {
    const auto idx = point_coordinates(x.rep, j);
    const auto n = static_cast<Eigen::Index>(idx.size());
    Matrix b(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index r = 0; r < n; ++r) b(r, c) = a(idx[r], idx[c]);
    out[j] = count_upper(hermitian_eigenvalues(b), x.params.epsilon) -
             static_cast<long>(x.ell) * x.rep.space().internal_dim(j);
  }
  return out;
}

double step_margin(double ambient_eps, double step, double eta_a, double eta_b) {
  return ambient_eps - (5.0 * step + std::max(eta_a, eta_b));
}

HomotopyCertificate interpolation_certificate(const FiniteOperator& p, const FiniteOperator& p2,
                                              const QuasiParams& ambient, Parity parity, double tau) {
  require_compatible(p, p2);
  const QuasiWitness a = is_quasi(parity, p, ambient, tau);
  const QuasiWitness b = is_quasi(parity, p2, ambient, tau);
  if (!a.ok || !b.ok) throw Error(Errc::no_certificate, "an endpoint fails the ambient quasi-condition");
  const double delta = distance(p, p2);
  const double margin = step_margin(ambient.epsilon, delta, a.defect, b.defect);
  if (!(margin > 0.0)) {
    throw Error(Errc::no_certificate, "5 |p - p'| + max defect = " +
                                          format_real(ambient.epsilon - margin) + " is not below " +
                                          format_real(ambient.epsilon));
  }
  return {parity, {p, p2}, ambient, {delta}};
}

HomotopyCertificate resample_certificate(const std::vector<FiniteOperator>& path, double eps,
                                         const ResampleOptions& opts) {
  if (path.empty()) throw Error(Errc::domain, "empty path");
  if (!(eps > 0.0 && 2.0 * eps < 0.25)) throw Error(Errc::domain, "resampling needs 0 < eps < 1/8");
  if (!(opts.r > 0.0)) throw Error(Errc::domain, "resampling needs a positive propagation bound r");
  const double step_cap = eps / 15.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double d = distance(path[i], path[i + 1]);
    if (d > step_cap) {
      throw Error(Errc::refine_needed, "step " + std::to_string(i) + " has norm " + format_real(d) +
                                           " > eps/15", i);
    }
  }
  std::vector<FiniteOperator> xs;
  xs.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!opts.substitute) {
      xs.push_back(path[i]);
      continue;
    }
    FiniteOperator y = truncate_propagation(path[i], opts.r);
    const double d = distance(path[i], y);
    if (d > eps / 20.0) {
      throw Error(Errc::refine_needed, "sample " + std::to_string(i) + " is " + format_real(d) +
                                           " from its truncation (> eps/20)", i);
    }
    xs.push_back(std::move(y));
  }

  HomotopyCertificate c{opts.parity, {xs[0]}, {2.0 * eps, opts.r}, {}};
  std::size_t i = 0;
  const std::size_t last = xs.size() - 1;
  while (i < last) {
    std::size_t j = i + 1;
    double dj = distance(xs[i], xs[j]);
    while (j < last) {
      const double dn = distance(xs[i], xs[j + 1]);
      if (dn > step_cap) break;
      ++j;
      dj = dn;
    }
    c.samples.push_back(xs[j]);
    c.step_bounds.push_back(dj);
    i = j;
  }
  const CertificateReport rep = verify_certificate(c, opts.tau);
  if (!rep.ok) {
    const std::size_t at = rep.bad_sample ? *rep.bad_sample : rep.bad_step.value_or(0);
    throw Error(Errc::refine_needed, "resampled certificate fails verification: " + rep.reason, at);
  }
  return c;
}

CertificateReport verify_certificate(const HomotopyCertificate& c, double tau) {
  CertificateReport rep;
  rep.worst_step_margin = std::numeric_limits<double>::infinity();
  const auto fail = [&rep](std::string why) {
    if (rep.reason.empty()) rep.reason = std::move(why);
  };
  if (c.samples.empty()) {
    fail("certificate has no samples");
    return rep;
  }
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    const QuasiWitness w = is_quasi(c.parity, c.samples[i], c.params, tau);
    rep.defects.push_back(w.defect);
    rep.propagations.push_back(w.propagation);
    rep.worst_defect = std::max(rep.worst_defect, w.defect);
    rep.worst_propagation = max(rep.worst_propagation, w.propagation);
    if (!w.ok && !rep.bad_sample) {
      rep.bad_sample = i;
      fail("sample " + std::to_string(i) + " fails the quasi-test (defect " + format_real(w.defect) +
           ", propagation " + w.propagation.to_string() + ")");
    }
  }
  if (c.step_bounds.size() + 1 != c.samples.size()) {
    fail("step bound count does not match sample count");
    return rep;
  }
  for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
    const double measured = distance(c.samples[i], c.samples[i + 1]);
    rep.measured_steps.push_back(measured);
    const double bound = c.step_bounds[i];
    const double margin = step_margin(c.params.epsilon, bound, rep.defects[i], rep.defects[i + 1]);
    rep.worst_step_margin = std::min(rep.worst_step_margin, margin);
    if (!rep.bad_step && (bound < measured - 1e-12 || !(margin > 0.0))) {
      rep.bad_step = i;
      fail(bound < measured - 1e-12 ? "recorded step bound " + std::to_string(i) + " is below the measured distance"
                                    : "step " + std::to_string(i) + " violates the perturbation margin");
    }
  }
  rep.ok = !rep.bad_sample && !rep.bad_step && rep.reason.empty();
  return rep;
}

}  // namespace roe
