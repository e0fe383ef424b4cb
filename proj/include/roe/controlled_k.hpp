#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roe/ext_real.hpp"
#include "roe/operator.hpp"

namespace roe {

struct QuasiParams {
  double epsilon = 0.0;
  double r = 0.0;
  // Throws Error(domain) unless 0 < epsilon < 1/4 and r > 0.
  void validate() const;
};

enum class Parity { even, odd };
const char* to_string(Parity p);

struct QuasiWitness {
  bool ok = false;
  // even: |p - p*|; odd: unused (0)
  double hermitian_defect = 0.0;
  // even: |p^2 - p|; odd: max(|u*u - 1|, |uu* - 1|)
  double defect = 0.0;
  double left_defect = 0.0;   // odd: |u*u - 1|
  double right_defect = 0.0;  // odd: |uu* - 1|
  ExtReal propagation;
};

inline constexpr double kHermitianTolerance = 1e-12;

QuasiWitness is_quasi_projection(const FiniteOperator& p, const QuasiParams& q, double tau = kDefaultTau);
QuasiWitness is_quasi_unitary(const FiniteOperator& u, const QuasiParams& q, double tau = kDefaultTau);
QuasiWitness is_quasi(Parity parity, const FiniteOperator& x, const QuasiParams& q, double tau = kDefaultTau);

// |x^2 - x| (even) or max(|x*x - 1|, |xx* - 1|) (odd), with no other checks.
double quasi_defect(Parity parity, const FiniteOperator& x);

// (epsilon + 5 delta, r) for delta = |p - p'|; checks p' and interpolants.
QuasiParams perturb_bound(const FiniteOperator& p, const FiniteOperator& p2, const QuasiParams& q,
                          double tau = kDefaultTau);

// Edges of the spectral band allowed for |p^2 - p| < eps: eigenvalues lie in
// [-a, b] u [1 - b, 1 + a] with a = (sqrt(1+4eps)-1)/2, b = (1-sqrt(1-4eps))/2.
double band_outer(double eps);
double band_inner(double eps);

// chi_{[1/2, inf)}(p). Eigenvalues inside the forbidden band
// (b, 1 - b) for the given eps, or within 1e-9 of its edges, raise
// Error(spectral_gap_violation). A scalar part S is carried as chi(S).
FiniteOperator kappa_even(const FiniteOperator& p, double eps = 0.25);

// u (u*u)^{-1/2}; Error(singular) when u*u is not invertible.
FiniteOperator kappa_odd(const FiniteOperator& u);

// Rank of chi(p) restricted to each point's diagonal block (all copies). The
// operator must be block diagonal over points (Error(not_block_diagonal)) and
// carry no scalar part.
std::vector<long> k0_points(const FiniteOperator& p, const QuasiParams& q, double tau = kDefaultTau);

struct KClassRep {
  Parity parity = Parity::even;
  FiniteOperator rep;
  std::size_t ell = 0;
  QuasiParams params;
};

// Rank of chi(scalar part); 0 without one.
std::size_t scalar_rank(const FiniteOperator& p);

// Quasi test plus, for even parity, chi(scalar part) rank == ell.
QuasiWitness check_rep(const KClassRep& x, double tau = kDefaultTau);

// diag(rep, I_k); ell grows by k for even parity.
KClassRep stabilize(const KClassRep& x, std::size_t k);

// Per point: rank chi(p)_j - ell * internal_dim(j) (scalar identity removed).
std::vector<long> k0_class(const KClassRep& x, double tau = kDefaultTau);

struct HomotopyCertificate {
  Parity parity = Parity::even;
  std::vector<FiniteOperator> samples;
  QuasiParams params;  // ambient
  std::vector<double> step_bounds;
};

// Margin of one certificate step: eps - (5 step + max(eta_i, eta_{i+1})).
double step_margin(double ambient_eps, double step, double eta_a, double eta_b);

HomotopyCertificate interpolation_certificate(const FiniteOperator& p, const FiniteOperator& p2,
                                              const QuasiParams& ambient, Parity parity = Parity::even,
                                              double tau = kDefaultTau);

struct ResampleOptions {
  Parity parity = Parity::even;
  double r = 0.0;             // propagation bound of the admissible replacements
  bool substitute = false;    // replace samples by truncate_propagation(x, r)
  double tau = kDefaultTau;
};

// Checks steps <= eps/15 (and substitutes within eps/20 when requested),
// coarsens greedily keeping steps <= eps/15, and verifies the result at
// (2 eps, r). Error(refine_needed) carries the offending index.
HomotopyCertificate resample_certificate(const std::vector<FiniteOperator>& path, double eps,
                                         const ResampleOptions& opts);

struct CertificateReport {
  bool ok = false;
  std::vector<double> defects;
  std::vector<ExtReal> propagations;
  std::vector<double> measured_steps;
  double worst_defect = 0.0;
  ExtReal worst_propagation;
  double worst_step_margin = 0.0;  // min over steps of step_margin (+inf when no steps)
  std::optional<std::size_t> bad_sample;
  std::optional<std::size_t> bad_step;
  std::string reason;
};

CertificateReport verify_certificate(const HomotopyCertificate& c, double tau = kDefaultTau);

}  // namespace roe
