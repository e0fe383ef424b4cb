#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "roe/operator.hpp"

namespace roe {

using Rng = std::mt19937_64;

// Independent stream seed for (master, stream); splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

Complex complex_normal(Rng& rng);
Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);
Matrix random_hermitian(Eigen::Index n, Rng& rng);
// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
Matrix haar_unitary(Eigen::Index n, Rng& rng);

// Gaussian entries on every block (y, x) with d(y, x) < r; no scalar part.
FiniteOperator random_banded(SpacePtr space, int k, double r, Rng& rng, bool hermitian = false);

// Hermitian banded operator of propagation < r with operator norm exactly `norm`.
FiniteOperator random_perturbation(SpacePtr space, int k, double norm, double r, Rng& rng);

// p = V D V* with V = exp(i theta H) for a banded Hermitian H and D a random
// {0,1} diagonal plus noise of size <= eps/2, truncated to propagation < r.
// theta is halved until |p^2 - p| < eps.
FiniteOperator random_quasi_projection(SpacePtr space, int k, double eps, double r, Rng& rng);

// Block-diagonal over points: at point j an exact projection of rank ranks[j]
// in a random basis, plus a Hermitian perturbation of norm `noise`.
FiniteOperator random_pointwise_projection(SpacePtr space, const std::vector<int>& ranks, double noise,
                                           Rng& rng);

// Unitized 1 + (e^{i theta} - 1) psi psi* for a unit vector psi.
FiniteOperator phase_unitary(SpacePtr space, const Vector& psi, double theta);

}  // namespace roe
