#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "roe/ext_real.hpp"

namespace roe {

// Sorted vertex ids.
using Simplex = std::vector<int>;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  // Face closure of the given maximal simplices. Throws Error(malformed_input)
  // on an empty simplex or a repeated vertex inside one simplex.
  static SimplicialComplex build(const std::vector<std::vector<int>>& maximal);

  const std::vector<int>& vertices() const { return vertices_; }
  // Sorted by dimension, then lexicographically.
  const std::vector<Simplex>& simplices() const { return simplices_; }
  // Indices (into simplices()) of the simplices that are not proper faces.
  const std::vector<std::size_t>& maximal() const { return maximal_; }
  int dimension() const { return dimension_; }

  std::optional<std::size_t> find(const Simplex& s) const;
  bool contains(const Simplex& s) const { return find(s).has_value(); }
  // Throws Error(unknown_simplex).
  std::size_t index_of(const Simplex& s) const;
  int simplex_dimension(std::size_t idx) const {
    return static_cast<int>(simplices_.at(idx).size()) - 1;
  }
  std::vector<std::size_t> simplices_of_dimension(int d) const;

 private:
  std::vector<int> vertices_;
  std::vector<Simplex> simplices_;
  std::vector<std::size_t> maximal_;
  int dimension_ = -1;
};

SimplicialComplex build_complex(const std::vector<std::vector<int>>& maximal);

// A point of |X|: carrier simplex index plus strictly positive barycentric
// weights on the carrier's vertices (in the carrier's vertex order).
struct SamplePoint {
  std::size_t carrier = npos;
  std::vector<double> weights;
};

// Barycentric weights of `p` expressed on the vertices of `host`; p's carrier
// must be a face of host.
std::vector<double> weights_on(const SimplicialComplex& x, const SamplePoint& p, const Simplex& host);

// Angle between t/|t| and s/|s|.
double spherical_distance(const std::vector<double>& t, const std::vector<double>& s);

using SubsetMask = std::vector<bool>;

SubsetMask mask_all(std::size_t n, bool value = true);
SubsetMask mask_and(const SubsetMask& a, const SubsetMask& b);
SubsetMask mask_or(const SubsetMask& a, const SubsetMask& b);
SubsetMask mask_not(const SubsetMask& a);
SubsetMask mask_minus(const SubsetMask& a, const SubsetMask& b);
std::size_t mask_count(const SubsetMask& a);
bool mask_subset(const SubsetMask& a, const SubsetMask& b);

class SampledSpace {
 public:
  // dist holds +inf between components. Throws Error(malformed_input) when the
  // matrix is not square, not symmetric, has a nonzero diagonal or negative
  // entries, or when an internal dimension is < 1.
  SampledSpace(std::vector<SamplePoint> points, Eigen::MatrixXd dist, std::vector<int> internal_dims,
               double mesh);

  // Abstract finite metric space (no carriers). Also checks the triangle
  // inequality on all triples.
  static SampledSpace from_distances(const Eigen::MatrixXd& dist, std::vector<int> internal_dims);

  std::size_t size() const { return points_.size(); }
  const std::vector<SamplePoint>& points() const { return points_; }
  const SamplePoint& point(std::size_t i) const { return points_.at(i); }
  ExtReal dist(std::size_t i, std::size_t j) const { return ExtReal(dist_(i, j)); }
  const Eigen::MatrixXd& distances() const { return dist_; }
  const std::vector<int>& internal_dims() const { return dims_; }
  int internal_dim(std::size_t i) const { return dims_.at(i); }
  // Sum of internal dimensions.
  std::size_t total_dim() const { return total_; }
  // Position of point i's first fiber coordinate.
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  // Point owning a fiber coordinate.
  std::size_t point_of(std::size_t coord) const { return owner_.at(coord); }
  double mesh() const { return mesh_; }
  std::uint64_t hash() const { return hash_; }

  // Sub-space on the kept points with the given fiber dimensions (entries for
  // dropped points are ignored).
  SampledSpace subspace(const SubsetMask& keep, const std::vector<int>& dims) const;
  SampledSpace with_internal_dims(std::vector<int> dims) const;

  // Worst violation d(i,k) - d(i,j) - d(j,k) over finite triples (<= 0 when the
  // triangle inequality holds).
  double triangle_defect() const;

  ExtReal dist_to_set(std::size_t i, const SubsetMask& a) const;

 private:
  std::vector<SamplePoint> points_;
  Eigen::MatrixXd dist_;
  std::vector<int> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> owner_;
  std::size_t total_ = 0;
  double mesh_ = 0.0;
  std::uint64_t hash_ = 0;
};

// Barycentric lattice refinement m used for a given mesh on a complex of the
// given dimension.
int lattice_refinement(int dimension, double mesh);

SampledSpace discretize(const SimplicialComplex& x, double mesh, int fiber_dim);

// Sample index of a point with the given carrier and weights, if present.
std::optional<std::size_t> find_sample(const SampledSpace& s, const SamplePoint& p);

SubsetMask neighborhood(const SampledSpace& s, const SubsetMask& a, double r);

struct Decomposition {
  SubsetMask x1;
  SubsetMask x2;
};

inline constexpr double kInnerThreshold = 0.45;
inline constexpr double kOuterThreshold = 0.55;

// Distance from the center of the top simplex `top` to sample i (which must lie
// in a face of top).
double center_distance(const SampledSpace& s, const SimplicialComplex& x, std::size_t top,
                       std::size_t i);

// Per-sample minimum center distance over the top-dimensional simplices
// containing it; +inf for samples that lie in no top simplex.
std::vector<double> center_distances(const SampledSpace& s, const SimplicialComplex& x);

Decomposition decompose(const SampledSpace& s, const SimplicialComplex& x);

SamplePoint simplex_center(const SimplicialComplex& x, const Simplex& sigma);

enum class RetractionKind { cluster_to_centers, collapse_to_skeleton };

class RetractionTable {
 public:
  explicit RetractionTable(std::vector<std::size_t> target) : target_(std::move(target)) {}
  // Throws Error(domain) for samples outside the mask.
  std::size_t at(std::size_t i) const;
  bool defined(std::size_t i) const { return i < target_.size() && target_[i] != npos; }
  const std::vector<std::size_t>& table() const { return target_; }

 private:
  std::vector<std::size_t> target_;
};

RetractionTable retract_onto_pieces(const SampledSpace& s, const SimplicialComplex& x,
                                    const SubsetMask& mask, RetractionKind kind);

// For a complex whose geometric realization is a circle (connected, every
// vertex of degree 2): samples in cyclic order starting at the smallest
// vertex and heading toward its smaller neighbor. Throws Error(domain).
std::vector<std::size_t> cyclic_order(const SampledSpace& s, const SimplicialComplex& x);

}  // namespace roe
