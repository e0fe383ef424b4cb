#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "roe/coarse.hpp"
#include "roe/controlled_k.hpp"
#include "roe/geometry.hpp"
#include "roe/operator.hpp"
#include "roe/paths.hpp"

namespace roe {

// All readers throw Error(malformed_input) with the 1-based line number in the
// message; Error(shape_mismatch) when a space hash does not match.

// One maximal simplex per line, whitespace-separated vertex ids. Blank lines
// and lines starting with '#' are skipped.
SimplicialComplex parse_complex(std::string_view text);
std::string write_complex(const SimplicialComplex& x);

// Tab-separated: header, one row per point (id, carrier, fiber, weights),
// then the distance matrix with "inf" for infinity.
std::string write_space(const SampledSpace& s);
SampledSpace parse_space(std::string_view text);

// Header (space hash, amplification, dimension, scalar part) then row-major
// "re im" pairs at 17 significant digits.
std::string write_operator(const FiniteOperator& t);
FiniteOperator parse_operator(std::string_view text, const SpacePtr& space);

std::string write_certificate(const HomotopyCertificate& c);
HomotopyCertificate parse_certificate(std::string_view text, const SpacePtr& space);

std::string write_kclass(const KClassRep& x);
KClassRep parse_kclass(std::string_view text, const SpacePtr& space);

std::string write_path(const PathOperator& p);
PathOperator parse_path(std::string_view text, const SpacePtr& space);

std::string write_coarse_map(const CoarseMap& f);
CoarseMap parse_coarse_map(std::string_view text, const SpacePtr& source, const SpacePtr& target);

std::string write_frames(const LipschitzHomotopy& h);
LipschitzHomotopy parse_frames(std::string_view text, const SpacePtr& source, const SpacePtr& target);

// Error(malformed_input) when the file cannot be read.
std::string read_file(const std::filesystem::path& p);
// Writes to a sibling temporary file, then renames over p.
void write_file_atomic(const std::filesystem::path& p, std::string_view content);

}  // namespace roe
