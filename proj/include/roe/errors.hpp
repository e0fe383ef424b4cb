#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace roe {

enum class Errc {
  malformed_input,
  domain,
  shape_mismatch,
  unknown_simplex,
  unsupported_decomposition,
  spectral_gap_violation,
  not_block_diagonal,
  out_of_range,
  no_certificate,
  refine_needed,
  capacity,
  resolution,
  construction,
  propagation_violation,
  support_violation,
  detector_inconclusive,
  no_decay,
  domain_collapse,
  singular,
};

const char* to_string(Errc code);

// Single exception type for every recoverable failure in the library. The
// code tells callers (and the CLI exit-status mapping) what went wrong;
// `index` carries the offending sample / point / frame where one exists.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt,
        std::string stage = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        index_(index),
        stage_(std::move(stage)) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  Errc code_;
  std::optional<std::size_t> index_;
  std::string stage_;
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::malformed_input: return "malformed-input";
    case Errc::domain: return "domain";
    case Errc::shape_mismatch: return "shape-mismatch";
    case Errc::unknown_simplex: return "unknown-simplex";
    case Errc::unsupported_decomposition: return "unsupported-decomposition";
    case Errc::spectral_gap_violation: return "spectral-gap-violation";
    case Errc::not_block_diagonal: return "not-block-diagonal";
    case Errc::out_of_range: return "out-of-range";
    case Errc::no_certificate: return "no-certificate";
    case Errc::refine_needed: return "refine-needed";
    case Errc::capacity: return "capacity";
    case Errc::resolution: return "resolution";
    case Errc::construction: return "construction";
    case Errc::propagation_violation: return "propagation-violation";
    case Errc::support_violation: return "support-violation";
    case Errc::detector_inconclusive: return "detector-inconclusive";
    case Errc::no_decay: return "no-decay";
    case Errc::domain_collapse: return "domain-collapse";
    case Errc::singular: return "singular";
  }
  return "unknown";
}

}  // namespace roe
