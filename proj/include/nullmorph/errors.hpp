#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nullmorph {

/// Failure classes raised by the library. The CLI maps these onto exit codes.
enum class ErrorKind {
  contraction_error,
  not_null,
  zero_vector,
  singular_matrix,
  division_by_singular_jet,
  order_mismatch,
  degenerate_curve,
  generation_exhausted,
  singular_tangent,
  not_null_tangent,
  singular_correspondence,
  insufficient_jet_order,
  degenerate_image,
  singular_image,
  singular_denominator,
  singular_patch,
  singular_base_point,
  degenerate_tangent,
  non_finite,
  unknown_suite,
  config_invalid,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::contraction_error: return "ContractionError";
    case ErrorKind::not_null: return "NotNull";
    case ErrorKind::zero_vector: return "ZeroVector";
    case ErrorKind::singular_matrix: return "SingularMatrix";
    case ErrorKind::division_by_singular_jet: return "DivisionBySingularJet";
    case ErrorKind::order_mismatch: return "OrderMismatch";
    case ErrorKind::degenerate_curve: return "DegenerateCurve";
    case ErrorKind::generation_exhausted: return "GenerationExhausted";
    case ErrorKind::singular_tangent: return "SingularTangent";
    case ErrorKind::not_null_tangent: return "NotNullTangent";
    case ErrorKind::singular_correspondence: return "SingularCorrespondence";
    case ErrorKind::insufficient_jet_order: return "InsufficientJetOrder";
    case ErrorKind::degenerate_image: return "DegenerateImage";
    case ErrorKind::singular_image: return "SingularImage";
    case ErrorKind::singular_denominator: return "SingularDenominator";
    case ErrorKind::singular_patch: return "SingularPatch";
    case ErrorKind::singular_base_point: return "SingularBasePoint";
    case ErrorKind::degenerate_tangent: return "DegenerateTangent";
    case ErrorKind::non_finite: return "NonFinite";
    case ErrorKind::unknown_suite: return "UnknownSuite";
    case ErrorKind::config_invalid: return "ConfigInvalid";
  }
  return "Unknown";
}

/// True for errors caused by a degenerate geometric input rather than misuse.
constexpr bool is_singular_input(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::unknown_suite:
    case ErrorKind::config_invalid:
    case ErrorKind::contraction_error:
    case ErrorKind::order_mismatch:
    case ErrorKind::insufficient_jet_order:
      return false;
    default:
      return true;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nullmorph
