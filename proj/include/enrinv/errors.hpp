#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace enrinv {

enum class ErrorKind {
  DegenerateForm,
  DependentRows,
  UnknownName,
  OddLattice,
  NotTwoElementary,
  NotOrthogonal,
  NotIsotropic,
  IndefiniteLattice,
  ResourceLimit,
  NotExtendable,
  UnsupportedExponent,
  NotDoubled,
  NoEmbedding,
  NoMatch,
  AmbiguousMatch,
  NoAdmissibleGlue,
  NotPowerOfTwo,
  CatalogInconsistent,
  Parse,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateForm: return "DegenerateForm";
    case ErrorKind::DependentRows: return "DependentRows";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::OddLattice: return "OddLattice";
    case ErrorKind::NotTwoElementary: return "NotTwoElementary";
    case ErrorKind::NotOrthogonal: return "NotOrthogonal";
    case ErrorKind::NotIsotropic: return "NotIsotropic";
    case ErrorKind::IndefiniteLattice: return "IndefiniteLattice";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::NotExtendable: return "NotExtendable";
    case ErrorKind::UnsupportedExponent: return "UnsupportedExponent";
    case ErrorKind::NotDoubled: return "NotDoubled";
    case ErrorKind::NoEmbedding: return "NoEmbedding";
    case ErrorKind::NoMatch: return "NoMatch";
    case ErrorKind::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorKind::NoAdmissibleGlue: return "NoAdmissibleGlue";
    case ErrorKind::NotPowerOfTwo: return "NotPowerOfTwo";
    case ErrorKind::CatalogInconsistent: return "CatalogInconsistent";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` carries the error class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace enrinv
