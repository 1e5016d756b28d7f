#pragma once

#include <stdexcept>
#include <string>

namespace treecorr {

/// Stable error codes. The CLI reports these verbatim in its JSON error block.
enum class ErrorCode {
  kDimension = 10,
  kIndex = 11,
  kOrder = 12,
  kHViolation = 13,
  kNotRepresentable = 14,
  kInfeasibleDecomposition = 15,
  kBudgetExceeded = 16,
  kUnsupportedFamily = 17,
  kFamilyMismatch = 18,
  kMeanMismatch = 19,
  kInconsistency = 20,
  kMissingVertex = 21,
  kCouplingUnavailable = 22,
  kUnbounded = 23,
  kNumericalFailure = 24,
  kDegenerateMass = 25,
  kParse = 26,
  kInvalidArgument = 27,
  kTreeMismatch = 28,
};

const char* error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define TREECORR_DEFINE_ERROR(Name, Code)                                   \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  }

TREECORR_DEFINE_ERROR(DimensionError, kDimension);
TREECORR_DEFINE_ERROR(IndexError, kIndex);
TREECORR_DEFINE_ERROR(OrderError, kOrder);
TREECORR_DEFINE_ERROR(NotRepresentable, kNotRepresentable);
TREECORR_DEFINE_ERROR(BudgetExceeded, kBudgetExceeded);
TREECORR_DEFINE_ERROR(UnsupportedFamily, kUnsupportedFamily);
TREECORR_DEFINE_ERROR(FamilyMismatch, kFamilyMismatch);
TREECORR_DEFINE_ERROR(MeanMismatch, kMeanMismatch);
TREECORR_DEFINE_ERROR(Inconsistency, kInconsistency);
TREECORR_DEFINE_ERROR(MissingVertex, kMissingVertex);
TREECORR_DEFINE_ERROR(CouplingUnavailable, kCouplingUnavailable);
TREECORR_DEFINE_ERROR(Unbounded, kUnbounded);
TREECORR_DEFINE_ERROR(NumericalFailure, kNumericalFailure);
TREECORR_DEFINE_ERROR(DegenerateMass, kDegenerateMass);
TREECORR_DEFINE_ERROR(ParseError, kParse);
TREECORR_DEFINE_ERROR(InvalidArgument, kInvalidArgument);
TREECORR_DEFINE_ERROR(TreeMismatch, kTreeMismatch);

#undef TREECORR_DEFINE_ERROR

}  // namespace treecorr
