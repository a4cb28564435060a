#pragma once

#include <stdexcept>
#include <string>

namespace projequiv {

// Every recoverable failure in the library carries one of these codes so that
// callers (and the CLI exit-code mapping) can react without string matching.
enum class ErrorCode {
  OutOfDomain,        // point or FD stencil leaves the chart box
  NonFiniteSample,    // a field evaluation produced NaN/Inf
  SingularMetric,     // |det g| below cutoff at an evaluation point
  SingularTensor,     // (1,1)-tensor not invertible where an inverse is needed
  SingularMobius,     // det of a 2x2 coefficient matrix is zero
  NegativeDetRoot,    // real (1+d)-th root of det does not exist
  DegeneratePlane,    // sectional curvature plane has |Gram det| < cutoff
  DegenerateVelocity, // g(v,v) = 0 along an entire candidate path
  StepTooLarge,       // geodesic energy drift exceeded the safety bound
  NonPositiveWarp,    // warp factor fails positivity on the sampled range
  NearDegenerate,     // det L too close to 0 for the N functional
  ScalarK,            // homography fit needs K not proportional to I
  BadFit,             // least-squares residual too large to trust coefficients
  NotHyperbolic,      // product limit requires a hyperbolic matrix
  ZeroFixedPoint,     // attracting fixed point at 0 cannot normalize products
  OutOfBasin,         // seed value outside [lambda_minus, lambda_plus)
  BadOrder,           // eigenvalue data violates lambda_minus < lambda_plus
  EmptyInput,         // an operation got an empty list where data is required
  RangeOverlap,       // Dini construction needs sup Y < inf X
  PositivityFailure,  // model profile function fails a positivity bound
  NonPositiveEigen,   // distortion factors need strictly positive eigen data
  DimensionTooLow,    // projective Weyl tensor needs d >= 3
  BadArgument,        // malformed sizes, counts, or configuration values
};

const char* error_code_name(ErrorCode code);

class ProjError : public std::runtime_error {
 public:
  ProjError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace projequiv
