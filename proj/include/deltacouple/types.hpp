#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace deltacouple {

using Complex = std::complex<double>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXc = MatrixX<Complex>;
using VectorXc = VectorX<Complex>;

/// Value and first x-derivative of a solution at one point.
struct ValueSlope {
  Complex value;
  Complex slope;
};

enum class ErrorCode {
  InvalidArgument,
  Threshold,
  NoIncidentWave,
  OutOfRange,
  GammaPole,
  BranchPoint,
  Degenerate,
  DefectiveBasis,
  GreenPole,
  UseMatcher,
  GridUnderresolved,
  Config,
};

/// The single exception type thrown by the library. The message names the
/// offending field or condition; code() allows programmatic dispatch.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace deltacouple
