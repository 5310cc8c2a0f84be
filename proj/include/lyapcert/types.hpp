#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace lyapcert {

/// A state x in the ambient space R^A.
using Point = Eigen::VectorXd;

/// Numerical tolerances shared by the whole toolkit. The defaults are the
/// values the certificate reports; callers may override them per run.
struct Tolerances {
  double eps_bd = 1e-9;    // closure / interior membership slack
  double eps_num = 1e-9;   // sign and zero-set tests
  double delta_fd = 1e-5;  // central finite-difference step
  double tol_grad = 1e-6;  // relative gradient-check tolerance
  double tol_kink = 1e-3;  // one-sided slope disagreement => kink
  double tol_tie = 1e-9;   // payoff ties in argmax inclusions
  double lipschitz_inflation = 1.2;
  double max_kink_fraction = 0.01;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

enum class ErrorCode {
  kEmptyTarget,
  kEmptyRegion,
  kNotStrictSubset,
  kNonpositiveResult,
  kEmptyAnnulus,
  kNonpositiveLevel,
  kStepTooLarge,
  kLeftDomain,
  kTooManyKinks,
  kUnknownFamily,
  kUnsupportedFamily,
  kPreconditionFailed,
  kSchemaMismatch,
  kInvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure the toolkit reports carries one of the codes
/// above so the CLI can map it onto exit statuses and diagnostics.
class CertError : public std::runtime_error {
 public:
  CertError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lyapcert
