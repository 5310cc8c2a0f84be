#pragma once

#include <string>
#include <utility>

#include "lyapcert/certifier.hpp"

namespace lyapcert {

/// Nested sets X1 (open) containing X2 containing the closed target, with a
/// Lyapunov pair (W1, W1~) that drives states from X1 into cl X2 and a pair
/// (W2, W2~) that drives states from X2 to the target.
struct TransitivityInstance {
  std::string id;
  Region x1;
  Region x2;
  Region target;
  ScalarField w1;
  ScalarField w2;
  ScalarField w1_tilde;
  ScalarField w2_tilde;
  Inclusion inclusion;
};

/// Checks a-i..a-iv, b-i..b-iv and c on samples. b-ii is only checked on X2
/// (W2~ may be positive outside it); c is checked on all of X1. Points of
/// X1 \ X2 where W2~ > 0 but c still holds are collected as rescued points.
TransitivitySection check_transitivity_conditions(
    const TransitivityInstance& inst, const GridSampler& sampler,
    const Tolerances& tol = default_tolerances());

/// W = kappa W1 + W2 and W~ = kappa W1~ + W2~. DW is defined only where both
/// DW1 and DW2 are.
std::pair<ScalarField, ScalarField> compose_transitive(
    const TransitivityInstance& inst, double kappa = 2.0,
    const Tolerances& tol = default_tolerances());

/// Checks the conditions, scans the zero sets of the composite pair over
/// cl X1 and, when every condition holds, certifies the composite pair on
/// (X1, target). With failed conditions the certificate fails, lists them in
/// transitivity->failed_conditions and skips the trajectory suites.
Certificate certify_transitive(const TransitivityInstance& inst,
                               const CertifyOptions& options = {},
                               double kappa = 2.0);

}  // namespace lyapcert
