#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lyapcert/types.hpp"

namespace lyapcert {

enum class Smoothness { kLipschitz, kC1, kLowerSemicontinuous };

/// A Lyapunov candidate W or decay-rate candidate W~. The evaluator is
/// mandatory; a closed-form gradient is optional and may itself report a
/// point of nondifferentiability by returning std::nullopt.
class ScalarField {
 public:
  using Evaluator = std::function<double(const Point&)>;
  using Gradient = std::function<std::optional<Point>(const Point&)>;

  ScalarField() = default;
  ScalarField(std::string name, Evaluator value, Gradient gradient = {},
              Smoothness smoothness = Smoothness::kLipschitz);

  double operator()(const Point& x) const { return value_(x); }

  const std::string& name() const noexcept { return name_; }
  Smoothness smoothness() const noexcept { return smoothness_; }
  bool has_closed_form_gradient() const noexcept {
    return static_cast<bool>(gradient_);
  }
  const Gradient& closed_form_gradient() const noexcept { return gradient_; }
  const Evaluator& evaluator() const noexcept { return value_; }
  std::optional<double> lipschitz() const noexcept { return lipschitz_; }
  bool valid() const noexcept { return static_cast<bool>(value_); }

  ScalarField renamed(std::string name) const;
  ScalarField with_lipschitz(double constant) const;
  /// Same values, tagged as a decay-rate function: gradient queries on the
  /// result are a logic error.
  ScalarField as_decay_rate() const;
  /// Drops the closed-form gradient so derivatives fall back to finite
  /// differences.
  ScalarField without_gradient() const;

 private:
  std::string name_;
  Evaluator value_;
  Gradient gradient_;
  Smoothness smoothness_ = Smoothness::kLipschitz;
  std::optional<double> lipschitz_;
};

/// DW(x). Uses the closed form when present, else central differences with
/// step tol.delta_fd. Returns std::nullopt at a detected kink (one-sided
/// slopes disagreeing by more than tol.tol_kink); that is an answer, not a
/// failure. Throws std::logic_error for decay-rate tagged fields.
std::optional<Point> grad(const ScalarField& f, const Point& x,
                          const Tolerances& tol = default_tolerances());

std::optional<Point> finite_difference_gradient(
    const ScalarField& f, const Point& x,
    const Tolerances& tol = default_tolerances());

/// <DW(x), v>, or std::nullopt where W is not differentiable.
std::optional<double> directional_decrease(
    const ScalarField& f, const Point& x, const Point& v,
    const Tolerances& tol = default_tolerances());

struct GradientCheckReport {
  std::size_t checked = 0;
  std::size_t agreeing = 0;
  double max_relative_error = 0.0;  // over agreeing points
  std::vector<Point> disagreements;  // nondifferentiability witnesses

  double agreement_fraction() const {
    return checked == 0 ? 1.0 : static_cast<double>(agreeing) / checked;
  }
};

/// Compares the closed-form gradient with central differences at each point.
/// A point agrees when max_i |g_i - fd_i| <= tol_grad * max(1, |g|_inf).
GradientCheckReport check_gradient(const ScalarField& f,
                                   const std::vector<Point>& points,
                                   const Tolerances& tol = default_tolerances());

/// Builtin field library; every builtin carries a closed-form gradient.
namespace fields {

ScalarField constant(double c);
ScalarField coordinate(int index);
/// g . x + offset
ScalarField linear(Eigen::VectorXd g, double offset = 0.0);
/// scale * (x - c)^T Q (x - c); Q is symmetrised.
ScalarField quadratic(Eigen::MatrixXd q, Eigen::VectorXd center,
                      double scale = 1.0);
ScalarField norm_sq(Eigen::VectorXd center);
/// ||x - c||_p for p in {1, 2}; kinks are reported as nondifferentiable.
ScalarField norm(Eigen::VectorXd center, int p = 2);

ScalarField scaled(const ScalarField& f, double factor);
ScalarField shifted(const ScalarField& f, double offset);
ScalarField sum(const std::vector<double>& weights,
                const std::vector<ScalarField>& terms);
ScalarField product(const ScalarField& a, const ScalarField& b);
/// f^2; differentiable with zero gradient wherever f vanishes.
ScalarField square(const ScalarField& f);
/// max(0, f)
ScalarField positive_part(const ScalarField& f);
/// |f|; nondifferentiable where f crosses zero.
ScalarField abs(const ScalarField& f);

}  // namespace fields

}  // namespace lyapcert
