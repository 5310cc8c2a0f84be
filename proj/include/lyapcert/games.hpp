#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "lyapcert/inclusion.hpp"
#include "lyapcert/region.hpp"
#include "lyapcert/verdict.hpp"

namespace lyapcert {

/// A single-population game: payoffs F : simplex -> R^A.
class PopulationGame {
 public:
  using Payoff = std::function<Point(const Point&)>;
  using Jacobian = std::function<Eigen::MatrixXd(const Point&)>;

  /// Without a closed-form Jacobian, DF is taken by central differences.
  PopulationGame(std::string name, int strategies, Payoff payoff,
                 Jacobian jacobian = {});

  /// F(x) = M x + offset.
  static PopulationGame matrix(std::string name, Eigen::MatrixXd m,
                               Eigen::VectorXd offset = {});
  /// Standard rock-paper-scissors, zero-sum.
  static PopulationGame rps();
  /// F(x) = -x + c: negative definite with interior equilibrium c (when c
  /// lies in the simplex).
  static PopulationGame neg_identity(Eigen::VectorXd c);
  /// F(x) = x.
  static PopulationGame coordination(int strategies = 3);

  const std::string& name() const noexcept { return name_; }
  int strategies() const noexcept { return strategies_; }
  CompactDomain domain() const { return CompactDomain::simplex(strategies_); }
  Point payoff(const Point& x) const { return payoff_(x); }
  Eigen::MatrixXd jacobian(const Point& x) const;
  bool has_closed_form_jacobian() const noexcept {
    return static_cast<bool>(jacobian_);
  }
  /// max_i F_i(x) - x . F(x); zero exactly at Nash equilibria.
  double best_response_gain(const Point& x) const;

 private:
  std::string name_;
  int strategies_;
  Payoff payoff_;
  Jacobian jacobian_;
};

/// Central-difference Jacobian of a payoff map.
Eigen::MatrixXd finite_difference_jacobian(const PopulationGame::Payoff& f,
                                           const Point& x, double step = 1e-5);

/// max of z^T DF(x) z over samples x of the region and unit tangent
/// directions z (normalised e_i - e_j plus n_random random directions).
/// Pass iff the maximum is <= eps_num; worst holds the maximum.
Verdict check_self_defeating(const PopulationGame& game, const Region& region,
                             const GridSampler& sampler,
                             std::size_t n_random = 8, std::uint64_t seed = 1,
                             const Tolerances& tol = default_tolerances());

struct DynamicSpec {
  enum class Family { kBestResponse, kTemperedBestResponse, kSmith, kBnn, kReplicator };
  Family family = Family::kSmith;
  /// Tempering Q(g) = 1 - exp(-rate * g) for the tempered best response.
  double tempering_rate = 1.0;
};

/// Accepts best_response, tempered_br, smith, bnn, replicator; throws
/// CertError(kUnknownFamily) otherwise.
DynamicSpec::Family family_from_string(std::string_view name);
std::string_view to_string(DynamicSpec::Family family);

/// The mean dynamic as an inclusion on the simplex. The best-response
/// families return one extreme velocity per payoff-maximising pure strategy
/// (ties within tol_tie).
Inclusion make_inclusion(const PopulationGame& game, const DynamicSpec& spec,
                         const Tolerances& tol = default_tolerances());

/// Gains-based Lyapunov candidates. They are candidates only and must pass
/// certification like any user-supplied pair.
///   bnn:           W = sum_i [F^_i]_+^2 / 2,  F^ = F - x.F
///   smith:         W = sum_ij x_i [F_j - F_i]_+^2 / 2
///   best_response: W = max_i F_i - x.F,  W~ = -W
/// For bnn and smith, W~(x) = DW(x) V(x). Throws CertError(kUnsupportedFamily)
/// for the tempered best response and the replicator dynamic.
struct GainsCandidate {
  ScalarField w;
  ScalarField w_tilde;
  std::string note = "candidate";
};
GainsCandidate gains_lyapunov_candidates(
    const PopulationGame& game, const DynamicSpec& spec,
    const Tolerances& tol = default_tolerances());

}  // namespace lyapcert
