#include "lyapcert/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lyapcert/parallel.hpp"

namespace lyapcert {

PopulationGame::PopulationGame(std::string name, int strategies, Payoff payoff,
                               Jacobian jacobian)
    : name_(std::move(name)),
      strategies_(strategies),
      payoff_(std::move(payoff)),
      jacobian_(std::move(jacobian)) {
  if (strategies_ < 2) {
    throw CertError(ErrorCode::kInvalidConfig, "a game needs at least two strategies");
  }
}

PopulationGame PopulationGame::matrix(std::string name, Eigen::MatrixXd m,
                                      Eigen::VectorXd offset) {
  const int a = static_cast<int>(m.rows());
  if (m.cols() != a) {
    throw CertError(ErrorCode::kInvalidConfig, "payoff matrix must be square");
  }
  if (offset.size() == 0) offset = Eigen::VectorXd::Zero(a);
  if (offset.size() != a) {
    throw CertError(ErrorCode::kInvalidConfig, "payoff offset has the wrong length");
  }
  return PopulationGame(
      std::move(name), a,
      [m, offset](const Point& x) -> Point { return m * x + offset; },
      [m](const Point&) { return m; });
}

PopulationGame PopulationGame::rps() {
  Eigen::Matrix3d m;
  m << 0, -1, 1, 1, 0, -1, -1, 1, 0;
  return matrix("rps", m);
}

PopulationGame PopulationGame::neg_identity(Eigen::VectorXd c) {
  const auto a = c.size();
  return matrix("neg_identity", -Eigen::MatrixXd::Identity(a, a), std::move(c));
}

PopulationGame PopulationGame::coordination(int strategies) {
  return matrix("coordination", Eigen::MatrixXd::Identity(strategies, strategies));
}

Eigen::MatrixXd finite_difference_jacobian(const PopulationGame::Payoff& f,
                                           const Point& x, double step) {
  const auto a = x.size();
  Eigen::MatrixXd j(a, a);
  for (Eigen::Index l = 0; l < a; ++l) {
    Point p = x, m = x;
    p[l] += step;
    m[l] -= step;
    j.col(l) = (f(p) - f(m)) / (2.0 * step);
  }
  return j;
}

Eigen::MatrixXd PopulationGame::jacobian(const Point& x) const {
  return jacobian_ ? jacobian_(x) : finite_difference_jacobian(payoff_, x);
}

double PopulationGame::best_response_gain(const Point& x) const {
  const Point f = payoff(x);
  return f.maxCoeff() - x.dot(f);
}

Verdict check_self_defeating(const PopulationGame& game, const Region& region,
                             const GridSampler& sampler, std::size_t n_random,
                             std::uint64_t seed, const Tolerances& tol) {
  const auto pts = region.sample(sampler);
  if (pts.empty()) {
    throw CertError(ErrorCode::kEmptyRegion, "no samples in " + region.describe());
  }
  const int a = game.strategies();
  std::vector<Point> basis;
  for (int i = 0; i < a; ++i) {
    for (int j = i + 1; j < a; ++j) {
      Point z = Point::Zero(a);
      z[i] = 1.0;
      z[j] = -1.0;
      basis.push_back(z / std::sqrt(2.0));
    }
  }
  struct Worst {
    double value = -std::numeric_limits<double>::infinity();
    Point z;
  };
  std::vector<Worst> worst(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (k + 1));
    std::normal_distribution<double> normal;
    const Eigen::MatrixXd df = game.jacobian(pts[k]);
    auto consider = [&](const Point& z) {
      const double q = z.dot(df * z);
      if (q > worst[k].value) worst[k] = {q, z};
    };
    for (const auto& z : basis) consider(z);
    for (std::size_t r = 0; r < n_random; ++r) {
      Point z(a);
      for (int i = 0; i < a; ++i) z[i] = normal(rng);
      z.array() -= z.mean();
      const double n = z.norm();
      if (n > 0.0) consider(z / n);
    }
  });
  Verdict v;
  v.checked = pts.size() * (basis.size() + n_random);
  v.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    v.worst = std::max(v.worst, worst[k].value);
    if (worst[k].value > tol.eps_num) {
      Witness w{"self_defeating", pts[k], {{"zDFz", worst[k].value}}, {}};
      for (int i = 0; i < a; ++i) {
        w.values.emplace_back("z" + std::to_string(i + 1), worst[k].z[i]);
      }
      v.add_violation(std::move(w));
    }
  }
  v.reason = v.passed() ? "z.DF(x)z <= 0 on all sampled tangent directions"
                        : "positive z.DF(x)z: the game is not self-defeating";
  return v;
}

DynamicSpec::Family family_from_string(std::string_view name) {
  using F = DynamicSpec::Family;
  if (name == "best_response") return F::kBestResponse;
  if (name == "tempered_br") return F::kTemperedBestResponse;
  if (name == "smith") return F::kSmith;
  if (name == "bnn") return F::kBnn;
  if (name == "replicator") return F::kReplicator;
  throw CertError(ErrorCode::kUnknownFamily,
                  "unknown dynamic family '" + std::string(name) + "'");
}

std::string_view to_string(DynamicSpec::Family family) {
  switch (family) {
    case DynamicSpec::Family::kBestResponse: return "best_response";
    case DynamicSpec::Family::kTemperedBestResponse: return "tempered_br";
    case DynamicSpec::Family::kSmith: return "smith";
    case DynamicSpec::Family::kBnn: return "bnn";
    case DynamicSpec::Family::kReplicator: return "replicator";
  }
  return "?";
}

namespace {

std::vector<int> best_responses(const Point& f, double tie) {
  const double top = f.maxCoeff();
  std::vector<int> out;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (f[i] >= top - tie) out.push_back(static_cast<int>(i));
  }
  return out;
}

Point smith_velocity(const Point& x, const Point& f) {
  const auto a = x.size();
  Point v = Point::Zero(a);
  for (Eigen::Index i = 0; i < a; ++i) {
    double in = 0.0, out = 0.0;
    for (Eigen::Index j = 0; j < a; ++j) {
      in += x[j] * std::max(0.0, f[i] - f[j]);
      out += std::max(0.0, f[j] - f[i]);
    }
    v[i] = in - x[i] * out;
  }
  return v;
}

Point bnn_velocity(const Point& x, const Point& f) {
  const Point excess = (f.array() - x.dot(f)).max(0.0).matrix();
  return excess - x * excess.sum();
}

}  // namespace

Inclusion make_inclusion(const PopulationGame& game, const DynamicSpec& spec,
                         const Tolerances& tol) {
  const CompactDomain domain = game.domain();
  const std::string name(to_string(spec.family));
  using F = DynamicSpec::Family;
  auto with_sampled_bound = [&](Inclusion inc) {
    return inc.with_bound(sampled_velocity_bound(inc, GridSampler(0.05)));
  };
  switch (spec.family) {
    case F::kBestResponse: {
      const double tie = tol.tol_tie;
      return Inclusion::from_extremes(
          domain, name,
          [game, tie](const Point& x) {
            std::vector<Point> out;
            for (int b : best_responses(game.payoff(x), tie)) {
              Point v = -x;
              v[b] += 1.0;
              out.push_back(std::move(v));
            }
            return out;
          },
          std::sqrt(2.0));
    }
    case F::kTemperedBestResponse: {
      const double tie = tol.tol_tie;
      const double rate = spec.tempering_rate;
      if (!(rate > 0.0)) {
        throw CertError(ErrorCode::kInvalidConfig, "tempering rate must be positive");
      }
      return with_sampled_bound(Inclusion::from_extremes(
          domain, name,
          [game, tie, rate](const Point& x) {
            const Point f = game.payoff(x);
            const double top = f.maxCoeff();
            std::vector<Point> out;
            for (int b : best_responses(f, tie)) {
              Point v = Point::Zero(x.size());
              for (Eigen::Index i = 0; i < x.size(); ++i) {
                if (i == b) continue;
                const double flow = x[i] * (1.0 - std::exp(-rate * (top - f[i])));
                v[b] += flow;
                v[i] -= flow;
              }
              out.push_back(std::move(v));
            }
            return out;
          },
          std::sqrt(2.0)));
    }
    case F::kSmith:
      return with_sampled_bound(Inclusion::from_vector_field(
          domain, name,
          [game](const Point& x) { return smith_velocity(x, game.payoff(x)); },
          1.0));
    case F::kBnn:
      return with_sampled_bound(Inclusion::from_vector_field(
          domain, name,
          [game](const Point& x) { return bnn_velocity(x, game.payoff(x)); },
          1.0));
    case F::kReplicator:
      return with_sampled_bound(Inclusion::from_vector_field(
          domain, name,
          [game](const Point& x) -> Point {
            const Point f = game.payoff(x);
            return x.cwiseProduct((f.array() - x.dot(f)).matrix());
          },
          1.0));
  }
  throw CertError(ErrorCode::kUnknownFamily, "unknown dynamic family");
}

GainsCandidate gains_lyapunov_candidates(const PopulationGame& game,
                                         const DynamicSpec& spec,
                                         const Tolerances& tol) {
  using F = DynamicSpec::Family;
  GainsCandidate out;
  switch (spec.family) {
    case F::kBnn: {
      out.w = ScalarField(
          "bnn gains",
          [game](const Point& x) {
            const Point f = game.payoff(x);
            return 0.5 * (f.array() - x.dot(f)).max(0.0).square().sum();
          },
          [game](const Point& x) -> std::optional<Point> {
            const Point f = game.payoff(x);
            const Eigen::MatrixXd df = game.jacobian(x);
            // d(x.F)/dx = F + DF^T x
            const Point mean_grad = f + df.transpose() * x;
            const double mean = x.dot(f);
            Point g = Point::Zero(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              const double e = std::max(0.0, f[i] - mean);
              if (e > 0.0) g += e * (df.row(i).transpose() - mean_grad);
            }
            return g;
          },
          Smoothness::kC1);
      break;
    }
    case F::kSmith: {
      out.w = ScalarField(
          "smith gains",
          [game](const Point& x) {
            const Point f = game.payoff(x);
            double acc = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              for (Eigen::Index j = 0; j < x.size(); ++j) {
                const double g = std::max(0.0, f[j] - f[i]);
                acc += x[i] * g * g;
              }
            }
            return 0.5 * acc;
          },
          [game](const Point& x) -> std::optional<Point> {
            const Point f = game.payoff(x);
            const Eigen::MatrixXd df = game.jacobian(x);
            Point g = Point::Zero(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              for (Eigen::Index j = 0; j < x.size(); ++j) {
                const double gain = std::max(0.0, f[j] - f[i]);
                if (gain <= 0.0) continue;
                g[i] += 0.5 * gain * gain;
                g += x[i] * gain * (df.row(j) - df.row(i)).transpose();
              }
            }
            return g;
          },
          Smoothness::kC1);
      break;
    }
    case F::kBestResponse: {
      const double tie = tol.tol_tie;
      out.w = ScalarField(
          "best response gain",
          [game](const Point& x) { return game.best_response_gain(x); },
          [game, tie](const Point& x) -> std::optional<Point> {
            const Point f = game.payoff(x);
            const auto br = best_responses(f, tie);
            if (br.size() != 1) return std::nullopt;
            const Eigen::MatrixXd df = game.jacobian(x);
            return Point(df.row(br.front()).transpose() - f - df.transpose() * x);
          });
      const ScalarField w = out.w;
      out.w_tilde = ScalarField(
          "-best response gain", [w](const Point& x) { return -w(x); }, {},
          Smoothness::kLowerSemicontinuous);
      return out;
    }
    case F::kTemperedBestResponse:
    case F::kReplicator:
      throw CertError(ErrorCode::kUnsupportedFamily,
                      "no gains candidate for " + std::string(to_string(spec.family)));
  }
  const Inclusion inc = make_inclusion(game, spec, tol);
  const ScalarField w = out.w;
  out.w_tilde = ScalarField(
      w.name() + " rate",
      [w, inc](const Point& x) {
        const Point g = *w.closed_form_gradient()(x);
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& v : inc.velocities_at(x)) worst = std::max(worst, g.dot(v));
        return worst;
      },
      {}, Smoothness::kLowerSemicontinuous);
  return out;
}

}  // namespace lyapcert
