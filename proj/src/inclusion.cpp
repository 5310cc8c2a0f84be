#include "lyapcert/inclusion.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

#include "lyapcert/parallel.hpp"

namespace lyapcert {

Inclusion Inclusion::from_vector_field(const CompactDomain& domain,
                                       std::string name, VectorField field,
                                       double bound) {
  return Inclusion(
      domain, std::move(name),
      [f = std::move(field)](const Point& x) { return std::vector<Point>{f(x)}; },
      bound, true);
}

Inclusion Inclusion::from_extremes(const CompactDomain& domain,
                                   std::string name, ExtremeMap extremes,
                                   double bound) {
  return Inclusion(domain, std::move(name), std::move(extremes), bound, false);
}

Inclusion Inclusion::hull(const std::vector<Inclusion>& members) {
  if (members.empty()) throw std::invalid_argument("hull of no inclusions");
  std::string name = "hull(";
  double bound = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!(members[i].domain() == members[0].domain())) {
      throw std::invalid_argument("hull: members live in different domains");
    }
    name += (i ? "," : "") + members[i].name();
    bound = std::max(bound, members[i].bound());
  }
  name += ")";
  return Inclusion(
      members[0].domain(), name,
      [members](const Point& x) {
        std::vector<Point> out;
        for (const auto& m : members) {
          for (auto& v : m.velocities_at(x)) out.push_back(std::move(v));
        }
        return out;
      },
      bound, members.size() == 1 && members[0].singleton_valued());
}

std::vector<Point> Inclusion::velocities_at(const Point& x) const {
  auto v = extremes_(x);
  if (v.empty()) {
    throw std::logic_error("inclusion '" + name_ + "' returned no velocities");
  }
  return v;
}

Inclusion Inclusion::with_bound(double bound) const {
  Inclusion out = *this;
  out.bound_ = bound;
  return out;
}

double sampled_velocity_bound(const Inclusion& inclusion,
                              const GridSampler& sampler) {
  const auto pts = sampler.samples(inclusion.domain());
  std::vector<double> norms(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t i) {
    for (const auto& v : inclusion.velocities_at(pts[i])) {
      norms[i] = std::max(norms[i], v.norm());
    }
  });
  return 1.2 * *std::max_element(norms.begin(), norms.end());
}

Selector Selector::random(std::uint64_t seed) {
  Selector s(Kind::kRandom);
  s.seed_ = seed;
  return s;
}

Selector Selector::adversarial(ScalarField objective) {
  Selector s(Kind::kAdversarial);
  s.objective_ = std::move(objective);
  return s;
}

Selector Selector::with_seed(std::uint64_t seed) const {
  Selector s = *this;
  s.seed_ = seed;
  return s;
}

std::string Selector::name() const {
  switch (kind_) {
    case Kind::kFirst: return "first";
    case Kind::kMixture: return "mixture";
    case Kind::kRandom: return "random";
    case Kind::kAdversarial: return "adversarial";
  }
  return "unknown";
}

Selector::Kind selector_kind_from_string(std::string_view name) {
  if (name == "first") return Selector::Kind::kFirst;
  if (name == "mixture") return Selector::Kind::kMixture;
  if (name == "random") return Selector::Kind::kRandom;
  if (name == "adversarial") return Selector::Kind::kAdversarial;
  throw std::invalid_argument("unknown selector policy '" + std::string(name) + "'");
}

Selector adversarial_selector(const Inclusion&, const ScalarField& objective) {
  return Selector::adversarial(objective);
}

std::size_t adversarial_pick(const std::vector<Point>& velocities,
                             const ScalarField& objective, const Point& x,
                             const Tolerances& tol) {
  if (velocities.size() == 1) return 0;
  const auto g = grad(objective, x, tol);
  if (!g) return 0;
  std::size_t best = 0;
  double best_rate = g->dot(velocities[0]);
  for (std::size_t i = 1; i < velocities.size(); ++i) {
    const double rate = g->dot(velocities[i]);
    if (rate > best_rate) {
      best = i;
      best_rate = rate;
    }
  }
  return best;
}

double max_step(const Inclusion& inclusion) {
  const double m = inclusion.bound();
  return m > 0.0 ? std::min(0.01, 0.1 / m) : 0.01;
}

Trajectory integrate(
    const Inclusion& inclusion, const Point& x0, double horizon, double dt,
    const Selector& selector, const Tolerances& tol, std::size_t max_steps,
    const std::function<bool(std::size_t, const Point&)>& keep_going) {
  const CompactDomain& domain = inclusion.domain();
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (dt > max_step(inclusion) * (1.0 + 1e-12)) {
    throw CertError(ErrorCode::kStepTooLarge,
                    "dt = " + std::to_string(dt) + " exceeds " +
                        std::to_string(max_step(inclusion)));
  }
  if (!domain.contains(x0, 1e-9)) {
    throw std::invalid_argument("integrate: initial state outside the domain");
  }
  const auto total = static_cast<std::size_t>(std::llround(horizon / dt));
  const std::size_t steps = std::min(total, max_steps);
  const double tol_proj = 1e-7 * inclusion.bound() * dt;

  Trajectory traj;
  traj.dt = dt;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.selector_log.reserve(steps);
  traj.times.push_back(0.0);
  traj.states.push_back(domain.project(x0));

  std::mt19937_64 rng(selector.seed());
  for (std::size_t k = 0; k < steps; ++k) {
    const Point& x = traj.states.back();
    const auto velocities = inclusion.velocities_at(x);
    Point v;
    int picked = 0;
    switch (selector.kind()) {
      case Selector::Kind::kFirst:
        v = velocities[0];
        break;
      case Selector::Kind::kMixture:
        if (velocities.size() == 1) {
          v = velocities[0];
        } else {
          v = Point::Zero(x.size());
          for (const auto& u : velocities) v += u;
          v /= static_cast<double>(velocities.size());
          picked = -1;
        }
        break;
      case Selector::Kind::kRandom: {
        std::uniform_int_distribution<std::size_t> pick(0, velocities.size() - 1);
        const std::size_t i = velocities.size() == 1 ? 0 : pick(rng);
        v = velocities[i];
        picked = static_cast<int>(i);
        break;
      }
      case Selector::Kind::kAdversarial: {
        const std::size_t i =
            adversarial_pick(velocities, selector.objective(), x, tol);
        v = velocities[i];
        picked = static_cast<int>(i);
        break;
      }
    }
    const Point raw = x + dt * v;
    Point next = domain.project(raw);
    if ((next - raw).norm() > tol_proj) {
      throw CertError(ErrorCode::kLeftDomain,
                      "inclusion '" + inclusion.name() +
                          "' points out of the domain at step " +
                          std::to_string(k));
    }
    traj.selector_log.push_back(picked);
    traj.times.push_back(static_cast<double>(k + 1) * dt);
    traj.states.push_back(std::move(next));
    if (keep_going && !keep_going(k + 1, traj.states.back())) break;
  }
  return traj;
}

bool satisfies_lipschitz_bound(const Trajectory& traj, double bound,
                               double tol_step) {
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const double step = (traj.states[k + 1] - traj.states[k]).norm();
    if (step > (bound + tol_step) * traj.dt) return false;
  }
  return true;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  const Eigen::Index dim = traj.states.empty() ? 0 : traj.states[0].size();
  os << "t";
  for (Eigen::Index a = 0; a < dim; ++a) os << ",x" << (a + 1);
  os << ",selector";
  const bool with_w = traj.w_values.size() == traj.states.size();
  if (with_w) os << ",W";
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    os << traj.times[k];
    for (Eigen::Index a = 0; a < dim; ++a) os << "," << traj.states[k][a];
    os << "," << (k < traj.selector_log.size() ? traj.selector_log[k] : 0);
    if (with_w) os << "," << traj.w_values[k];
    os << "\n";
  }
}

}  // namespace lyapcert
