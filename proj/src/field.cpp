#include "lyapcert/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lyapcert {

ScalarField::ScalarField(std::string name, Evaluator value, Gradient gradient,
                         Smoothness smoothness)
    : name_(std::move(name)),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      smoothness_(smoothness) {}

ScalarField ScalarField::renamed(std::string name) const {
  ScalarField out = *this;
  out.name_ = std::move(name);
  return out;
}

ScalarField ScalarField::with_lipschitz(double constant) const {
  ScalarField out = *this;
  out.lipschitz_ = constant;
  return out;
}

ScalarField ScalarField::as_decay_rate() const {
  ScalarField out = *this;
  out.smoothness_ = Smoothness::kLowerSemicontinuous;
  return out;
}

ScalarField ScalarField::without_gradient() const {
  ScalarField out = *this;
  out.gradient_ = {};
  return out;
}

std::optional<Point> finite_difference_gradient(const ScalarField& f,
                                                const Point& x,
                                                const Tolerances& tol) {
  const double delta = tol.delta_fd;
  const double f0 = f(x);
  Point g(x.size());
  Point probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + delta;
    const double fp = f(probe);
    probe[i] = x[i] - delta;
    const double fm = f(probe);
    probe[i] = x[i];
    const double forward = (fp - f0) / delta;
    const double backward = (f0 - fm) / delta;
    const double scale = std::max({1.0, std::abs(forward), std::abs(backward)});
    if (std::abs(forward - backward) > tol.tol_kink * scale) return std::nullopt;
    g[i] = (fp - fm) / (2.0 * delta);
  }
  return g;
}

std::optional<Point> grad(const ScalarField& f, const Point& x,
                          const Tolerances& tol) {
  if (f.smoothness() == Smoothness::kLowerSemicontinuous) {
    throw std::logic_error("gradient requested for decay-rate field '" +
                           f.name() + "'");
  }
  if (f.has_closed_form_gradient()) return f.closed_form_gradient()(x);
  return finite_difference_gradient(f, x, tol);
}

std::optional<double> directional_decrease(const ScalarField& f,
                                           const Point& x, const Point& v,
                                           const Tolerances& tol) {
  const auto g = grad(f, x, tol);
  if (!g) return std::nullopt;
  return g->dot(v);
}

GradientCheckReport check_gradient(const ScalarField& f,
                                   const std::vector<Point>& points,
                                   const Tolerances& tol) {
  if (!f.has_closed_form_gradient()) {
    throw std::invalid_argument("check_gradient: field '" + f.name() +
                                "' has no closed-form gradient");
  }
  GradientCheckReport report;
  for (const auto& x : points) {
    ++report.checked;
    const auto closed = f.closed_form_gradient()(x);
    const auto fd = finite_difference_gradient(f, x, tol);
    if (!closed || !fd) {
      report.disagreements.push_back(x);
      continue;
    }
    const double scale = std::max(1.0, closed->cwiseAbs().maxCoeff());
    const double err = (*closed - *fd).cwiseAbs().maxCoeff() / scale;
    if (err <= tol.tol_grad) {
      ++report.agreeing;
      report.max_relative_error = std::max(report.max_relative_error, err);
    } else {
      report.disagreements.push_back(x);
    }
  }
  return report;
}

namespace fields {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ScalarField constant(double c) {
  return ScalarField(
      fmt(c), [c](const Point&) { return c; },
      [](const Point& x) -> std::optional<Point> {
        return Point::Zero(x.size());
      },
      Smoothness::kC1);
}

ScalarField coordinate(int index) {
  return ScalarField(
      "x" + std::to_string(index + 1),
      [index](const Point& x) { return x[index]; },
      [index](const Point& x) -> std::optional<Point> {
        Point g = Point::Zero(x.size());
        g[index] = 1.0;
        return g;
      },
      Smoothness::kC1);
}

ScalarField linear(Eigen::VectorXd g, double offset) {
  return ScalarField(
      "linear", [g, offset](const Point& x) { return g.dot(x) + offset; },
      [g](const Point&) -> std::optional<Point> { return g; },
      Smoothness::kC1);
}

ScalarField quadratic(Eigen::MatrixXd q, Eigen::VectorXd center,
                      double scale) {
  const Eigen::MatrixXd sym = 0.5 * (q + q.transpose());
  return ScalarField(
      "quadratic",
      [sym, center, scale](const Point& x) {
        const Eigen::VectorXd d = x - center;
        return scale * d.dot(sym * d);
      },
      [sym, center, scale](const Point& x) -> std::optional<Point> {
        return (2.0 * scale) * (sym * (x - center));
      },
      Smoothness::kC1);
}

ScalarField norm_sq(Eigen::VectorXd center) {
  return ScalarField(
      "norm_sq",
      [center](const Point& x) { return (x - center).squaredNorm(); },
      [center](const Point& x) -> std::optional<Point> {
        return 2.0 * (x - center);
      },
      Smoothness::kC1);
}

ScalarField norm(Eigen::VectorXd center, int p) {
  if (p == 1) {
    return ScalarField(
        "norm1", [center](const Point& x) { return (x - center).lpNorm<1>(); },
        [center](const Point& x) -> std::optional<Point> {
          const Eigen::VectorXd d = x - center;
          if ((d.array() == 0.0).any()) return std::nullopt;
          return d.array().sign().matrix();
        });
  }
  if (p != 2) throw std::invalid_argument("norm: p must be 1 or 2");
  return ScalarField(
      "norm", [center](const Point& x) { return (x - center).norm(); },
      [center](const Point& x) -> std::optional<Point> {
        const Eigen::VectorXd d = x - center;
        const double r = d.norm();
        if (r == 0.0) return std::nullopt;
        return d / r;
      });
}

ScalarField scaled(const ScalarField& f, double factor) {
  ScalarField::Gradient g;
  if (f.has_closed_form_gradient()) {
    g = [gf = f.closed_form_gradient(), factor](const Point& x)
        -> std::optional<Point> {
      auto inner = gf(x);
      if (!inner) return std::nullopt;
      return factor * *inner;
    };
  }
  return ScalarField(
      fmt(factor) + "*" + f.name(),
      [v = f.evaluator(), factor](const Point& x) { return factor * v(x); },
      std::move(g), f.smoothness());
}

ScalarField shifted(const ScalarField& f, double offset) {
  return sum({1.0, 1.0}, {f, constant(offset)});
}

ScalarField sum(const std::vector<double>& weights,
                const std::vector<ScalarField>& terms) {
  if (weights.size() != terms.size() || terms.empty()) {
    throw std::invalid_argument("fields::sum: weights and terms must match");
  }
  std::string name;
  bool all_grad = true;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) name += " + ";
    name += fmt(weights[i]) + "*" + terms[i].name();
    all_grad = all_grad && terms[i].has_closed_form_gradient();
  }
  ScalarField::Gradient g;
  if (all_grad) {
    g = [weights, terms](const Point& x) -> std::optional<Point> {
      Point acc = Point::Zero(x.size());
      for (std::size_t i = 0; i < terms.size(); ++i) {
        auto gi = terms[i].closed_form_gradient()(x);
        if (!gi) return std::nullopt;
        acc += weights[i] * *gi;
      }
      return acc;
    };
  }
  return ScalarField(
      "(" + name + ")",
      [weights, terms](const Point& x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
          acc += weights[i] * terms[i](x);
        }
        return acc;
      },
      std::move(g));
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
  ScalarField::Gradient g;
  if (a.has_closed_form_gradient() && b.has_closed_form_gradient()) {
    g = [a, b](const Point& x) -> std::optional<Point> {
      auto ga = a.closed_form_gradient()(x);
      auto gb = b.closed_form_gradient()(x);
      if (!ga || !gb) return std::nullopt;
      return a(x) * *gb + b(x) * *ga;
    };
  }
  return ScalarField(
      a.name() + "*" + b.name(),
      [a, b](const Point& x) { return a(x) * b(x); }, std::move(g));
}

ScalarField square(const ScalarField& f) {
  ScalarField::Gradient g;
  if (f.has_closed_form_gradient()) {
    g = [f](const Point& x) -> std::optional<Point> {
      const double v = f(x);
      if (v == 0.0) return Point::Zero(x.size());
      auto inner = f.closed_form_gradient()(x);
      if (!inner) return std::nullopt;
      return 2.0 * v * *inner;
    };
  }
  return ScalarField(
      "(" + f.name() + ")^2",
      [f](const Point& x) {
        const double v = f(x);
        return v * v;
      },
      std::move(g));
}

ScalarField positive_part(const ScalarField& f) {
  ScalarField::Gradient g;
  if (f.has_closed_form_gradient()) {
    g = [f](const Point& x) -> std::optional<Point> {
      const double v = f(x);
      if (v < 0.0) return Point::Zero(x.size());
      auto inner = f.closed_form_gradient()(x);
      if (!inner) return std::nullopt;
      if (v == 0.0 && !inner->isZero(0.0)) return std::nullopt;
      return inner;
    };
  }
  return ScalarField(
      "max(0," + f.name() + ")",
      [f](const Point& x) { return std::max(0.0, f(x)); }, std::move(g));
}

ScalarField abs(const ScalarField& f) {
  ScalarField::Gradient g;
  if (f.has_closed_form_gradient()) {
    g = [f](const Point& x) -> std::optional<Point> {
      const double v = f(x);
      auto inner = f.closed_form_gradient()(x);
      if (!inner) return std::nullopt;
      if (v == 0.0) {
        if (!inner->isZero(0.0)) return std::nullopt;
        return inner;
      }
      return v > 0.0 ? *inner : Point(-*inner);
    };
  }
  return ScalarField("|" + f.name() + "|",
                     [f](const Point& x) { return std::abs(f(x)); }, std::move(g));
}

}  // namespace fields

}  // namespace lyapcert
