#include "lyapcert/domain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace lyapcert {

CompactDomain CompactDomain::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() < 1 || lo.size() != hi.size()) {
    throw std::invalid_argument("box domain: bounds must share a positive dimension");
  }
  for (Eigen::Index a = 0; a < lo.size(); ++a) {
    if (!(lo[a] < hi[a])) {
      throw std::invalid_argument("box domain: need lo < hi on every axis");
    }
  }
  const int dim = static_cast<int>(lo.size());
  return CompactDomain(Kind::kBox, dim, std::move(lo), std::move(hi));
}

CompactDomain CompactDomain::simplex(int dimension) {
  if (dimension < 1) {
    throw std::invalid_argument("simplex domain: dimension must be >= 1");
  }
  return CompactDomain(Kind::kSimplex, dimension,
                       Eigen::VectorXd::Zero(dimension),
                       Eigen::VectorXd::Ones(dimension));
}

bool CompactDomain::contains(const Point& x, double tol) const {
  if (x.size() != dim_) return false;
  if (kind_ == Kind::kBox) {
    return ((x.array() >= lo_.array() - tol) && (x.array() <= hi_.array() + tol))
        .all();
  }
  return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
}

Point CompactDomain::project(const Point& x) const {
  if (kind_ == Kind::kBox) return x.cwiseMax(lo_).cwiseMin(hi_);
  // Sort-based Euclidean projection onto {x >= 0, sum x = 1}.
  std::vector<double> u(x.data(), x.data() + x.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  Point out = (x.array() - theta).cwiseMax(0.0);
  return out;
}

Point CompactDomain::tangent(const Point& v) const {
  if (kind_ == Kind::kBox) return v;
  return (v.array() - v.mean()).matrix();
}

double CompactDomain::diameter() const {
  if (kind_ == Kind::kBox) return (hi_ - lo_).norm();
  return dim_ > 1 ? std::sqrt(2.0) : 0.0;
}

bool CompactDomain::operator==(const CompactDomain& other) const {
  return kind_ == other.kind_ && dim_ == other.dim_ && lo_ == other.lo_ &&
         hi_ == other.hi_;
}

GridSampler::GridSampler(double h, bool jitter, std::uint64_t seed)
    : h_(h), jitter_(jitter), seed_(seed) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("grid resolution h must be positive");
  }
}

double GridSampler::covering_radius(const CompactDomain& domain) const {
  return std::sqrt(static_cast<double>(domain.dim())) * h_;
}

namespace {

int axis_steps(double width, double h) {
  return std::max(1, static_cast<int>(std::ceil(width / h - 1e-9)));
}

int simplex_steps(double h) {
  return std::max(1, static_cast<int>(std::ceil(1.0 / h - 1e-9)));
}

void enumerate_compositions(int dim, int m, std::vector<Point>& out) {
  std::vector<int> k(dim, 0);
  std::function<void(int, int)> rec = [&](int axis, int remaining) {
    if (axis == dim - 1) {
      k[axis] = remaining;
      Point p(dim);
      for (int a = 0; a < dim; ++a) {
        p[a] = static_cast<double>(k[a]) / static_cast<double>(m);
      }
      out.push_back(std::move(p));
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[axis] = v;
      rec(axis + 1, remaining - v);
    }
  };
  rec(0, m);
}

}  // namespace

std::vector<Point> GridSampler::samples(const CompactDomain& domain) const {
  const int dim = domain.dim();
  std::vector<Point> out;
  if (domain.is_simplex()) {
    enumerate_compositions(dim, simplex_steps(h_), out);
  } else {
    std::vector<int> steps(dim);
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) {
      steps[a] = axis_steps(domain.hi()[a] - domain.lo()[a], h_);
      total *= static_cast<std::size_t>(steps[a] + 1);
    }
    out.reserve(total);
    std::vector<int> k(dim, 0);
    for (std::size_t n = 0; n < total; ++n) {
      Point p(dim);
      for (int a = 0; a < dim; ++a) {
        const double lo = domain.lo()[a];
        const double width = domain.hi()[a] - lo;
        p[a] = k[a] == steps[a] ? domain.hi()[a]
                                : lo + width * k[a] / steps[a];
      }
      out.push_back(std::move(p));
      for (int a = dim - 1; a >= 0; --a) {
        if (++k[a] <= steps[a]) break;
        k[a] = 0;
      }
    }
  }
  if (jitter_) {
    std::mt19937_64 rng(seed_);
    std::uniform_real_distribution<double> u(-0.5 * h_, 0.5 * h_);
    for (auto& p : out) {
      Point delta(dim);
      for (int a = 0; a < dim; ++a) delta[a] = u(rng);
      p = domain.project(p + domain.tangent(delta));
    }
  }
  return out;
}

std::vector<Point> GridSampler::local_refinement(const CompactDomain& domain,
                                                 const Point& center) const {
  const int dim = domain.dim();
  const int per_axis = dim <= 4 ? 5 : 3;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= per_axis;
  std::vector<Point> out;
  out.reserve(total);
  std::vector<int> k(dim, 0);
  const double spacing = dim <= 4 ? 0.5 * h_ : h_;
  const int half = per_axis / 2;
  for (std::size_t n = 0; n < total; ++n) {
    Point offset(dim);
    for (int a = 0; a < dim; ++a) offset[a] = spacing * (k[a] - half);
    const Point p = center + domain.tangent(offset);
    if (domain.contains(p)) out.push_back(p);
    for (int a = dim - 1; a >= 0; --a) {
      if (++k[a] < per_axis) break;
      k[a] = 0;
    }
  }
  return out;
}

std::vector<Point> GridSampler::neighbour_offsets(
    const CompactDomain& domain) const {
  const int dim = domain.dim();
  std::vector<Point> out;
  if (domain.is_simplex()) {
    const double step = 1.0 / simplex_steps(h_);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        if (i == j) continue;
        Point d = Point::Zero(dim);
        d[i] = step;
        d[j] = -step;
        out.push_back(std::move(d));
      }
    }
    return out;
  }
  Point spacing(dim);
  for (int a = 0; a < dim; ++a) {
    const double width = domain.hi()[a] - domain.lo()[a];
    spacing[a] = width / axis_steps(width, h_);
  }
  if (dim > 4) {
    for (int a = 0; a < dim; ++a) {
      for (int s : {-1, 1}) {
        Point d = Point::Zero(dim);
        d[a] = s * spacing[a];
        out.push_back(std::move(d));
      }
    }
    return out;
  }
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= 3;
  std::vector<int> k(dim, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point d(dim);
    bool zero = true;
    for (int a = 0; a < dim; ++a) {
      d[a] = (k[a] - 1) * spacing[a];
      zero = zero && k[a] == 1;
    }
    if (!zero) out.push_back(std::move(d));
    for (int a = dim - 1; a >= 0; --a) {
      if (++k[a] < 3) break;
      k[a] = 0;
    }
  }
  return out;
}

}  // namespace lyapcert
