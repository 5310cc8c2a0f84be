#include "lyapcert/region.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "lyapcert/simd/kernels.hpp"

namespace lyapcert {

namespace {

simd::PointBlock make_block(const std::vector<Point>& pts, int dim) {
  simd::PointBlock block(static_cast<std::size_t>(dim));
  block.reserve(pts.size());
  for (const auto& p : pts) {
    if (p.size() != dim) {
      throw std::invalid_argument("region: point dimension mismatch");
    }
    block.push_back({p.data(), static_cast<std::size_t>(p.size())});
  }
  return block;
}

double nearest_distance(const simd::PointBlock& block, const Point& x) {
  return std::sqrt(simd::nearest(x.data(), block).sq_distance);
}

}  // namespace

struct PointsNode {
  std::vector<Point> pts;
  simd::PointBlock block;
};
struct BallNode {
  std::vector<Point> centers;
  simd::PointBlock block;
  double radius;
  bool open;
};
struct BoxNode {
  Eigen::VectorXd lo, hi;
  bool open;
};
struct SublevelNode {
  ScalarField f;
  double level;
  double slack;
};
struct SuperlevelNode {
  ScalarField f;
  double level;
  bool closed;
};
struct PredicateNode {
  std::string name;
  std::function<bool(const Point&)> member;
  bool open;
};
struct WholeNode {};
struct IntersectionNode {
  std::shared_ptr<const Region::Node> a, b;
};
struct ComplementNode {
  std::shared_ptr<const Region::Node> a;
};
struct ClosureNode {
  std::shared_ptr<const Region::Node> a;
  double eps;
};

struct Region::Node {
  std::variant<WholeNode, PointsNode, BallNode, BoxNode, SublevelNode,
               SuperlevelNode, PredicateNode, IntersectionNode, ComplementNode,
               ClosureNode>
      v;
};

namespace {

using NodePtr = std::shared_ptr<const Region::Node>;

bool node_contains(const Region::Node& n, const CompactDomain& dom,
                   const Point& x);
bool node_closure(const Region::Node& n, const CompactDomain& dom,
                  const Point& x, double eps);
bool node_interior(const Region::Node& n, const CompactDomain& dom,
                   const Point& x, double eps);

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool node_contains(const Region::Node& n, const CompactDomain& dom,
                   const Point& x) {
  return std::visit(
      overloaded{
          [](const WholeNode&) { return true; },
          [&](const PointsNode& p) { return nearest_distance(p.block, x) <= 1e-12; },
          [&](const BallNode& b) {
            const double d = nearest_distance(b.block, x);
            return b.open ? d < b.radius : d <= b.radius;
          },
          [&](const BoxNode& b) {
            if (b.open) {
              return ((x.array() > b.lo.array()) && (x.array() < b.hi.array())).all();
            }
            return ((x.array() >= b.lo.array()) && (x.array() <= b.hi.array())).all();
          },
          [&](const SublevelNode& s) { return s.f(x) < s.level; },
          [&](const SuperlevelNode& s) {
            const double v = s.f(x);
            return s.closed ? v >= s.level : v > s.level;
          },
          [&](const PredicateNode& p) { return p.member(x); },
          [&](const IntersectionNode& i) {
            return node_contains(*i.a, dom, x) && node_contains(*i.b, dom, x);
          },
          [&](const ComplementNode& c) { return !node_contains(*c.a, dom, x); },
          [&](const ClosureNode& c) { return node_closure(*c.a, dom, x, c.eps); },
      },
      n.v);
}

bool node_closure(const Region::Node& n, const CompactDomain& dom,
                  const Point& x, double eps) {
  return std::visit(
      overloaded{
          [](const WholeNode&) { return true; },
          [&](const PointsNode& p) { return nearest_distance(p.block, x) <= eps; },
          [&](const BallNode& b) {
            return nearest_distance(b.block, x) <= b.radius + eps;
          },
          [&](const BoxNode& b) {
            return ((x.array() >= b.lo.array() - eps) &&
                    (x.array() <= b.hi.array() + eps))
                .all();
          },
          [&](const SublevelNode& s) { return s.f(x) <= s.level + s.slack + eps; },
          [&](const SuperlevelNode& s) { return s.f(x) >= s.level - eps; },
          [&](const PredicateNode& p) { return p.member(x); },
          [&](const IntersectionNode& i) {
            return node_closure(*i.a, dom, x, eps) && node_closure(*i.b, dom, x, eps);
          },
          [&](const ComplementNode& c) { return !node_interior(*c.a, dom, x, eps); },
          [&](const ClosureNode& c) { return node_closure(*c.a, dom, x, std::max(eps, c.eps)); },
      },
      n.v);
}

bool node_interior(const Region::Node& n, const CompactDomain& dom,
                   const Point& x, double eps) {
  return std::visit(
      overloaded{
          [](const WholeNode&) { return true; },
          [](const PointsNode&) { return false; },
          [&](const BallNode& b) {
            return nearest_distance(b.block, x) < b.radius - eps;
          },
          [&](const BoxNode& b) {
            return ((x.array() > b.lo.array() + eps) &&
                    (x.array() < b.hi.array() - eps))
                .all();
          },
          [&](const SublevelNode& s) { return s.f(x) < s.level - eps; },
          [&](const SuperlevelNode& s) { return s.f(x) > s.level + eps; },
          [&](const PredicateNode& p) { return p.member(x); },
          [&](const IntersectionNode& i) {
            return node_interior(*i.a, dom, x, eps) && node_interior(*i.b, dom, x, eps);
          },
          [&](const ComplementNode& c) { return !node_closure(*c.a, dom, x, eps); },
          [&](const ClosureNode& c) { return node_interior(*c.a, dom, x, eps); },
      },
      n.v);
}

// Openness/closedness are tracked structurally; primitives built from
// continuous fields follow the usual topology.
bool node_open(const Region::Node& n);
bool node_closed(const Region::Node& n);

bool node_open(const Region::Node& n) {
  return std::visit(
      overloaded{
          [](const WholeNode&) { return true; },
          [](const PointsNode&) { return false; },
          [](const BallNode& b) { return b.open; },
          [](const BoxNode& b) { return b.open; },
          [](const SublevelNode&) { return true; },
          [](const SuperlevelNode& s) { return !s.closed; },
          [](const PredicateNode& p) { return p.open; },
          [](const IntersectionNode& i) { return node_open(*i.a) && node_open(*i.b); },
          [](const ComplementNode& c) { return node_closed(*c.a); },
          [](const ClosureNode&) { return false; },
      },
      n.v);
}

bool node_closed(const Region::Node& n) {
  return std::visit(
      overloaded{
          [](const WholeNode&) { return true; },
          [](const PointsNode&) { return true; },
          [](const BallNode& b) { return !b.open; },
          [](const BoxNode& b) { return !b.open; },
          [](const SublevelNode&) { return false; },
          [](const SuperlevelNode& s) { return s.closed; },
          [](const PredicateNode& p) { return !p.open; },
          [](const IntersectionNode& i) { return node_closed(*i.a) && node_closed(*i.b); },
          [](const ComplementNode& c) { return node_open(*c.a); },
          [](const ClosureNode&) { return true; },
      },
      n.v);
}

std::string node_describe(const Region::Node& n) {
  std::ostringstream os;
  std::visit(
      overloaded{
          [&](const WholeNode&) { os << "domain"; },
          [&](const PointsNode& p) { os << "points[" << p.pts.size() << "]"; },
          [&](const BallNode& b) {
            os << (b.open ? "open" : "closed") << " ball(r=" << b.radius
               << ", centers=" << b.centers.size() << ")";
          },
          [&](const BoxNode& b) {
            os << (b.open ? "open" : "closed") << " box";
          },
          [&](const SublevelNode& s) {
            os << "{" << s.f.name() << " < " << s.level << "}";
          },
          [&](const SuperlevelNode& s) {
            os << "{" << s.f.name() << (s.closed ? " >= " : " > ") << s.level
               << "}";
          },
          [&](const PredicateNode& p) { os << p.name; },
          [&](const IntersectionNode& i) {
            os << "(" << node_describe(*i.a) << " & " << node_describe(*i.b)
               << ")";
          },
          [&](const ComplementNode& c) { os << "~" << node_describe(*c.a); },
          [&](const ClosureNode& c) { os << "cl " << node_describe(*c.a); },
      },
      n.v);
  return os.str();
}

NodePtr make_node(auto&& value) {
  auto node = std::make_shared<Region::Node>();
  node->v = std::forward<decltype(value)>(value);
  return node;
}

}  // namespace

Region Region::whole(const CompactDomain& domain) {
  return Region(std::make_shared<const CompactDomain>(domain),
                make_node(WholeNode{}));
}

Region Region::points(const CompactDomain& domain, std::vector<Point> pts) {
  if (pts.empty()) throw CertError(ErrorCode::kEmptyTarget, "empty point set");
  auto block = make_block(pts, domain.dim());
  return Region(std::make_shared<const CompactDomain>(domain),
                make_node(PointsNode{std::move(pts), std::move(block)}));
}

Region Region::ball(const CompactDomain& domain, std::vector<Point> centers,
                    double radius, bool open) {
  if (centers.empty()) {
    throw CertError(ErrorCode::kEmptyTarget, "ball without centers");
  }
  if (!(radius >= 0.0)) throw std::invalid_argument("ball radius must be >= 0");
  auto block = make_block(centers, domain.dim());
  return Region(
      std::make_shared<const CompactDomain>(domain),
      make_node(BallNode{std::move(centers), std::move(block), radius, open}));
}

Region Region::box(const CompactDomain& domain, Eigen::VectorXd lo,
                   Eigen::VectorXd hi, bool open) {
  if (lo.size() != domain.dim() || hi.size() != domain.dim()) {
    throw std::invalid_argument("box region: dimension mismatch");
  }
  return Region(std::make_shared<const CompactDomain>(domain),
                make_node(BoxNode{std::move(lo), std::move(hi), open}));
}

Region Region::sublevel(const CompactDomain& domain, ScalarField f,
                        double level, double closure_slack) {
  return Region(std::make_shared<const CompactDomain>(domain),
                make_node(SublevelNode{std::move(f), level, closure_slack}));
}

Region Region::superlevel(const CompactDomain& domain, ScalarField f,
                          double level, bool closed) {
  return Region(std::make_shared<const CompactDomain>(domain),
                make_node(SuperlevelNode{std::move(f), level, closed}));
}

Region Region::predicate(const CompactDomain& domain, std::string name,
                         std::function<bool(const Point&)> member, bool open) {
  return Region(
      std::make_shared<const CompactDomain>(domain),
      make_node(PredicateNode{std::move(name), std::move(member), open}));
}

Region Region::intersect(const Region& other) const {
  if (!(*domain_ == *other.domain_)) {
    throw std::invalid_argument("intersect: regions live in different domains");
  }
  return Region(domain_, make_node(IntersectionNode{node_, other.node_}));
}

Region Region::complement() const {
  return Region(domain_, make_node(ComplementNode{node_}));
}

Region Region::closure(double eps) const {
  return Region(domain_, make_node(ClosureNode{node_, eps}));
}

bool Region::contains(const Point& x) const {
  return domain_->contains(x, 1e-9) && node_contains(*node_, *domain_, x);
}

bool Region::closure_contains(const Point& x, double eps) const {
  return domain_->contains(x, std::max(eps, 1e-9)) &&
         node_closure(*node_, *domain_, x, eps);
}

bool Region::interior_contains(const Point& x, double eps) const {
  return domain_->contains(x, 1e-9) && node_interior(*node_, *domain_, x, eps);
}

bool Region::is_open() const { return node_open(*node_); }
bool Region::is_closed() const { return node_closed(*node_); }

std::optional<double> Region::exact_distance(const Point& x) const {
  if (const auto* p = std::get_if<PointsNode>(&node_->v)) {
    return nearest_distance(p->block, x);
  }
  if (const auto* b = std::get_if<BallNode>(&node_->v)) {
    return std::max(0.0, nearest_distance(b->block, x) - b->radius);
  }
  if (const auto* c = std::get_if<ClosureNode>(&node_->v)) {
    if (const auto* b = std::get_if<BallNode>(&c->a->v)) {
      return std::max(0.0, nearest_distance(b->block, x) - b->radius);
    }
    if (const auto* p = std::get_if<PointsNode>(&c->a->v)) {
      return nearest_distance(p->block, x);
    }
  }
  return std::nullopt;
}

std::vector<Point> Region::sample(const GridSampler& sampler) const {
  if (const auto* p = std::get_if<PointsNode>(&node_->v)) {
    std::vector<Point> out;
    for (const auto& q : p->pts) {
      if (domain_->contains(q, 1e-9)) out.push_back(q);
    }
    return out;
  }
  std::vector<Point> out;
  for (auto& x : sampler.samples(*domain_)) {
    if (node_contains(*node_, *domain_, x)) out.push_back(std::move(x));
  }
  if (const auto* b = std::get_if<BallNode>(&node_->v)) {
    for (const auto& c : b->centers) {
      if (domain_->contains(c, 1e-9) && (b->radius > 0.0 || !b->open) &&
          std::find(out.begin(), out.end(), c) == out.end()) {
        out.push_back(c);
      }
    }
  }
  return out;
}

std::vector<Point> Region::closure_sample(const GridSampler& sampler,
                                          double eps) const {
  if (std::holds_alternative<PointsNode>(node_->v)) {
    return sample(sampler);
  }
  std::vector<Point> out;
  for (auto& x : sampler.samples(*domain_)) {
    if (node_closure(*node_, *domain_, x, eps)) out.push_back(std::move(x));
  }
  if (const auto* b = std::get_if<BallNode>(&node_->v)) {
    for (const auto& c : b->centers) {
      if (domain_->contains(c, 1e-9) &&
          std::find(out.begin(), out.end(), c) == out.end()) {
        out.push_back(c);
      }
    }
  }
  return out;
}

std::string Region::describe() const { return node_describe(*node_); }

}  // namespace lyapcert
