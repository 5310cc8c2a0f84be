#include "lyapcert/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lyapcert {

using nlohmann::json;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kCertify: return "certify";
    case Mode::kTransitive: return "transitive";
    case Mode::kInvariance: return "invariance";
    case Mode::kSimulate: return "simulate";
  }
  return "?";
}

Mode mode_from_string(std::string_view name) {
  if (name == "certify") return Mode::kCertify;
  if (name == "transitive") return Mode::kTransitive;
  if (name == "invariance") return Mode::kInvariance;
  if (name == "simulate") return Mode::kSimulate;
  throw CertError(ErrorCode::kInvalidConfig, "mode: unknown mode '" + std::string(name) + "'");
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw CertError(ErrorCode::kInvalidConfig, path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string join(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(join(path, key), "missing");
  return *it;
}

const json* optional_member(const json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double number_or(const json& j, const std::string& key, double fallback,
                 const std::string& path) {
  const json* m = optional_member(j, key);
  return m ? number(*m, join(path, key)) : fallback;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool boolean_or(const json& j, const std::string& key, bool fallback,
                const std::string& path) {
  const json* m = optional_member(j, key);
  if (!m) return fallback;
  if (!m->is_boolean()) fail(join(path, key), "expected true or false");
  return m->get<bool>();
}

Point vector(const json& j, const std::string& path, int expected_dim = -1) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
  Point v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], join(path, i));
  if (expected_dim >= 0 && v.size() != expected_dim) {
    fail(path, "expected " + std::to_string(expected_dim) + " entries, got " +
                   std::to_string(v.size()));
  }
  return v;
}

Eigen::MatrixXd matrix(const json& j, const std::string& path, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    fail(path, "expected " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) m.row(r) = vector(j[r], join(path, r), cols).transpose();
  return m;
}

std::vector<Point> point_list(const json& j, const std::string& path, int dim) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty list of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector(j[i], join(path, i), dim));
  return out;
}

CompactDomain parse_domain(const json& j, const std::string& path) {
  const std::string type = text(member(j, "type", path), join(path, "type"));
  if (type == "box") {
    const Point lo = vector(member(j, "lo", path), join(path, "lo"));
    const Point hi = vector(member(j, "hi", path), join(path, "hi"), static_cast<int>(lo.size()));
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (!(lo[i] < hi[i])) fail(join(path, "hi"), "each hi must exceed lo");
    }
    return CompactDomain::box(lo, hi);
  }
  if (type == "simplex") {
    const double dim = number(member(j, "dim", path), join(path, "dim"));
    if (dim < 2 || dim != std::floor(dim)) fail(join(path, "dim"), "must be an integer >= 2");
    return CompactDomain::simplex(static_cast<int>(dim));
  }
  fail(join(path, "type"), "unknown domain type '" + type + "'");
}

PopulationGame parse_game(const json& j, const std::string& path, int dim) {
  if (const json* b = optional_member(j, "builtin")) {
    const std::string name = text(*b, join(path, "builtin"));
    if (name == "rps") {
      if (dim != 3) fail(join(path, "builtin"), "rps needs a 3-strategy simplex");
      return PopulationGame::rps();
    }
    if (name == "neg_identity") {
      return PopulationGame::neg_identity(vector(member(j, "c", path), join(path, "c"), dim));
    }
    if (name == "coordination") return PopulationGame::coordination(dim);
    fail(join(path, "builtin"), "unknown game '" + name + "'");
  }
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(dim);
  if (const json* o = optional_member(j, "offset")) offset = vector(*o, join(path, "offset"), dim);
  return PopulationGame::matrix("matrix", matrix(member(j, "matrix", path), join(path, "matrix"), dim, dim),
                                offset);
}

struct Context {
  CompactDomain domain;
  std::optional<PopulationGame> game;
  const Tolerances* tol;
};

DynamicSpec parse_dynamic(const json& j, const std::string& path) {
  DynamicSpec spec;
  try {
    spec.family = family_from_string(text(member(j, "family", path), join(path, "family")));
  } catch (const CertError& e) {
    if (e.code() != ErrorCode::kUnknownFamily) throw;
    fail(join(path, "family"), e.what());
  }
  spec.tempering_rate = number_or(j, "tempering_rate", 1.0, path);
  return spec;
}

ScalarField parse_field(const json& j, const std::string& path, const Context& ctx) {
  const int dim = ctx.domain.dim();
  if (j.is_number()) return fields::constant(number(j, path));
  const std::string op = text(member(j, "op", path), join(path, "op"));
  auto arg = [&](const char* key = "arg") {
    return parse_field(member(j, key, path), join(path, key), ctx);
  };
  auto center = [&]() -> Point {
    const json* c = optional_member(j, "center");
    return c ? vector(*c, join(path, "center"), dim) : Point(Point::Zero(dim));
  };
  if (op == "constant") return fields::constant(number(member(j, "value", path), join(path, "value")));
  if (op == "coordinate") {
    const double i = number(member(j, "index", path), join(path, "index"));
    if (i < 0 || i >= dim || i != std::floor(i)) fail(join(path, "index"), "out of range");
    return fields::coordinate(static_cast<int>(i));
  }
  if (op == "linear") {
    return fields::linear(vector(member(j, "g", path), join(path, "g"), dim),
                          number_or(j, "offset", 0.0, path));
  }
  if (op == "quadratic") {
    return fields::quadratic(matrix(member(j, "Q", path), join(path, "Q"), dim, dim), center(),
                             number_or(j, "scale", 1.0, path));
  }
  if (op == "norm_sq") return fields::norm_sq(center());
  if (op == "norm") {
    const double p = number_or(j, "p", 2.0, path);
    if (p != 1.0 && p != 2.0) fail(join(path, "p"), "must be 1 or 2");
    return fields::norm(center(), static_cast<int>(p));
  }
  if (op == "abs") return fields::abs(arg());
  if (op == "square") return fields::square(arg());
  if (op == "positive_part") return fields::positive_part(arg());
  if (op == "scale") {
    return fields::scaled(arg(), number(member(j, "factor", path), join(path, "factor")));
  }
  if (op == "shift") {
    return fields::shifted(arg(), number(member(j, "offset", path), join(path, "offset")));
  }
  if (op == "sum" || op == "product") {
    const json& terms = member(j, "terms", path);
    if (!terms.is_array() || terms.empty()) fail(join(path, "terms"), "expected a non-empty list");
    std::vector<ScalarField> parts;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      parts.push_back(parse_field(terms[i], join(join(path, "terms"), i), ctx));
    }
    if (op == "product") {
      ScalarField acc = parts.front();
      for (std::size_t i = 1; i < parts.size(); ++i) acc = fields::product(acc, parts[i]);
      return acc;
    }
    std::vector<double> weights(parts.size(), 1.0);
    if (const json* w = optional_member(j, "weights")) {
      const Point wv = vector(*w, join(path, "weights"), static_cast<int>(parts.size()));
      for (std::size_t i = 0; i < parts.size(); ++i) weights[i] = wv[i];
    }
    return fields::sum(weights, parts);
  }
  if (op == "gains" || op == "gains_rate") {
    if (!ctx.game) fail(join(path, "op"), "gains fields need a game section");
    const DynamicSpec spec = parse_dynamic(j, path);
    try {
      auto cand = gains_lyapunov_candidates(*ctx.game, spec, *ctx.tol);
      return op == "gains" ? cand.w : cand.w_tilde;
    } catch (const CertError& e) {
      fail(join(path, "family"), e.what());
    }
  }
  fail(join(path, "op"), "unknown field op '" + op + "'");
}

Region parse_region(const json& j, const std::string& path, const Context& ctx) {
  const int dim = ctx.domain.dim();
  const std::string type = text(member(j, "type", path), join(path, "type"));
  const bool open = boolean_or(j, "open", true, path);
  if (type == "whole") return Region::whole(ctx.domain);
  if (type == "points") {
    return Region::points(ctx.domain, point_list(member(j, "points", path), join(path, "points"), dim));
  }
  if (type == "ball") {
    const double r = number(member(j, "radius", path), join(path, "radius"));
    if (r < 0.0) fail(join(path, "radius"), "must be nonnegative");
    return Region::ball(ctx.domain, point_list(member(j, "centers", path), join(path, "centers"), dim),
                        r, open);
  }
  if (type == "box") {
    return Region::box(ctx.domain, vector(member(j, "lo", path), join(path, "lo"), dim),
                       vector(member(j, "hi", path), join(path, "hi"), dim), open);
  }
  if (type == "sublevel" || type == "superlevel") {
    const ScalarField f = parse_field(member(j, "field", path), join(path, "field"), ctx);
    const double level = number(member(j, "level", path), join(path, "level"));
    if (type == "sublevel") return Region::sublevel(ctx.domain, f, level);
    return Region::superlevel(ctx.domain, f, level, boolean_or(j, "closed", true, path));
  }
  if (type == "intersection") {
    const json& args = member(j, "args", path);
    if (!args.is_array() || args.empty()) fail(join(path, "args"), "expected a non-empty list");
    Region acc = parse_region(args[0], join(join(path, "args"), 0), ctx);
    for (std::size_t i = 1; i < args.size(); ++i) {
      acc = acc.intersect(parse_region(args[i], join(join(path, "args"), i), ctx));
    }
    return acc;
  }
  if (type == "complement") return parse_region(member(j, "arg", path), join(path, "arg"), ctx).complement();
  if (type == "closure") return parse_region(member(j, "arg", path), join(path, "arg"), ctx).closure();
  fail(join(path, "type"), "unknown region type '" + type + "'");
}

Inclusion parse_inclusion(const json& j, const std::string& path, const Context& ctx) {
  const int dim = ctx.domain.dim();
  const std::string type = text(member(j, "type", path), join(path, "type"));
  std::optional<Inclusion> inc;
  if (type == "linear") {
    const Eigen::MatrixXd a = matrix(member(j, "matrix", path), join(path, "matrix"), dim, dim);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    if (const json* o = optional_member(j, "offset")) b = vector(*o, join(path, "offset"), dim);
    inc = Inclusion::from_vector_field(
        ctx.domain, "linear", [a, b](const Point& x) -> Point { return a * x + b; }, 1.0);
  } else if (type == "components") {
    const json& comps = member(j, "components", path);
    if (!comps.is_array() || static_cast<int>(comps.size()) != dim) {
      fail(join(path, "components"), "expected " + std::to_string(dim) + " field expressions");
    }
    std::vector<ScalarField> parts;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      parts.push_back(parse_field(comps[i], join(join(path, "components"), i), ctx));
    }
    inc = Inclusion::from_vector_field(
        ctx.domain, "components",
        [parts](const Point& x) -> Point {
          Point v(static_cast<Eigen::Index>(parts.size()));
          for (std::size_t i = 0; i < parts.size(); ++i) v[i] = parts[i](x);
          return v;
        },
        1.0);
  } else if (type == "game") {
    if (!ctx.game) fail(join(path, "type"), "game dynamics need a game section");
    inc = make_inclusion(*ctx.game, parse_dynamic(j, path), *ctx.tol);
    if (const json* m = optional_member(j, "bound")) {
      inc = inc->with_bound(number(*m, join(path, "bound")));
    }
    return *inc;
  } else if (type == "hull") {
    const json& members = member(j, "members", path);
    if (!members.is_array() || members.empty()) fail(join(path, "members"), "expected a non-empty list");
    std::vector<Inclusion> parts;
    for (std::size_t i = 0; i < members.size(); ++i) {
      parts.push_back(parse_inclusion(members[i], join(join(path, "members"), i), ctx));
    }
    inc = Inclusion::hull(parts);
  } else {
    fail(join(path, "type"), "unknown inclusion type '" + type + "'");
  }
  if (const json* m = optional_member(j, "bound")) {
    const double bound = number(*m, join(path, "bound"));
    if (!(bound > 0.0)) fail(join(path, "bound"), "must be positive");
    return inc->with_bound(bound);
  }
  return inc->with_bound(sampled_velocity_bound(*inc, GridSampler(0.05)));
}

double positive(const json& j, const std::string& key, double fallback,
                const std::string& path) {
  const double v = number_or(j, key, fallback, path);
  if (!(v > 0.0)) fail(join(path, key), "must be positive");
  return v;
}

Numerics parse_numerics(const json& j, const std::string& path) {
  Numerics n;
  if (j.is_null()) return n;
  if (!j.is_object()) fail(path, "expected an object");
  n.h = positive(j, "h", n.h, path);
  if (n.h > 1.0) fail(join(path, "h"), "must be at most 1");
  n.dt = positive(j, "dt", n.dt, path);
  if (const json* t = optional_member(j, "horizon")) {
    n.horizon = number(*t, join(path, "horizon"));
    if (!(*n.horizon > 0.0)) fail(join(path, "horizon"), "must be positive");
  }
  n.max_horizon = positive(j, "max_horizon", n.max_horizon, path);
  const double starts = number_or(j, "n_starts", static_cast<double>(n.n_starts), path);
  if (starts < 1 || starts > 1e7 || starts != std::floor(starts)) {
    fail(join(path, "n_starts"), "must be an integer in [1, 1e7]");
  }
  n.n_starts = static_cast<std::size_t>(starts);
  if (const json* s = optional_member(j, "seed")) {
    if (!s->is_number_unsigned()) fail(join(path, "seed"), "must be a nonnegative integer");
    n.seed = s->get<std::uint64_t>();
  }
  if (const json* p = optional_member(j, "policies")) {
    if (!p->is_array() || p->empty()) fail(join(path, "policies"), "expected a non-empty list");
    n.policies.clear();
    for (std::size_t i = 0; i < p->size(); ++i) {
      const std::string name = text((*p)[i], join(join(path, "policies"), i));
      if (name == "all") {
        n.policies = Numerics{}.policies;
        break;
      }
      try {
        n.policies.push_back(selector_kind_from_string(name));
      } catch (const std::invalid_argument& e) {
        fail(join(join(path, "policies"), i), e.what());
      }
    }
  }
  n.tol_conv = positive(j, "tol_conv", n.tol_conv, path);
  n.strict_level = boolean_or(j, "strict_level", n.strict_level, path);
  n.kappa = number_or(j, "kappa", n.kappa, path);
  if (!(n.kappa > 1.0)) fail(join(path, "kappa"), "must exceed 1");
  n.check_xprime_invariance =
      boolean_or(j, "check_xprime_invariance", n.check_xprime_invariance, path);
  n.lipschitz_cap = positive(j, "lipschitz_cap", n.lipschitz_cap, path);
  const double keep = number_or(j, "keep_trajectories", static_cast<double>(n.keep_trajectories), path);
  if (keep < 0 || keep != std::floor(keep)) fail(join(path, "keep_trajectories"), "must be a nonnegative integer");
  n.keep_trajectories = static_cast<std::size_t>(keep);
  if (const json* t = optional_member(j, "tolerances")) {
    const std::string tp = join(path, "tolerances");
    Tolerances& tol = n.tol;
    tol.eps_bd = positive(*t, "eps_bd", tol.eps_bd, tp);
    tol.eps_num = positive(*t, "eps_num", tol.eps_num, tp);
    tol.delta_fd = positive(*t, "delta_fd", tol.delta_fd, tp);
    tol.tol_grad = positive(*t, "tol_grad", tol.tol_grad, tp);
    tol.tol_kink = positive(*t, "tol_kink", tol.tol_kink, tp);
    tol.tol_tie = positive(*t, "tol_tie", tol.tol_tie, tp);
    tol.lipschitz_inflation = positive(*t, "lipschitz_inflation", tol.lipschitz_inflation, tp);
    tol.max_kink_fraction = positive(*t, "max_kink_fraction", tol.max_kink_fraction, tp);
  }
  return n;
}

void require(const RunConfig& cfg, std::initializer_list<const char*> regions,
             std::initializer_list<const char*> fields, bool inclusion) {
  for (const char* r : regions) {
    if (!cfg.regions.count(r)) fail(std::string("regions.") + r, "required in mode " + std::string(to_string(cfg.mode)));
  }
  for (const char* f : fields) {
    if (!cfg.fields.count(f)) fail(std::string("fields.") + f, "required in mode " + std::string(to_string(cfg.mode)));
  }
  if (inclusion && !cfg.inclusion) fail("inclusion", "missing");
}

bool is_rate_field(const std::string& name) {
  return name.size() > 6 && name.compare(name.size() - 6, 6, "_tilde") == 0;
}

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw CertError(ErrorCode::kInvalidConfig,
                    "line " + std::to_string(line) + ", column " + std::to_string(col) +
                        ": invalid JSON");
  }
}

json apply_overrides(json document, const json& overrides) {
  if (!document.is_object()) return document;
  document.merge_patch(overrides);
  return document;
}

RunConfig parse_config(const json& document, const std::filesystem::path& path) {
  RunConfig cfg;
  cfg.document = document;
  cfg.path = path;
  if (!document.is_object()) fail("(root)", "expected an object");
  const json& version = member(document, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw CertError(ErrorCode::kSchemaMismatch, "schema_version: expected 1");
  }
  cfg.mode = mode_from_string(text(member(document, "mode", ""), "mode"));
  cfg.id = document.contains("id") ? text(document["id"], "id") : path.stem().string();
  if (const json* out = optional_member(document, "output")) cfg.output = text(*out, "output");
  cfg.numerics = parse_numerics(document.value("numerics", json()), "numerics");

  cfg.domain = parse_domain(member(document, "domain", ""), "domain");
  Context ctx{*cfg.domain, std::nullopt, &cfg.numerics.tol};
  if (const json* g = optional_member(document, "game")) {
    if (!cfg.domain->is_simplex()) fail("game", "games live on a simplex domain");
    ctx.game = parse_game(*g, "game", cfg.domain->dim());
    cfg.game = ctx.game;
  }
  if (const json* fs = optional_member(document, "fields")) {
    if (!fs->is_object()) fail("fields", "expected an object");
    for (const auto& [name, expr] : fs->items()) {
      ScalarField f = parse_field(expr, "fields." + name, ctx);
      if (is_rate_field(name)) f = f.as_decay_rate();
      cfg.fields.emplace(name, std::move(f));
    }
  }
  if (const json* rs = optional_member(document, "regions")) {
    if (!rs->is_object()) fail("regions", "expected an object");
    for (const auto& [name, expr] : rs->items()) {
      cfg.regions.emplace(name, parse_region(expr, "regions." + name, ctx));
    }
  }
  if (const json* inc = optional_member(document, "inclusion")) {
    cfg.inclusion = parse_inclusion(*inc, "inclusion", ctx);
  }
  if (const json* sim = optional_member(document, "simulate")) {
    cfg.simulate_starts = point_list(member(*sim, "starts", "simulate"), "simulate.starts",
                                     cfg.domain->dim());
    for (std::size_t i = 0; i < cfg.simulate_starts.size(); ++i) {
      if (!cfg.domain->contains(cfg.simulate_starts[i], 1e-9)) {
        fail(join("simulate.starts", i), "outside the domain");
      }
    }
  }

  switch (cfg.mode) {
    case Mode::kCertify: require(cfg, {"target", "xprime"}, {"W", "W_tilde"}, true); break;
    case Mode::kTransitive:
      require(cfg, {"target", "x1", "x2"}, {"W1", "W2", "W1_tilde", "W2_tilde"}, true);
      break;
    case Mode::kInvariance: require(cfg, {"target", "xprime"}, {}, true); break;
    case Mode::kSimulate:
      require(cfg, {}, {}, true);
      if (cfg.simulate_starts.empty()) fail("simulate.starts", "missing");
      break;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const json& overrides) {
  std::ifstream in(path);
  if (!in) throw CertError(ErrorCode::kInvalidConfig, path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(apply_overrides(parse_json_text(ss.str()), overrides), path);
  cfg.overrides = overrides;
  return cfg;
}

std::string RunConfig::canonical() const { return document.dump(); }

std::string RunConfig::hash() const { return fnv1a_hex(canonical()); }

const Region& RunConfig::region(const std::string& name) const {
  auto it = regions.find(name);
  if (it == regions.end()) fail("regions." + name, "missing");
  return it->second;
}

const ScalarField& RunConfig::field(const std::string& name) const {
  auto it = fields.find(name);
  if (it == fields.end()) fail("fields." + name, "missing");
  return it->second;
}

Instance RunConfig::instance() const {
  if (!inclusion) fail("inclusion", "missing");
  return Instance{id, region("target"), region("xprime"), field("W"), field("W_tilde"), *inclusion};
}

TransitivityInstance RunConfig::transitivity_instance() const {
  if (!inclusion) fail("inclusion", "missing");
  return TransitivityInstance{id,          region("x1"),       region("x2"),
                              region("target"), field("W1"),   field("W2"),
                              field("W1_tilde"), field("W2_tilde"), *inclusion};
}

CertifyOptions RunConfig::certify_options() const {
  CertifyOptions o;
  o.sampler = GridSampler(numerics.h);
  o.dt = numerics.dt;
  o.horizon = numerics.horizon;
  o.max_horizon = numerics.max_horizon;
  o.n_starts = numerics.n_starts;
  o.seed = numerics.seed;
  o.policies = numerics.policies;
  o.tol_conv = numerics.tol_conv;
  o.strict_level = numerics.strict_level;
  o.check_xprime_invariance = numerics.check_xprime_invariance;
  o.lipschitz_cap = numerics.lipschitz_cap;
  o.keep_trajectories = numerics.keep_trajectories;
  o.tol = numerics.tol;
  return o;
}

InvarianceOptions RunConfig::invariance_options() const {
  InvarianceOptions o;
  o.n_starts = numerics.n_starts;
  o.horizon = numerics.horizon.value_or(20.0);
  o.dt = inclusion ? std::min(numerics.dt, max_step(*inclusion)) : numerics.dt;
  o.policies = numerics.policies;
  o.seed = numerics.seed;
  o.sampler = GridSampler(numerics.h);
  o.tol = numerics.tol;
  if (regions.count("target")) {
    o.adversary_objective = SetDistance(region("target"), o.sampler).as_field();
  }
  return o;
}

}  // namespace lyapcert
