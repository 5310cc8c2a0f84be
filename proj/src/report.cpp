#include "lyapcert/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace lyapcert {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double num_from(const json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

json vec(const Point& p) {
  json a = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(num(p[i]));
  return a;
}

Point vec_from(const json& j) {
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p[i] = num_from(j[i]);
  return p;
}

json ref_json(const TrajectoryRef& r) {
  return {{"start", vec(r.start)}, {"policy", r.policy}, {"seed", r.seed},
          {"step", r.step}, {"t", num(r.t)}};
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json tolerances_json(const Tolerances& t) {
  return {{"eps_bd", t.eps_bd},       {"eps_num", t.eps_num},
          {"delta_fd", t.delta_fd},   {"tol_grad", t.tol_grad},
          {"tol_kink", t.tol_kink},   {"tol_tie", t.tol_tie},
          {"lipschitz_inflation", t.lipschitz_inflation},
          {"max_kink_fraction", t.max_kink_fraction}};
}

json settings_json(const RunSettings& s) {
  return {{"h", s.h},
          {"dt", s.dt},
          {"horizon", s.horizon},
          {"n_starts", s.n_starts},
          {"seed", s.seed},
          {"policies", s.policies},
          {"tol_conv", s.tol_conv},
          {"c_tol", num(s.c_tol)},
          {"strict_level", s.strict_level},
          {"lipschitz_cap", s.lipschitz_cap},
          {"tolerances", tolerances_json(s.tol)}};
}

json construction_json(const Verdict& verdict, const std::optional<InvariantConstruction>& c) {
  json j = {{"verdict", to_json(verdict)}};
  if (!c) return j;
  const auto& d = c->diagnostics;
  j.update({{"d_bar", c->d_bar},
            {"d_bar_error", c->d_bar_error},
            {"d_bar_argmin", vec(c->d_bar_argmin)},
            {"w_bar", c->w_bar},
            {"w_bar_error", c->w_bar_error},
            {"w_bar_argmin", vec(c->w_bar_argmin)},
            {"level", c->level},
            {"strict", c->strict},
            {"lipschitz_w", num(c->lipschitz_w)},
            {"escape_slack", num(c->escape_slack)},
            {"diagnostics",
             {{"h", d.h},
              {"covering_radius", d.covering_radius},
              {"complement_samples", d.complement_samples},
              {"annulus_samples", d.annulus_samples},
              {"xpp_samples", d.xpp_samples},
              {"target_samples", d.target_samples},
              {"escape_implication_violations", d.escape_implication_violations},
              {"annulus_threshold_violations", d.annulus_threshold_violations},
              {"xpp_distance_violations", d.xpp_distance_violations},
              {"target_outside_xpp", d.target_outside_xpp}}}});
  return j;
}

struct Section {
  std::string name;
  const Verdict* verdict;
};

std::vector<Section> sections(const Certificate& c) {
  std::vector<Section> out = {{"sign_conditions", &c.sign_conditions},
                              {"zero_sets", &c.zero_sets},
                              {"lipschitz_w", &c.lipschitz_w},
                              {"decrease_bound", &c.decrease_bound},
                              {"construction", &c.construction_verdict},
                              {"forward_invariance", &c.forward_invariance},
                              {"monotone_decrease", &c.monotone_decrease},
                              {"convergence", &c.convergence},
                              {"xprime_invariance", &c.xprime_invariance}};
  if (c.transitivity) {
    for (const auto& [name, v] : c.transitivity->conditions) {
      out.push_back({"transitivity." + name, &v});
    }
    out.push_back({"transitivity.zero_set_identity", &c.transitivity->zero_set_identity});
  }
  return out;
}

std::string witness_csv(const std::vector<Section>& secs, int dim) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "section,check";
  for (int a = 0; a < dim; ++a) os << ",x" << a + 1;
  os << ",values,policy,seed,step,t\n";
  for (const auto& s : secs) {
    for (const auto& w : s.verdict->witnesses) {
      os << s.name << ',' << w.check;
      for (int a = 0; a < dim; ++a) os << ',' << (a < w.point.size() ? w.point[a] : 0.0);
      os << ',';
      for (std::size_t i = 0; i < w.values.size(); ++i) {
        os << (i ? ";" : "") << w.values[i].first << '=' << w.values[i].second;
      }
      if (w.trajectory) {
        os << ',' << w.trajectory->policy << ',' << w.trajectory->seed << ','
           << w.trajectory->step << ',' << w.trajectory->t;
      } else {
        os << ",,,,";
      }
      os << '\n';
    }
  }
  return os.str();
}

// Files are staged and renamed into place together, certificate last.
class Writer {
 public:
  explicit Writer(fs::path root) : root_(std::move(root)) {}
  void add(const fs::path& rel, std::string bytes) { files_.emplace_back(rel, std::move(bytes)); }
  void commit(const std::string& certificate) {
    for (const auto& [rel, bytes] : files_) write_atomic(root_ / rel, bytes);
    write_atomic(root_ / "certificate.json", certificate);
  }

 private:
  fs::path root_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string trajectory_csv(Trajectory traj, const ScalarField* w) {
  if (w && w->valid()) {
    traj.w_values.clear();
    for (const auto& x : traj.states) traj.w_values.push_back((*w)(x));
  }
  std::ostringstream os;
  write_csv(os, traj);
  return os.str();
}

// Slots of aborted runs stay empty.
std::vector<StoredTrajectory> nonempty(const std::vector<StoredTrajectory>& trajs) {
  std::vector<StoredTrajectory> out;
  for (const auto& t : trajs) {
    if (!t.trajectory.states.empty()) out.push_back(t);
  }
  return out;
}

std::string overlay_csv(const std::vector<StoredTrajectory>& trajs) {
  std::ostringstream os;
  os << std::setprecision(17);
  std::size_t rows = 0;
  os << "t";
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    const auto& tr = trajs[k].trajectory;
    rows = std::max(rows, tr.states.size());
    for (Eigen::Index a = 0; a < tr.initial_state().size(); ++a) {
      os << ",x" << a + 1 << '_' << k;
    }
  }
  os << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    bool wrote_t = false;
    for (const auto& s : trajs) {
      if (r < s.trajectory.times.size()) {
        os << s.trajectory.times[r];
        wrote_t = true;
        break;
      }
    }
    if (!wrote_t) os << "";
    for (const auto& s : trajs) {
      const auto& tr = s.trajectory;
      for (Eigen::Index a = 0; a < tr.initial_state().size(); ++a) {
        os << ',';
        if (r < tr.states.size()) os << tr.states[r][a];
      }
    }
    os << '\n';
  }
  return os.str();
}

std::vector<Point> boundary_samples(const Region& region, const GridSampler& sampler) {
  std::vector<Point> out;
  const auto offsets = sampler.neighbour_offsets(region.domain());
  for (const auto& x : region.sample(sampler)) {
    for (const auto& off : offsets) {
      const Point y = x + off;
      if (region.domain().contains(y, 1e-9) && !region.contains(y)) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

void append_points(std::ostringstream& os, const std::string& name,
                   const std::vector<Point>& pts) {
  for (const auto& p : pts) {
    os << name;
    for (Eigen::Index a = 0; a < p.size(); ++a) os << ',' << p[a];
    os << '\n';
  }
}

std::string header(const std::string& first, int dim) {
  std::string h = first;
  for (int a = 0; a < dim; ++a) h += ",x" + std::to_string(a + 1);
  return h + "\n";
}

bool plottable(const CompactDomain& d) {
  return (!d.is_simplex() && d.dim() == 2) || (d.is_simplex() && d.dim() == 3);
}

void add_plotdata(Writer& out, const CompactDomain& domain, double h,
                  const std::vector<std::pair<std::string, const Region*>>& regions,
                  const ScalarField* w, const std::optional<InvariantConstruction>& c,
                  const std::vector<StoredTrajectory>& trajs) {
  const int dim = domain.dim();
  const GridSampler sampler(h);
  {
    std::ostringstream os;
    os << std::setprecision(17) << header("region", dim);
    for (const auto& [name, r] : regions) {
      if (r && r->valid()) append_points(os, name, boundary_samples(*r, sampler));
    }
    out.add("plotdata/regions.csv", os.str());
  }
  if (w && c && plottable(domain)) {
    std::ostringstream os;
    os << std::setprecision(17) << "level_name,level,segment";
    for (int a = 0; a < dim; ++a) os << ",x" << a + 1;
    os << '\n';
    const double plot_h = std::max(h, 0.005);
    std::size_t seg = 0;
    for (const auto& [name, level] :
         {std::pair<std::string, double>{"w_bar_half", 0.5 * c->w_bar}, {"w_bar", c->w_bar}}) {
      for (const auto& [p, q] : level_set_segments(*w, level, domain, plot_h)) {
        for (const Point* x : {&p, &q}) {
          os << name << ',' << level << ',' << seg;
          for (int a = 0; a < dim; ++a) os << ',' << (*x)[a];
          os << '\n';
        }
        ++seg;
      }
    }
    out.add("plotdata/level_sets.csv", os.str());
  }
  if (!trajs.empty()) out.add("plotdata/trajectories.csv", overlay_csv(trajs));
}

std::string policy_tag(const std::string& p) { return p.empty() ? "run" : p; }

void add_trajectories(Writer& out, const std::vector<StoredTrajectory>& trajs,
                      const ScalarField* w) {
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    std::ostringstream name;
    name << "trajectories/traj_" << std::setw(3) << std::setfill('0') << k << '_'
         << policy_tag(trajs[k].ref.policy) << ".csv";
    out.add(name.str(), trajectory_csv(trajs[k].trajectory, w));
  }
}

json base_document(const RunConfig& cfg) {
  return {{"schema_version", kSchemaVersion},
          {"tool", "lyapcert"},
          {"timestamp", timestamp()},
          {"mode", std::string(to_string(cfg.mode))},
          {"instance_id", cfg.id},
          {"config_path", cfg.path.empty() ? std::string() : fs::absolute(cfg.path).string()},
          {"config_hash", cfg.hash()},
          {"overrides", cfg.overrides},
          {"config", cfg.document}};
}

Trajectory reintegrate(const Inclusion& inc, const TrajectoryRef& ref, double dt,
                       std::size_t steps, const ScalarField& objective,
                       const Tolerances& tol) {
  const Selector sel = make_selector(selector_kind_from_string(ref.policy), ref.seed, objective);
  return integrate(inc, ref.start, static_cast<double>(steps) * dt, dt, sel, tol, steps);
}

// Witness trajectories are re-integrated from their recorded seeds.
void add_witness_trajectories(Writer& out, const std::vector<Section>& secs,
                              const Inclusion& inc, double dt, double horizon,
                              const ScalarField& objective, const ScalarField* w,
                              const Tolerances& tol) {
  std::size_t k = 0;
  for (const auto& s : secs) {
    for (const auto& wit : s.verdict->witnesses) {
      if (!wit.trajectory || wit.check == "left_domain" || wit.trajectory->policy.empty()) continue;
      const std::size_t steps = wit.check == "escape"
                                    ? wit.trajectory->step
                                    : static_cast<std::size_t>(std::llround(horizon / dt));
      Trajectory tr;
      try {
        tr = reintegrate(inc, *wit.trajectory, dt, std::max<std::size_t>(steps, 1), objective, tol);
      } catch (const CertError&) {
        continue;
      }
      std::ostringstream name;
      name << "trajectories/witness_" << std::setw(3) << std::setfill('0') << k++ << '_'
           << s.name << ".csv";
      out.add(name.str(), trajectory_csv(tr, w));
    }
  }
}

}  // namespace

json to_json(const Verdict& v) {
  json ws = json::array();
  for (const auto& w : v.witnesses) {
    json values = json::object();
    for (const auto& [k, x] : w.values) values[k] = num(x);
    json wj = {{"check", w.check}, {"point", vec(w.point)}, {"values", values}};
    if (w.trajectory) wj["trajectory"] = ref_json(*w.trajectory);
    ws.push_back(std::move(wj));
  }
  return {{"status", std::string(to_string(v.status))},
          {"reason", v.reason},
          {"checked", v.checked},
          {"violations", v.violations},
          {"skipped_points", v.skipped_points},
          {"worst", num(v.worst)},
          {"witnesses", ws}};
}

Verdict verdict_from_json(const json& j) {
  Verdict v;
  const std::string status = j.at("status").get<std::string>();
  v.status = status == "pass" ? Status::kPass : status == "fail" ? Status::kFail : Status::kSkipped;
  v.reason = j.value("reason", "");
  v.checked = j.value("checked", std::size_t{0});
  v.violations = j.value("violations", std::size_t{0});
  v.skipped_points = j.value("skipped_points", std::size_t{0});
  v.worst = num_from(j.value("worst", json()));
  for (const auto& wj : j.value("witnesses", json::array())) {
    Witness w;
    w.check = wj.at("check").get<std::string>();
    w.point = vec_from(wj.at("point"));
    for (const auto& [k, x] : wj.at("values").items()) w.values.emplace_back(k, num_from(x));
    if (wj.contains("trajectory")) {
      const json& r = wj["trajectory"];
      w.trajectory = TrajectoryRef{vec_from(r.at("start")), r.at("policy").get<std::string>(),
                                   r.at("seed").get<std::uint64_t>(),
                                   r.at("step").get<std::size_t>(), num_from(r.at("t"))};
    }
    v.witnesses.push_back(std::move(w));
  }
  return v;
}

json to_json(const Certificate& c) {
  json j = {{"instance_id", c.instance_id},
            {"settings", settings_json(c.settings)},
            {"hypotheses",
             {{"sign_conditions", to_json(c.sign_conditions)},
              {"zero_sets", to_json(c.zero_sets)},
              {"lipschitz_w", to_json(c.lipschitz_w)},
              {"decrease_bound", to_json(c.decrease_bound)}}},
            {"construction", construction_json(c.construction_verdict, c.construction)},
            {"trajectories",
             {{"forward_invariance", to_json(c.forward_invariance)},
              {"monotone_decrease", to_json(c.monotone_decrease)},
              {"convergence", to_json(c.convergence)},
              {"xprime_invariance", to_json(c.xprime_invariance)}}},
            {"overall",
             {{"pass", c.overall_pass},
              {"conclusion", c.conclusion},
              {"exit_code", exit_code(c)}}}};
  if (c.transitivity) {
    const auto& t = *c.transitivity;
    json conds = json::object();
    for (const auto& [name, v] : t.conditions) conds[name] = to_json(v);
    json rescued = json::array();
    for (std::size_t i = 0; i < t.rescued_points.size() && i < 16; ++i) {
      rescued.push_back(vec(t.rescued_points[i]));
    }
    j["transitivity"] = {{"kappa", t.kappa},
                         {"conditions", conds},
                         {"failed_conditions", t.failed_conditions},
                         {"zero_set_identity", to_json(t.zero_set_identity)},
                         {"rescued_points", t.rescued_points.size()},
                         {"rescued_examples", rescued}};
  }
  return j;
}

int exit_code(const Certificate& c) {
  if (c.overall_pass) return kExitPass;
  const bool conditions_ok = !c.transitivity || c.transitivity->failed_conditions.empty();
  if (!conditions_ok || !c.hypotheses_pass() || !c.construction_verdict.passed()) {
    return kExitHypothesis;
  }
  return kExitInvariance;
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << bytes;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<std::pair<Point, Point>> level_set_segments(const ScalarField& f, double level,
                                                        const CompactDomain& domain,
                                                        double h) {
  std::vector<std::pair<Point, Point>> out;
  const bool simplex = domain.is_simplex();
  const double x0 = simplex ? 0.0 : domain.lo()[0], x1 = simplex ? 1.0 : domain.hi()[0];
  const double y0 = simplex ? 0.0 : domain.lo()[1], y1 = simplex ? 1.0 : domain.hi()[1];
  const int nx = static_cast<int>(std::ceil((x1 - x0) / h - 1e-9));
  const int ny = static_cast<int>(std::ceil((y1 - y0) / h - 1e-9));
  auto lift = [&](double u, double v) {
    Point p(domain.dim());
    p[0] = u;
    p[1] = v;
    if (simplex) p[2] = 1.0 - u - v;
    return p;
  };
  auto inside = [&](double u, double v) { return !simplex || u + v <= 1.0 + 1e-12; };
  std::vector<double> grid((nx + 1) * (ny + 1), std::numeric_limits<double>::quiet_NaN());
  auto gx = [&](int i) { return x0 + (x1 - x0) * i / nx; };
  auto gy = [&](int j) { return y0 + (y1 - y0) * j / ny; };
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      if (inside(gx(i), gy(j))) grid[i * (ny + 1) + j] = f(lift(gx(i), gy(j))) - level;
    }
  }
  auto at = [&](int i, int j) { return grid[i * (ny + 1) + j]; };
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      // Corners counter-clockwise from the lower left.
      const int ci[4] = {i, i + 1, i + 1, i};
      const int cj[4] = {j, j, j + 1, j + 1};
      double val[4];
      bool ok = true;
      for (int k = 0; k < 4; ++k) {
        val[k] = at(ci[k], cj[k]);
        ok = ok && !std::isnan(val[k]);
      }
      if (!ok) continue;
      std::vector<Point> hits;
      for (int k = 0; k < 4; ++k) {
        const int l = (k + 1) % 4;
        if ((val[k] < 0.0) == (val[l] < 0.0)) continue;
        const double s = val[k] / (val[k] - val[l]);
        hits.push_back(lift(gx(ci[k]) + s * (gx(ci[l]) - gx(ci[k])),
                            gy(cj[k]) + s * (gy(cj[l]) - gy(cj[k]))));
      }
      if (hits.size() == 2) {
        out.emplace_back(hits[0], hits[1]);
      } else if (hits.size() == 4) {
        const double centre = f(lift(gx(i) + 0.5 * (gx(i + 1) - gx(i)),
                                     gy(j) + 0.5 * (gy(j + 1) - gy(j)))) - level;
        // Pair each crossing with its neighbour on the side matching corner 0.
        if ((centre < 0.0) == (val[0] < 0.0)) {
          out.emplace_back(hits[0], hits[1]);
          out.emplace_back(hits[2], hits[3]);
        } else {
          out.emplace_back(hits[3], hits[0]);
          out.emplace_back(hits[1], hits[2]);
        }
      }
    }
  }
  return out;
}

RunResult run(const RunConfig& cfg, const fs::path& out_dir) {
  RunResult result;
  Writer out(out_dir);
  json doc = base_document(cfg);
  const CompactDomain& domain = *cfg.domain;
  const double h = cfg.numerics.h;
  const Tolerances& tol = cfg.numerics.tol;
  const ScalarField* w = cfg.fields.count("W") ? &cfg.fields.at("W") : nullptr;

  if (cfg.mode == Mode::kCertify || cfg.mode == Mode::kTransitive) {
    const CertifyOptions opts = cfg.certify_options();
    Certificate cert;
    ScalarField composite;
    Region xprime;
    if (cfg.mode == Mode::kCertify) {
      cert = certify(cfg.instance(), opts);
      xprime = cfg.region("xprime");
    } else {
      const auto inst = cfg.transitivity_instance();
      cert = certify_transitive(inst, opts, cfg.numerics.kappa);
      composite = compose_transitive(inst, cfg.numerics.kappa, tol).first;
      w = &composite;
      xprime = inst.x1;
    }
    doc.update(to_json(cert));
    result.exit_code = exit_code(cert);
    result.summary = cert.instance_id + ": " + cert.conclusion;
    const auto secs = sections(cert);
    out.add("witnesses.csv", witness_csv(secs, domain.dim()));
    const auto kept = nonempty(cert.trajectories);
    add_trajectories(out, kept, w);
    const ScalarField objective = SetDistance(cfg.region("target"), GridSampler(h)).as_field();
    if (cert.settings.dt > 0.0) {
      add_witness_trajectories(out, secs, *cfg.inclusion, cert.settings.dt,
                               cert.settings.horizon > 0.0 ? cert.settings.horizon : 20.0,
                               objective, w, tol);
    }
    const Region* xpp = cert.construction ? &cert.construction->neighbourhood : nullptr;
    add_plotdata(out, domain, h,
                 {{"xprime", &xprime}, {"xpp", xpp}, {"target", &cfg.region("target")}}, w,
                 cert.construction, kept);
  } else if (cfg.mode == Mode::kInvariance) {
    InvarianceOptions opts = cfg.invariance_options();
    const std::size_t keep = cfg.numerics.keep_trajectories;
    std::vector<StoredTrajectory> kept(std::min(keep, opts.n_starts * opts.policies.size()));
    opts.observer = [&](std::size_t idx, const Trajectory& traj, const TrajectoryRef& ref) {
      if (idx < kept.size()) kept[idx] = {ref, traj};
    };
    const Region& region = cfg.region("xprime");
    const auto report = verify_forward_invariance(*cfg.inclusion, region, opts);
    RunSettings s;
    s.h = h;
    s.dt = opts.dt;
    s.horizon = opts.horizon;
    s.n_starts = opts.n_starts;
    s.seed = opts.seed;
    for (auto k : opts.policies) s.policies.push_back(make_selector(k, 0, fields::constant(0)).name());
    s.tol_conv = cfg.numerics.tol_conv;
    s.lipschitz_cap = cfg.numerics.lipschitz_cap;
    s.tol = tol;
    const bool pass = report.verdict.passed();
    result.exit_code = pass ? kExitPass : kExitInvariance;
    result.summary = cfg.id + ": " + report.verdict.reason;
    doc.update({{"settings", settings_json(s)},
                {"trajectories",
                 {{"forward_invariance", to_json(report.verdict)},
                  {"boundary_starts", report.boundary_starts},
                  {"trajectory_count", report.trajectories}}},
                {"overall",
                 {{"pass", pass},
                  {"conclusion", pass ? "X' invariant (empirical)" : "X' is not forward invariant"},
                  {"exit_code", result.exit_code}}}});
    const std::vector<Section> secs = {{"forward_invariance", &report.verdict}};
    out.add("witnesses.csv", witness_csv(secs, domain.dim()));
    kept = nonempty(kept);
    add_trajectories(out, kept, w);
    add_witness_trajectories(out, secs, *cfg.inclusion, opts.dt, opts.horizon,
                             *opts.adversary_objective, w, tol);
    add_plotdata(out, domain, h, {{"xprime", &region}, {"target", &cfg.region("target")}},
                 nullptr, std::nullopt, kept);
  } else {
    const double dt = std::min(cfg.numerics.dt, max_step(*cfg.inclusion));
    const double horizon = cfg.numerics.horizon.value_or(20.0);
    ScalarField objective = cfg.regions.count("target")
                                ? SetDistance(cfg.region("target"), GridSampler(h)).as_field()
                                : fields::norm_sq(Point::Zero(domain.dim()));
    std::vector<StoredTrajectory> trajs;
    json runs = json::array();
    for (std::size_t i = 0; i < cfg.simulate_starts.size(); ++i) {
      for (std::size_t p = 0; p < cfg.numerics.policies.size(); ++p) {
        const std::size_t idx = i * cfg.numerics.policies.size() + p;
        const Selector sel = make_selector(cfg.numerics.policies[p],
                                           trajectory_seed(cfg.numerics.seed, idx), objective);
        TrajectoryRef ref{cfg.simulate_starts[i], sel.name(), sel.seed(), 0, 0.0};
        Trajectory tr = integrate(*cfg.inclusion, cfg.simulate_starts[i], horizon, dt, sel, tol);
        json r = {{"start", vec(cfg.simulate_starts[i])},
                  {"policy", sel.name()},
                  {"seed", sel.seed()},
                  {"steps", tr.steps()},
                  {"final_state", vec(tr.final_state())}};
        if (w) r["W_final"] = num((*w)(tr.final_state()));
        runs.push_back(std::move(r));
        trajs.push_back({ref, std::move(tr)});
      }
    }
    result.exit_code = kExitPass;
    result.summary = cfg.id + ": simulated " + std::to_string(trajs.size()) + " trajectories";
    doc.update({{"settings", {{"dt", dt}, {"horizon", horizon}, {"seed", cfg.numerics.seed}}},
                {"simulation", runs},
                {"overall", {{"pass", true}, {"conclusion", "simulation"}, {"exit_code", 0}}}});
    add_trajectories(out, trajs, w);
    out.add("witnesses.csv", witness_csv({}, domain.dim()));
    if (!trajs.empty()) out.add("plotdata/trajectories.csv", overlay_csv(trajs));
  }

  result.certificate = out_dir / "certificate.json";
  out.commit(doc.dump(2) + "\n");
  return result;
}

namespace {

struct ReplayContext {
  const RunConfig& cfg;
  const json& cert;
  double dt = 0.0;
  double horizon = 0.0;
  double tol_conv = 0.0;
  double c_tol = 0.0;
  double lipschitz_cap = 0.0;
  Tolerances tol{};
  ScalarField w{}, w_tilde{};
  Region xprime{}, target{};
  std::optional<Region> xpp{};
  std::optional<SetDistance> dstar{};
  ScalarField objective{};
  std::optional<TransitivityInstance> tinst{};
};

bool reproduce_point(const ReplayContext& ctx, const std::string& section, const Witness& wit) {
  const Tolerances& tol = ctx.tol;
  const Point& x = wit.point;
  const std::string cond = section.rfind("transitivity.", 0) == 0 ? section.substr(13) : "";
  ScalarField w = ctx.w, wt = ctx.w_tilde;
  if (ctx.tinst && (cond == "a-iii" || cond == "a-iv")) {
    w = ctx.tinst->w1;
    wt = ctx.tinst->w1_tilde;
  } else if (ctx.tinst && (cond == "b-iii" || cond == "b-iv")) {
    w = ctx.tinst->w2;
    wt = ctx.tinst->w2_tilde;
  }
  const std::string& c = wit.check;
  if (c == "sign.W") return w(x) < -tol.eps_num;
  if (c == "sign.W_tilde") return wt(x) > tol.eps_num;
  if (c == "zero.target.W") return std::abs(w(x)) > tol.eps_num;
  if (c == "zero.target.W_tilde") return std::abs(wt(x)) > tol.eps_num;
  if (c == "zero.W") return !(w(x) > tol.eps_num);
  if (c == "zero.W_tilde") return !(wt(x) < -tol.eps_num);
  if (c == "decrease") {
    const auto g = grad(w, x, tol);
    if (!g) return false;
    const auto vs = ctx.cfg.inclusion->velocities_at(x);
    const auto idx = static_cast<std::size_t>(wit.value("velocity"));
    return idx < vs.size() && g->dot(vs[idx]) > wt(x) + tol.eps_num;
  }
  if (c == "lipschitz") {
    Point y(x.size());
    for (Eigen::Index a = 0; a < x.size(); ++a) y[a] = wit.value("partner" + std::to_string(a));
    const double slope = std::abs(w(x) - w(y)) / (x - y).norm();
    return slope * tol.lipschitz_inflation > ctx.lipschitz_cap;
  }
  if (ctx.tinst) {
    const auto& t = *ctx.tinst;
    if (c == "a-i") return t.w1(x) < -tol.eps_num;
    if (c == "a-ii") return t.w1_tilde(x) > tol.eps_num;
    if (c == "b-i") return t.w2(x) < -tol.eps_num;
    if (c == "b-ii") return t.w2_tilde(x) > tol.eps_num;
    if (c == "c") return t.w1_tilde(x) + t.w2_tilde(x) > tol.eps_num;
  }
  return false;
}

bool same_point(const Point& a, const Point& b) {
  return a.size() == b.size() && (a - b).lpNorm<Eigen::Infinity>() <= 1e-12;
}

bool reproduce_trajectory(const ReplayContext& ctx, const std::string& section,
                          const Witness& wit) {
  const TrajectoryRef& ref = *wit.trajectory;
  const Inclusion& inc = *ctx.cfg.inclusion;
  const std::size_t full = static_cast<std::size_t>(std::llround(ctx.horizon / ctx.dt));
  if (wit.check == "left_domain") {
    try {
      reintegrate(inc, ref, ctx.dt, full, ctx.objective, ctx.tol);
    } catch (const CertError& e) {
      return e.code() == ErrorCode::kLeftDomain;
    }
    return false;
  }
  const std::size_t steps = wit.check == "escape" || wit.check == "monotone.step" ||
                                    wit.check == "convergence.excursion"
                                ? ref.step
                                : full;
  const Trajectory tr = reintegrate(inc, ref, ctx.dt, steps, ctx.objective, ctx.tol);
  if (ref.step >= tr.states.size()) return false;
  const Point& x = tr.states[ref.step];
  if (!same_point(x, wit.point)) return false;
  if (wit.check == "escape") {
    const Region* region = section == "forward_invariance" && ctx.xpp ? &*ctx.xpp : &ctx.xprime;
    return !region->closure_contains(x, ctx.tol.eps_bd);
  }
  if (wit.check == "convergence.final") return ctx.dstar->value(x) > ctx.tol_conv;
  if (wit.check == "convergence.excursion") return ctx.dstar->value(x) > 2.0 * ctx.tol_conv;
  const DecreaseTolerance slack{ctx.c_tol};
  const double per_step = slack.per_step(ctx.dt);
  if (wit.check == "monotone.step") {
    if (ref.step == 0) return false;
    const Point& prev = tr.states[ref.step - 1];
    return ctx.w(x) - ctx.w(prev) > ctx.dt * ctx.w_tilde(prev) + per_step;
  }
  if (wit.check == "monotone.cumulative") {
    double bound = ctx.w(tr.states[0]);
    for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
      bound += ctx.dt * ctx.w_tilde(tr.states[k]) + per_step;
    }
    return ctx.w(tr.final_state()) > bound;
  }
  return false;
}

}  // namespace

int replay(const fs::path& certificate, std::ostream& log) {
  std::ifstream in(certificate);
  if (!in) throw CertError(ErrorCode::kInvalidConfig, certificate.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  const json cert = parse_json_text(ss.str());
  if (cert.value("schema_version", -1) != kSchemaVersion) {
    throw CertError(ErrorCode::kSchemaMismatch,
                    "certificate schema_version " + cert.value("schema_version", json(-1)).dump() +
                        ", expected " + std::to_string(kSchemaVersion));
  }
  const std::string config_path = cert.value("config_path", "");
  if (config_path.empty()) {
    throw CertError(ErrorCode::kSchemaMismatch, "certificate names no config file");
  }
  const RunConfig cfg = load_config(config_path, cert.value("overrides", json::object()));
  if (cfg.hash() != cert.value("config_hash", "")) {
    throw CertError(ErrorCode::kSchemaMismatch,
                    "config hash " + cfg.hash() + " differs from recorded " +
                        cert.value("config_hash", std::string("?")));
  }
  if (cfg.mode == Mode::kSimulate) {
    log << "replay: simulation run, nothing to check\n";
    return 0;
  }

  const json& settings = cert.at("settings");
  ReplayContext ctx{cfg, cert};
  ctx.dt = settings.at("dt").get<double>();
  ctx.horizon = settings.value("horizon", 0.0);
  ctx.tol_conv = settings.value("tol_conv", 1e-3);
  ctx.c_tol = num_from(settings.value("c_tol", json(0.0)));
  ctx.lipschitz_cap = settings.value("lipschitz_cap", 1e6);
  ctx.tol = cfg.numerics.tol;
  ctx.target = cfg.region("target");
  const GridSampler sampler(cfg.numerics.h);
  ctx.dstar.emplace(ctx.target, sampler);
  ctx.objective = ctx.dstar->as_field();
  if (cfg.mode == Mode::kCertify) {
    ctx.w = cfg.field("W");
    ctx.w_tilde = cfg.field("W_tilde");
    ctx.xprime = cfg.region("xprime");
  } else if (cfg.mode == Mode::kTransitive) {
    ctx.tinst = cfg.transitivity_instance();
    std::tie(ctx.w, ctx.w_tilde) = compose_transitive(*ctx.tinst, cfg.numerics.kappa, ctx.tol);
    ctx.xprime = ctx.tinst->x1;
  } else {
    ctx.xprime = cfg.region("xprime");
  }
  const json* construction = cert.contains("construction") ? &cert["construction"] : nullptr;
  if (construction && construction->contains("level") && ctx.w.valid()) {
    ConstructionOptions copts{sampler, settings.value("strict_level", false), ctx.tol};
    try {
      ctx.xpp = construct_invariant_neighborhood(ctx.w, ctx.xprime, ctx.target, copts).neighbourhood;
    } catch (const CertError&) {
    }
  }

  std::vector<std::pair<std::string, Verdict>> recorded;
  auto collect = [&](const std::string& prefix, const json& group) {
    for (const auto& [name, v] : group.items()) {
      if (v.is_object() && v.contains("status")) recorded.emplace_back(prefix + name, verdict_from_json(v));
    }
  };
  if (cert.contains("hypotheses")) collect("", cert["hypotheses"]);
  if (cert.contains("trajectories")) collect("", cert["trajectories"]);
  if (cert.contains("transitivity")) {
    collect("transitivity.", cert["transitivity"]["conditions"]);
    recorded.emplace_back("transitivity.zero_set_identity",
                          verdict_from_json(cert["transitivity"]["zero_set_identity"]));
  }

  std::size_t total = 0, reproduced = 0;
  for (const auto& [section, verdict] : recorded) {
    for (const auto& wit : verdict.witnesses) {
      ++total;
      bool ok = false;
      try {
        ok = wit.trajectory ? reproduce_trajectory(ctx, section, wit)
                            : reproduce_point(ctx, section, wit);
      } catch (const std::exception& e) {
        log << "replay: " << section << '/' << wit.check << " raised: " << e.what() << '\n';
      }
      if (ok) {
        ++reproduced;
      } else {
        log << "replay: " << section << '/' << wit.check << " did not reproduce\n";
      }
    }
  }
  log << "replay: " << reproduced << " of " << total << " witnesses reproduced\n";
  return reproduced == total ? 0 : kExitHypothesis;
}

}  // namespace lyapcert
