#ifndef QBODY_CLI_HPP
#define QBODY_CLI_HPP

// Command-line front end. dispatch() takes the arguments after the program
// name and returns the exit status: 0 on success, 2 on usage errors, 1 on
// domain errors (reported on `out` as {"error": {"kind", "detail"}}).

#include "qbody/boundary.hpp"
#include "qbody/duality.hpp"
#include "qbody/io.hpp"
#include "qbody/measures.hpp"
#include "qbody/membership.hpp"
#include "qbody/quantum.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qbody::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string point, functional, angles, model, normal, out;
  std::string oracle = "all";
  std::string body = "q";
  std::string target = "q_interior";
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::vector<std::string> fix;
  int grid = 50;
  double offset = 0, lo = -1, hi = 1;
  Tolerance tol;
};

namespace detail {

inline std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("QBODY_SEED")) {
    try {
      std::size_t used = 0;
      const std::uint64_t s = std::stoull(env, &used);
      if (used == std::string(env).size()) return s;
    } catch (const std::exception&) {
    }
    throw UsageError("QBODY_SEED is not an unsigned integer");
  }
  return 0;
}

inline Correlation need_point(const Options& o) {
  if (o.point.empty()) throw UsageError("--point is required");
  return Correlation(parse_vec4(o.point));
}

inline Functional need_functional(const Options& o) {
  if (o.functional.empty()) throw UsageError("--functional is required");
  return Functional(parse_vec4(o.functional));
}

inline AngleTuple need_angles(const Options& o) {
  if (o.angles.empty()) throw UsageError("--angles is required");
  const Vec4 v = parse_vec4(o.angles);
  return {v[0], v[1], v[2], v[3]};
}

inline int exactly_one(std::initializer_list<const std::string*> opts, const char* names) {
  int given = 0, which = -1, n = 0;
  for (const std::string* s : opts) {
    if (!s->empty()) {
      ++given;
      which = n;
    }
    ++n;
  }
  if (given != 1) throw UsageError(std::string("give exactly one of ") + names);
  return which;
}

inline json verdict_json(const MembershipVerdict& v, const Tolerance& tol) {
  return {{"oracle", to_string(v.oracle)}, {"inside", v.inside}, {"margin", v.margin}, {"boundary", v.boundary(tol)}};
}

inline void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open output file " + path);
  f << std::setprecision(17);
  return f;
}

inline QuantumModel model_for_point(const Correlation& c, const Tolerance& tol) {
  const CompletionResult comp = solve_completion(c, tol);
  if (!comp.feasible) throw Error(ErrorKind::NotPSD, "point has no PSD completion (outside Q)");
  return clifford_model(gram_vectors(comp.witness, tol));
}

// ---------------------------------------------------------------------------
// Subcommands

inline void cmd_member(const Options& o, std::ostream& out) {
  const Correlation c = need_point(o);
  json verdicts = json::array();
  if (o.oracle == "all") {
    for (const auto& v : member_all(c, o.tol)) verdicts.push_back(verdict_json(v, o.tol));
  } else {
    const auto oracle = parse_oracle(o.oracle);
    if (!oracle) throw UsageError("unknown oracle " + o.oracle);
    verdicts.push_back(verdict_json(member(c, *oracle, o.tol), o.tol));
  }
  bool agree = true;
  for (const auto& v : verdicts) agree = agree && v["inside"] == verdicts[0]["inside"];
  emit(out, {{"point", to_json(c)},
             {"verdicts", verdicts},
             {"agree", agree},
             {"classical", verdict_json(member_classical(c, o.tol), o.tol)},
             {"chsh_max", chsh_max(c)}});
}

inline void cmd_classify(const Options& o, std::ostream& out) {
  const Correlation c = need_point(o);
  const Stratum s = classify(c, o.tol);
  const CompletionResult comp = solve_completion(c, o.tol);
  const PrimalPolys pp = primal_polys(c);
  emit(out, {{"point", to_json(c)},
             {"stratum", to_string(s)},
             {"rank", comp.rank},
             {"unique", comp.unique},
             {"g", pp.g},
             {"h", pp.h}});
}

inline void cmd_support(const Options& o, std::ostream& out) {
  const Functional f = need_functional(o);
  if (f.v.isZero(0)) {
    emit(out, {{"functional", to_json(f)}, {"phi", 0.0}, {"case", "classical"}});
    return;
  }
  const CaseVerdict cv = quantum_case(f);
  json j = {{"functional", to_json(f)},
            {"phi", support(f)},
            {"case", cv.quantum_case ? "quantum" : "classical"},
            {"phi_classical", cv.phi_classical}};
  j["m"] = cv.m_value ? json(*cv.m_value) : json(nullptr);
  emit(out, j);
}

inline void cmd_gauge(const Options& o, std::ostream& out) {
  const Correlation c = need_point(o);
  const double g = gauge(c);
  emit(out, {{"point", to_json(c)}, {"gauge", g}, {"gauge_bisection", gauge_bisection(c)}, {"inside", g <= 1.0 + o.tol.eps_boundary}});
}

inline void cmd_dual(const Options& o, std::ostream& out) {
  const Functional f = need_functional(o);
  const MembershipVerdict v = dual_member(f, o.tol);
  const DualCompletionResult dc = dual_completion(f, o.tol);
  const DualCompletion& w = dc.witness;
  emit(out, {{"functional", to_json(f)},
             {"inside", v.inside},
             {"margin", v.margin},
             {"support", support(f)},
             {"primal_image", to_json(from_dual(f))},
             {"completion",
              {{"feasible", dc.feasible},
               {"p", json::array({w.p1, w.p2, w.p3, w.p4})},
               {"min_eigenvalue", dc.min_eigenvalue},
               {"matrix", to_json(Mat(w.matrix()))}}}});
}

inline json gram_json(const GramSystem& gs) {
  auto vec = [](const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
    return a;
  };
  return {{"dim", gs.dim()}, {"a1", vec(gs.a1)}, {"a2", vec(gs.a2)}, {"b1", vec(gs.b1)}, {"b2", vec(gs.b2)}};
}

inline void cmd_complete(const Options& o, std::ostream& out) {
  const Correlation c = need_point(o);
  const CompletionResult r = solve_completion(c, o.tol);
  json j = {{"point", to_json(c)},
            {"feasible", r.feasible},
            {"unique", r.unique},
            {"rank", r.rank},
            {"u", r.witness.u},
            {"v", r.witness.v},
            {"u_range", to_json(r.u_range)},
            {"v_range", to_json(r.v_range)},
            {"matrix", to_json(Mat(r.witness.matrix()))}};
  j["gram"] = nullptr;
  if (r.feasible) {
    try {
      j["gram"] = gram_json(gram_vectors(r.witness, o.tol));
    } catch (const Error&) {
      // Witness of a point in the boundary band may miss PSD by rounding.
    }
  }
  emit(out, j);
}

inline void cmd_angles(const Options& o, std::ostream& out) {
  AngleTuple t;
  if (exactly_one({&o.point, &o.angles}, "--point, --angles") == 0) {
    t = angles_from_point(need_point(o), o.tol);
  } else {
    t = need_angles(o);
    check_angle_sum(t, o.tol);
    t = t.canonical();
  }
  const ExtremePoint e = extreme_from_angles(t, o.tol);
  emit(out, {{"angles", to_json(t)}, {"point", to_json(e.c)}, {"stratum", to_string(e.stratum)}, {"Delta", t.Delta()}});
}

inline void cmd_expose(const Options& o, std::ostream& out) {
  const AngleTuple t = need_angles(o);
  const Functional f = exposing_functional(t, o.tol);
  json j = {{"angles", to_json(t)}, {"point", to_json(t.point())}, {"functional", to_json(f)}};
  j["phi"] = in_tetrahedron(t, o.tol.eps_angle) ? to_json(phi_map(t, o.tol)) : json(nullptr);
  emit(out, j);
}

inline void cmd_model(const Options& o, std::ostream& out) {
  const QuantumModel m = exactly_one({&o.angles, &o.point}, "--angles, --point") == 0
                             ? build_model(need_angles(o), o.tol)
                             : model_for_point(need_point(o), o.tol);
  json j = to_json(m);
  j["correlations"] = to_json(correlations_of(m));
  emit(out, j);
}

inline QuantumModel read_model(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg.front() != '{') {
    std::ifstream f(arg);
    if (!f) throw UsageError("cannot read model file " + arg);
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  return model_from_json(parse_json_text(text));
}

inline void cmd_selftest(const Options& o, std::ostream& out) {
  const int which = exactly_one({&o.angles, &o.point, &o.model}, "--angles, --point, --model");
  const QuantumModel m = which == 0   ? build_model(need_angles(o), o.tol)
                         : which == 1 ? model_for_point(need_point(o), o.tol)
                                      : read_model(o.model);
  const SelfTestReport r = selftest_residuals(m);
  emit(out, {{"d", m.d()},
             {"correlations", to_json(correlations_of(m))},
             {"gamma", to_json(Mat(r.gamma))},
             {"u", r.u_value},
             {"cyclic_dim", r.cyclic_dim},
             {"residual_bpsi", r.residual_bpsi},
             {"residual_squares", r.residual_squares},
             {"residual_anticommutator", r.residual_anticommutator},
             {"residual_tracial", r.residual_tracial}});
}

inline void cmd_volume(const Options& o, std::ostream& out) {
  static const std::map<std::string, std::pair<Body, double>> bodies{
      {"q", {Body::Q, exact_volume_ratio()}},
      {"cl", {Body::CL, 2.0 / 3.0}},
      {"elliptope", {Body::Elliptope3, kPi * kPi / 16.0}}};
  const auto it = bodies.find(o.body);
  if (it == bodies.end()) throw UsageError("unknown body " + o.body);
  const SamplerConfig cfg{resolve_seed(o), o.samples ? o.samples : 1000000, o.workers};
  const VolumeEstimate v = mc_volume(it->second.first, cfg);
  emit(out, {{"body", o.body},
             {"samples", cfg.samples},
             {"seed", cfg.seed},
             {"fraction", v.fraction},
             {"stderr", v.stderr_},
             {"exact", it->second.second}});
}

inline void cmd_sample(const Options& o, std::ostream& out) {
  std::optional<SampleTarget> target;
  for (SampleTarget t : {SampleTarget::Cube, SampleTarget::CL, SampleTarget::QInterior, SampleTarget::Q1,
                         SampleTarget::Q2, SampleTarget::Q3, SampleTarget::Q4, SampleTarget::Q5}) {
    if (o.target == to_string(t)) target = t;
  }
  if (!target) throw UsageError("unknown target " + o.target);
  const SamplerConfig cfg{resolve_seed(o), o.samples ? o.samples : 1000, o.workers};
  const auto pts = sample(*target, cfg, o.tol);
  if (!o.out.empty()) {
    std::ofstream f = open_out(o.out);
    f << "c11,c12,c21,c22\n";
    for (const auto& c : pts) f << c[0] << ',' << c[1] << ',' << c[2] << ',' << c[3] << '\n';
    emit(out, {{"target", o.target}, {"samples", pts.size()}, {"seed", cfg.seed}, {"out", o.out}});
    return;
  }
  json arr = json::array();
  for (const auto& c : pts) arr.push_back(to_json(c));
  emit(out, {{"target", o.target}, {"seed", cfg.seed}, {"points", arr}});
}

inline void cmd_slice(const Options& o, std::ostream& out) {
  SliceSpec spec;
  spec.resolution = o.grid;
  spec.lo = o.lo;
  spec.hi = o.hi;
  for (const std::string& f : o.fix) {
    const auto eq = f.find('=');
    const auto& names = coordinate_names();
    const auto it = std::find(names.begin(), names.end(), f.substr(0, eq));
    if (eq == std::string::npos || it == names.end()) throw UsageError("--fix expects cij=VALUE, got " + f);
    const int k = static_cast<int>(it - names.begin());
    if (spec.fixed[k]) throw UsageError("coordinate fixed twice: " + f);
    try {
      spec.fixed[k] = std::stod(f.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--fix value is not a number: " + f);
    }
  }
  if (!o.normal.empty()) {
    spec.normal = parse_vec4(o.normal);
    spec.offset = o.offset;
  }
  const SliceTable table = slice_grid(spec, o.tol);
  if (o.out.empty()) {
    write_csv(out, table);
    return;
  }
  std::ofstream f = open_out(o.out);
  write_csv(f, table);
  emit(out, {{"rows", table.rows.size()}, {"axes", table.axes}, {"out", o.out}});
}

inline void cmd_orbit(const Options& o, std::ostream& out) {
  const Correlation c = need_point(o);
  json arr = json::array();
  for (const auto& x : orbit(c, o.tol.eps_angle)) arr.push_back(to_json(x));
  emit(out, {{"point", to_json(c)}, {"size", arr.size()}, {"orbit", arr}});
}

inline void cmd_ncycle(const Options& o, std::ostream& out) {
  Correlation c;
  Functional f;
  if (!o.angles.empty()) {
    if (!o.point.empty() || !o.functional.empty()) throw UsageError("give --angles or --point with --functional");
    const AngleTuple t = need_angles(o);
    f = exposing_functional(t, o.tol);
    c = t.point();
  } else {
    c = need_point(o);
    f = need_functional(o);
  }
  const auto r = ncycle_residuals(c, f);
  double worst = 0;
  for (double x : r) worst = std::max(worst, std::abs(x));
  emit(out, {{"point", to_json(c)}, {"functional", to_json(f)}, {"residuals", r}, {"max_abs", worst}});
}

}  // namespace detail

inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Computations with the quantum correlation body Q of the CHSH scenario.\n"
               "Points and functionals are JSON arrays [x11,x12,x21,x22]; angles are [alpha,beta,gamma,delta] "
               "in radians.",
               "qbody"};
  app.require_subcommand(1, 1);
  Options o;

  using Handler = void (*)(const Options&, std::ostream&);
  std::vector<std::pair<CLI::App*, Handler>> handlers;
  auto add = [&](const char* name, const char* desc, Handler h) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--eps-boundary", o.tol.eps_boundary, "boundary band")->check(CLI::PositiveNumber);
    sub->add_option("--eps-angle", o.tol.eps_angle, "angle tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--eps-psd", o.tol.eps_psd, "eigenvalue threshold")->check(CLI::PositiveNumber);
    handlers.emplace_back(sub, h);
    return sub;
  };
  auto point = [&](CLI::App* s) { s->add_option("--point", o.point, "correlation [c11,c12,c21,c22]"); };
  auto functional = [&](CLI::App* s) { s->add_option("--functional", o.functional, "functional [f11,f12,f21,f22]"); };
  auto angles = [&](CLI::App* s) { s->add_option("--angles", o.angles, "angles [alpha,beta,gamma,delta]"); };
  auto sampling = [&](CLI::App* s) {
    s->add_option("--samples", o.samples, "number of samples")->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed, "RNG seed (default: $QBODY_SEED, else 0)");
    s->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* member = add("member", "membership verdicts with signed margins", detail::cmd_member);
  point(member);
  member->add_option("--oracle", o.oracle, "all|classical|semialg|pushout|completion|timo|landau")
      ->check(CLI::IsMember({"all", "classical", "semialg", "pushout", "completion", "timo", "landau"}));
  point(add("classify", "boundary stratum Q1..Q6 or EXTERIOR", detail::cmd_classify));
  functional(add("support", "support function of Q", detail::cmd_support));
  point(add("gauge", "gauge function of Q", detail::cmd_gauge));
  functional(add("dual", "membership in the polar body and dual completion", detail::cmd_dual));
  point(add("complete", "PSD completion and Gram vectors", detail::cmd_complete));
  auto* ang = add("angles", "angle parametrization of extreme points", detail::cmd_angles);
  point(ang);
  angles(ang);
  angles(add("expose", "exposing functional and the tetrahedron map", detail::cmd_expose));
  auto* model = add("model", "explicit quantum model", detail::cmd_model);
  angles(model);
  point(model);
  auto* selftest = add("selftest", "self-testing residuals of a model", detail::cmd_selftest);
  angles(selftest);
  point(selftest);
  selftest->add_option("--model", o.model, "model JSON (inline or file)");
  auto* volume = add("volume", "Monte Carlo volume fraction", detail::cmd_volume);
  volume->add_option("--body", o.body, "q|cl|elliptope")->check(CLI::IsMember({"q", "cl", "elliptope"}));
  sampling(volume);
  auto* smp = add("sample", "random points of Q, C or a stratum", detail::cmd_sample);
  smp->add_option("--target", o.target, "cube|cl|q_interior|q1|q2|q3|q4|q5");
  sampling(smp);
  smp->add_option("--out", o.out, "write CSV to FILE");
  auto* slice = add("slice", "labelled grid on a section (CSV)", detail::cmd_slice);
  slice->add_option("--fix", o.fix, "fixed coordinate cij=VALUE (repeatable)");
  slice->add_option("--normal", o.normal, "hyperplane normal [n11,n12,n21,n22]");
  slice->add_option("--offset", o.offset, "hyperplane offset");
  slice->add_option("--grid", o.grid, "nodes per free axis");
  slice->add_option("--lo", o.lo, "lower bound per free axis");
  slice->add_option("--hi", o.hi, "upper bound per free axis");
  slice->add_option("--out", o.out, "write CSV to FILE");
  point(add("orbit", "orbit under the 192 symmetries", detail::cmd_orbit));
  auto* ncycle = add("ncycle", "ideal residuals at an incident pair", detail::cmd_ncycle);
  point(ncycle);
  functional(ncycle);
  angles(ncycle);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (!o.tol.valid()) throw UsageError("tolerances must be positive with eps-psd <= eps-boundary");
    for (const auto& [sub, handler] : handlers) {
      if (sub->parsed()) handler(o, out);
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    detail::emit(out, {{"error", {{"kind", to_string(e.kind())}, {"detail", e.detail()}}}});
    return 1;
  } catch (const std::invalid_argument& e) {
    detail::emit(out, {{"error", {{"kind", "InvalidArgument"}, {"detail", e.what()}}}});
    return 1;
  }
}

}  // namespace qbody::cli

#endif  // QBODY_CLI_HPP
