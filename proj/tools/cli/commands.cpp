#include "commands.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "invaria/csv.hpp"

namespace invaria::cli {

using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string eig_text(const analysis::EigenPair& e) {
  if (e[0].imag() != 0.0) {
    return fmt("%.3f", e[0].real()) + "±" + fmt("%.3f", std::abs(e[0].imag())) + "i";
  }
  return fmt("%.3f", e[0].real()) + ", " + fmt("%.3f", e[1].real());
}

json eq_json(const analysis::Equilibrium& e) {
  json eigs = json::array();
  for (const auto& l : e.eigenvalues) eigs.push_back({{"re", l.real()}, {"im", l.imag()}});
  return {{"point", {e.point[0], e.point[1]}},
          {"eigenvalues", eigs},
          {"classification", analysis::to_string(e.classification)},
          {"tau", e.tau},
          {"delta", e.delta},
          {"discriminant_case", e.discriminant_case}};
}

json params_json(const ExtendedParams& p) {
  return {{"b", p.b()}, {"c", p.c()}, {"s", p.s()}, {"l", p.l()}};
}

void print_table(std::ostream& log, const std::string& title, const analysis::StabilityReport& rep) {
  const ExtendedParams& p = rep.params;
  log << title << "  b=" << p.b() << " c=" << p.c() << " s=" << p.s() << " l=" << p.l()
      << "  r=" << rep.r << " d=" << rep.d << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "  %-3s %12s %12s %10s %10s  %-24s %s\n", "", "y", "z", "tau",
                "delta", "eigenvalues", "class");
  log << line;
  for (const auto* e : {&rep.e1, &rep.e2}) {
    std::string eig = eig_text(e->eigenvalues);
    // "±" is two bytes but one column.
    const std::size_t cols = eig.size() - (eig.find("±") != std::string::npos ? 1 : 0);
    if (cols < 24) eig.append(24 - cols, ' ');
    std::snprintf(line, sizeof line, "  %-3s %12.6f %12.6f %10.5f %10.5f  %s %s\n",
                  e->kind == analysis::EquilibriumKind::E1 ? "E1" : "E2", e->point[0], e->point[1],
                  e->tau, e->delta, eig.c_str(),
                  std::string(analysis::to_string(e->classification)).c_str());
    log << line;
  }
}

analysis::StabilityReport report_at_start(const Config& cfg, const ExtendedParams& p) {
  const InputSample in = cfg.drive.at(0.0);
  return analysis::equilibria(p, in.r, in.d);
}

std::vector<PhaseVariant> variants_of(const Config& cfg) {
  if (!cfg.phase->variants.empty()) return cfg.phase->variants;
  return {{"baseline", cfg.extended_params()}};
}

template <class F>
std::string render(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

std::string suffix_for(const std::string& param, std::map<std::string, int>& seen) {
  const int n = seen[param]++;
  return n == 0 ? param : param + "_" + std::to_string(n + 1);
}

}  // namespace

json to_json(const analysis::StabilityReport& rep) {
  return {{"params", params_json(rep.params)},
          {"r", rep.r},
          {"d", rep.d},
          {"e1", eq_json(rep.e1)},
          {"e2", eq_json(rep.e2)}};
}

json to_json(const invariance::InvarianceVerdict& v) {
  return {{"param", v.param},
          {"from", v.from},
          {"to", v.to},
          {"max_condition_residual",
           v.max_condition_residual ? json(*v.max_condition_residual) : json(nullptr)},
          {"max_output_residual", v.max_output_residual},
          {"decision", invariance::to_string(v.decision)},
          {"thresholds",
           {{"invariant", v.thresholds.invariant}, {"not_invariant", v.thresholds.not_invariant}}},
          {"seed", v.seed}};
}

void cmd_equilibria(const Config& cfg, OutputDir& out, std::ostream& log) {
  const auto rep = report_at_start(cfg, cfg.extended_params());
  print_table(log, "equilibria", rep);
  out.write_json("equilibria.json", to_json(rep));
}

void cmd_simulate(const Config& cfg, OutputDir& out, std::ostream& log) {
  const SystemModel model = cfg.system();
  const State x0 = cfg.start_state();
  const Trajectory traj = integrate(model, x0, cfg.drive, cfg.integrator, cfg.seed);
  out.write("trajectory.csv", render([&](std::ostream& os) { write_csv(os, traj); }));
  log << "simulated " << model.name() << " to t=" << traj.times.back() << " (" << traj.size()
      << " rows)\n";
  if (traj.first_negative_time) {
    log << "warning: state left the non-negative orthant at t=" << *traj.first_negative_time << "\n";
  }
}

void cmd_phase(const Config& cfg, OutputDir& out, std::ostream& log) {
  const PhaseExperiment& ph = *cfg.phase;
  const InputSample in = cfg.drive.at(0.0);
  for (const PhaseVariant& v : variants_of(cfg)) {
    const auto rep = analysis::equilibria(v.params, in.r, in.d);
    const auto field = analysis::vector_field(v.params, in.r, in.d, ph.grid);
    const auto basin = analysis::basin_sample(v.params, in.r, in.d, ph.grid, ph.basin);
    out.write("field_" + v.name + ".csv",
              render([&](std::ostream& os) { analysis::write_field_csv(os, field); }));
    out.write("basin_" + v.name + ".csv",
              render([&](std::ostream& os) { analysis::write_basin_csv(os, basin); }));
    out.write_json("equilibria_" + v.name + ".json", to_json(rep));
    if (ph.svg) {
      std::vector<analysis::PortraitTrace> traces;
      IntegratorOptions o;
      o.h = ph.basin.h;
      o.t_end = ph.trace_t_end;
      o.decimate = 5;
      o.divergence_limit = 1e6;
      const SystemModel m = make_extended2(v.params);
      for (const Vec2& start : ph.traces) {
        analysis::PortraitTrace tr;
        try {
          const Trajectory t = integrate(m, start, Drive::constant(in), o);
          for (const State& s : t.states) tr.points.push_back({s[0], s[1]});
        } catch (const NumericError&) {
          log << "note: trace from (" << start[0] << ", " << start[1] << ") diverged, omitted\n";
          continue;
        }
        traces.push_back(std::move(tr));
      }
      out.write("phase_" + v.name + ".svg", render([&](std::ostream& os) {
                  analysis::write_phase_svg(os, ph.grid, field, traces, rep, v.name);
                }));
    }
    std::size_t conv = 0, div = 0;
    for (const auto& b : basin) {
      conv += b.label == analysis::BasinLabel::ConvergedE2;
      div += b.label == analysis::BasinLabel::Diverged;
    }
    log << "phase " << v.name << ": E2=(" << fmt("%.3f", rep.e2.point[0]) << ", "
        << fmt("%.3f", rep.e2.point[1]) << ") basin " << conv << " converged, " << div
        << " diverged, " << basin.size() - conv - div << " undecided\n";
  }
}

std::vector<invariance::InvarianceVerdict> cmd_invariance(const Config& cfg, OutputDir& out,
                                                          std::ostream& log) {
  const InvarianceExperiment& inv = *cfg.invariance;
  const ExtendedParams& base = cfg.extended_params();

  json conditions = json::array();
  std::map<std::string, double> cond_max;
  for (const auto& c : inv.candidates) {
    const auto pts = invariance::grid_points(c, base, inv.grid);
    const auto res = invariance::check_equivariance(base, c, pts);
    conditions.push_back({{"param", c.param_name},
                          {"from", c.param_from},
                          {"to", c.param_to},
                          {"alpha", expr::to_string(c.alpha)},
                          {"coords", invariance::to_string(c.coords)},
                          {"points", res.points.size()},
                          {"max", {res.max[0], res.max[1]}},
                          {"mean", {res.mean[0], res.mean[1]}}});
    auto [it, fresh] = cond_max.emplace(c.param_name, res.overall_max());
    if (!fresh) it->second = std::max(it->second, res.overall_max());
  }
  out.write_json("conditions.json", conditions);

  std::vector<invariance::InvarianceVerdict> verdicts;
  std::map<std::string, int> seen;
  for (const auto& t : inv.tests) {
    auto r = invariance::dc_output_test(base, t.param, t.from, t.to, cfg.drive, inv.transient,
                                        cfg.integrator, inv.thresholds, cfg.seed);
    if (auto it = cond_max.find(t.param); it != cond_max.end()) {
      r.verdict.max_condition_residual = it->second;
    }
    const std::string tag = suffix_for(t.param, seen);
    out.write_json("verdict_" + tag + ".json", to_json(r.verdict));
    out.write("residual_" + tag + ".csv",
              render([&](std::ostream& os) { invariance::write_residual_csv(os, r.series); }));
    log << "invariance " << t.param << ": " << t.from << " -> " << t.to << "  max|dy|="
        << fmt("%.3e", r.verdict.max_output_residual) << "  "
        << invariance::to_string(r.verdict.decision) << "\n";
    verdicts.push_back(r.verdict);
  }
  return verdicts;
}

void cmd_dc_check(const Config& cfg, OutputDir& out, std::ostream& log) {
  const ExtendedParams& base = cfg.extended_params();
  json checks = json::array();
  for (const DcCheck& c : cfg.dc_checks) {
    const auto r = invariance::dc_coordinate_check(base, c.param, c.value, c.reference, cfg.drive,
                                                   cfg.integrator);
    checks.push_back({{"param", r.param},
                      {"value", r.value},
                      {"reference", r.reference},
                      {"x0", {r.x0[0], r.x0[1]}},
                      {"v0", {r.v0[0], r.v0[1]}},
                      {"max_discrepancy", r.max_discrepancy}});
    log << "dc-check " << c.param << ": " << c.value << " vs " << c.reference
        << "  max discrepancy=" << fmt("%.3e", r.max_discrepancy) << "\n";
  }
  out.write_json("dc_check.json", {{"checks", checks}, {"seed", cfg.seed}});
}

std::vector<PaperValue> paper_comparisons(const ExtendedParams& base) {
  std::vector<PaperValue> out;
  auto eq = [&](const std::string& tag, const ExtendedParams& p) {
    return std::pair{tag, analysis::equilibria(p, base.r0(), base.d0())};
  };
  const auto [bn, b] = eq("baseline", base);
  const auto [sn, s] = eq("s1.5", base.with("s", 1.5));
  const auto [bbn, bb] = eq("b0.6", base.with("b", 0.6));
  const auto [cn, c] = eq("c4", base.with("c", 4.0));
  auto add = [&](const std::string& name, double expected, double computed) {
    out.push_back({name, expected, computed});
  };
  auto add_e2_eigs = [&](const std::string& tag, const analysis::StabilityReport& r, double re,
                         double im) {
    add(tag + ".lambda_E2.re", re, r.e2.eigenvalues[0].real());
    add(tag + ".lambda_E2.im", im, std::abs(r.e2.eigenvalues[0].imag()));
  };
  add(bn + ".E1.y", -0.033, b.e1.point[0]);
  add(bn + ".E1.z", 0.0, b.e1.point[1]);
  add(bn + ".E2.y", 11.000, b.e2.point[0]);
  add(bn + ".E2.z", 4.012, b.e2.point[1]);
  add(bn + ".lambda_E1[0]", 0.300, b.e1.eigenvalues[0].real());
  add(bn + ".lambda_E1[1]", -22.067, b.e1.eigenvalues[1].real());
  add_e2_eigs(bn, b, -0.351, 2.549);
  add(sn + ".E2.y", 11.000, s.e2.point[0]);
  add(sn + ".E2.z", 0.669, s.e2.point[1]);
  add_e2_eigs(sn, s, -0.351, 2.549);
  add(bbn + ".E1.y", -0.017, bb.e1.point[0]);
  add(bbn + ".E2.y", 11.000, bb.e2.point[0]);
  add(bbn + ".E2.z", 8.012, bb.e2.point[1]);
  add(bbn + ".lambda_E1[0]", 0.6, bb.e1.eigenvalues[0].real());
  add(bbn + ".lambda_E1[1]", -22.033, bb.e1.eigenvalues[1].real());
  add_e2_eigs(bbn, bb, -0.701, 3.568);
  add(cn + ".lambda_E1[0]", 0.300, c.e1.eigenvalues[0].real());
  add(cn + ".lambda_E1[1]", -44.133, c.e1.eigenvalues[1].real());
  add_e2_eigs(cn, c, -0.351, 3.622);
  return out;
}

void cmd_reproduce_paper(const Config& cfg, OutputDir& out, std::ostream& log) {
  for (const PhaseVariant& v : variants_of(cfg)) {
    print_table(log, v.name, report_at_start(cfg, v.params));
  }
  cmd_simulate(cfg, out, log);
  cmd_phase(cfg, out, log);
  const auto decisions = cmd_invariance(cfg, out, log);
  cmd_dc_check(cfg, out, log);

  json comparisons = json::array();
  bool all_pass = true;
  for (const PaperValue& v : paper_comparisons(cfg.extended_params())) {
    const double err = std::abs(v.computed - v.expected);
    const bool pass = err <= kPaperTolerance;
    all_pass &= pass;
    comparisons.push_back({{"name", v.name},
                           {"expected", v.expected},
                           {"computed", v.computed},
                           {"abs_error", err},
                           {"pass", pass}});
  }
  json verdicts = json::array();
  for (const auto& v : decisions) {
    verdicts.push_back({{"param", v.param},
                        {"from", v.from},
                        {"to", v.to},
                        {"decision", invariance::to_string(v.decision)}});
  }
  out.write_json("summary.json", {{"tolerance", kPaperTolerance},
                                  {"comparisons", comparisons},
                                  {"verdicts", verdicts},
                                  {"all_pass", all_pass},
                                  {"seed", cfg.seed}});
  log << "paper comparisons: " << (all_pass ? "all pass" : "FAILURES") << " (tolerance "
      << kPaperTolerance << ")\n";
}

std::optional<std::uint64_t> resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return flag;
  const char* env = std::getenv("INVARIA_SEED");
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') {
    throw ConfigError(std::string("INVARIA_SEED must be a non-negative integer (got '") + env + "')");
  }
  return v;
}

}  // namespace invaria::cli
