#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace invaria::cli {

using nlohmann::json;

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Original3: return "original3";
    case ModelKind::Simplified2: return "simplified2";
    case ModelKind::Substituted2: return "substituted2";
    case ModelKind::Extended2: return "extended2";
    case ModelKind::Custom: return "custom";
  }
  return "unknown";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

// Object view that rejects keys nobody asked for.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "must be an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    const std::set<std::string_view> ok(keys);
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) fail(path_, "unknown key '" + k + "'");
    }
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  const json& at(const std::string& k) const { return j_.at(k); }
  std::string sub(const std::string& k) const { return path_ + "." + k; }
  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }

  double number(const std::string& k, std::optional<double> dflt = std::nullopt) const {
    if (!has(k)) {
      if (!dflt) fail(sub(k), "is required");
      return *dflt;
    }
    return as_number(at(k), sub(k));
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  std::string string(const std::string& k, std::optional<std::string> dflt = std::nullopt) const {
    if (!has(k)) {
      if (!dflt) fail(sub(k), "is required");
      return *dflt;
    }
    if (!at(k).is_string()) fail(sub(k), "must be a string");
    return at(k).get<std::string>();
  }

  bool boolean(const std::string& k, bool dflt) const {
    if (!has(k)) return dflt;
    if (!at(k).is_boolean()) fail(sub(k), "must be true or false");
    return at(k).get<bool>();
  }

  std::size_t count(const std::string& k, std::size_t dflt, std::size_t min = 0) const {
    if (!has(k)) return dflt;
    const json& v = at(k);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min)) {
      fail(sub(k), "must be an integer >= " + std::to_string(min));
    }
    return v.get<std::size_t>();
  }

 private:
  const json& j_;
  std::string path_;
};

double positive(double v, const std::string& path) {
  if (!(v > 0.0)) fail(path, "must be > 0");
  return v;
}

ModelKind parse_model(const std::string& name, const std::string& path) {
  if (name == "original3") return ModelKind::Original3;
  if (name == "simplified2") return ModelKind::Simplified2;
  if (name == "substituted2") return ModelKind::Substituted2;
  if (name == "extended2") return ModelKind::Extended2;
  if (name == "custom") return ModelKind::Custom;
  fail(path, "unknown model '" + name +
                 "' (expected original3, simplified2, substituted2, extended2 or custom)");
}

ExtendedParams extended_from(const Obj& o, const ExtendedParams& base) {
  o.allow({"b", "c", "s", "l", "r0", "d0"});
  try {
    return ExtendedParams(o.number("b", base.b()), o.number("c", base.c()), o.number("s", base.s()),
                          o.number("l", base.l()), o.number("r0", base.r0()),
                          o.number("d0", base.d0()));
  } catch (const InvalidArgument& e) {
    fail(o.path(), e.what());
  }
}

Schedule parse_schedule(const json& j, const std::string& path, std::string_view which,
                        std::uint64_t seed, std::uint64_t stream) {
  if (j.is_number()) return Schedule::constant(Obj::as_number(j, path));
  if (j.is_string()) {
    if (j.get<std::string>() != "paper") fail(path, "must be a number, \"paper\" or an object");
    if (which == "r") return paper_schedule_r(seed);
    if (which == "d") return paper_schedule_d(seed);
    fail(path, "no built-in schedule for input '" + std::string(which) + "'");
  }
  const Obj o(j, path);
  o.allow({"segments", "sample_dt"});
  if (!o.has("segments") || !o.at("segments").is_array()) fail(o.sub("segments"), "must be an array");
  std::vector<Segment> segs;
  std::size_t i = 0;
  for (const json& s : o.at("segments")) {
    const Obj so(s, o.sub("segments") + "[" + std::to_string(i++) + "]");
    so.allow({"t_start", "t_end", "base", "noise_std"});
    segs.push_back({so.number("t_start"), so.number("t_end"), so.number("base"),
                    so.number("noise_std", 0.0)});
  }
  try {
    return Schedule(std::move(segs), seed, o.number("sample_dt", Schedule::kDefaultSampleDt), stream);
  } catch (const InvalidArgument& e) {
    fail(path, e.what());
  }
}

analysis::GridAxis parse_axis(const json& j, const std::string& path) {
  const Obj o(j, path);
  o.allow({"lo", "hi", "count"});
  analysis::GridAxis a{o.number("lo"), o.number("hi"), o.count("count", 21, 1)};
  if (a.hi < a.lo) fail(path, "hi must be >= lo");
  return a;
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "must be a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(Obj::as_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void check_param_name(const std::string& p, const std::string& path) {
  if (p != "b" && p != "c" && p != "s" && p != "l") fail(path, "parameter must be one of b, c, s, l");
}

PhaseExperiment parse_phase(const Obj& o, const ExtendedParams& base) {
  o.allow({"grid", "t_max", "h", "converge_distance", "threads", "svg", "traces", "trace_t_end",
           "variants"});
  PhaseExperiment ph;
  if (o.has("grid")) {
    const Obj g(o.at("grid"), o.sub("grid"));
    g.allow({"y", "z"});
    if (g.has("y")) ph.grid.y = parse_axis(g.at("y"), g.sub("y"));
    if (g.has("z")) ph.grid.z = parse_axis(g.at("z"), g.sub("z"));
  }
  ph.basin.t_max = positive(o.number("t_max", ph.basin.t_max), o.sub("t_max"));
  ph.basin.h = positive(o.number("h", ph.basin.h), o.sub("h"));
  ph.basin.converge_distance =
      positive(o.number("converge_distance", ph.basin.converge_distance), o.sub("converge_distance"));
  ph.basin.threads = static_cast<unsigned>(o.count("threads", 0));
  ph.svg = o.boolean("svg", true);
  ph.trace_t_end = positive(o.number("trace_t_end", ph.trace_t_end), o.sub("trace_t_end"));
  if (o.has("traces")) {
    const json& t = o.at("traces");
    if (!t.is_array()) fail(o.sub("traces"), "must be an array of [y, z] pairs");
    ph.traces.clear();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string p = o.sub("traces") + "[" + std::to_string(i) + "]";
      const auto v = number_list(t[i], p);
      if (v.size() != 2) fail(p, "must be a [y, z] pair");
      ph.traces.push_back({v[0], v[1]});
    }
  }
  if (o.has("variants")) {
    const json& vs = o.at("variants");
    if (!vs.is_array()) fail(o.sub("variants"), "must be an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Obj v(vs[i], o.sub("variants") + "[" + std::to_string(i) + "]");
      v.allow({"name", "params"});
      const std::string name = v.string("name");
      if (name.empty() || name.find_first_of("/\\ ") != std::string::npos) {
        fail(v.sub("name"), "must be a non-empty file-name-safe string");
      }
      if (!names.insert(name).second) fail(v.sub("name"), "duplicate variant '" + name + "'");
      const ExtendedParams p =
          v.has("params") ? extended_from(Obj(v.at("params"), v.sub("params")), base) : base;
      ph.variants.push_back({name, p});
    }
  }
  return ph;
}

InvarianceExperiment parse_invariance(const Obj& o) {
  o.allow({"transient", "thresholds", "tests", "candidates", "grid"});
  InvarianceExperiment inv;
  inv.transient = o.number("transient", inv.transient);
  if (inv.transient < 0.0) fail(o.sub("transient"), "must be >= 0");
  if (o.has("thresholds")) {
    const Obj t(o.at("thresholds"), o.sub("thresholds"));
    t.allow({"invariant", "not_invariant"});
    inv.thresholds.invariant = positive(t.number("invariant", inv.thresholds.invariant), t.sub("invariant"));
    inv.thresholds.not_invariant = t.number("not_invariant", inv.thresholds.not_invariant);
    if (inv.thresholds.not_invariant < inv.thresholds.invariant) {
      fail(t.path(), "not_invariant must be >= invariant");
    }
  }
  if (o.has("tests")) {
    const json& ts = o.at("tests");
    if (!ts.is_array()) fail(o.sub("tests"), "must be an array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const Obj t(ts[i], o.sub("tests") + "[" + std::to_string(i) + "]");
      t.allow({"param", "from", "to"});
      InvarianceTest it{t.string("param"), t.number("from"), t.number("to")};
      check_param_name(it.param, t.sub("param"));
      inv.tests.push_back(it);
    }
  } else {
    inv.tests = {{"s", 0.25, 1.5}, {"b", 0.3, 0.6}, {"c", 2.0, 4.0}};
  }
  if (o.has("candidates") && !(o.at("candidates").is_string() && o.at("candidates") == "builtin")) {
    const json& cs = o.at("candidates");
    if (!cs.is_array()) fail(o.sub("candidates"), "must be \"builtin\" or an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const Obj c(cs[i], o.sub("candidates") + "[" + std::to_string(i) + "]");
      c.allow({"param", "from", "to", "alpha", "beta", "coords", "singular"});
      const std::string coords = c.string("coords", "y-output");
      if (coords != "y-output" && coords != "z-output") {
        fail(c.sub("coords"), "must be \"y-output\" or \"z-output\"");
      }
      std::optional<std::string> singular, beta;
      if (c.has("singular")) singular = c.string("singular");
      if (c.has("beta")) beta = c.string("beta");
      try {
        inv.candidates.push_back(invariance::make_equivariance(
            c.string("param"), c.number("from"), c.number("to"), c.string("alpha"),
            coords == "y-output" ? invariance::Coordinates::YOutput
                                 : invariance::Coordinates::ZOutput,
            singular ? std::optional<std::string_view>(*singular) : std::nullopt,
            beta ? std::optional<std::string_view>(*beta) : std::nullopt));
      } catch (const Error& e) {
        fail(c.path(), e.what());
      }
    }
  } else {
    inv.candidates = invariance::builtin_candidates();
  }
  if (o.has("grid")) {
    const Obj g(o.at("grid"), o.sub("grid"));
    g.allow({"x1", "x2", "r", "d"});
    if (g.has("x1")) inv.grid.x1 = number_list(g.at("x1"), g.sub("x1"));
    if (g.has("x2")) inv.grid.x2 = number_list(g.at("x2"), g.sub("x2"));
    if (g.has("r")) inv.grid.r = number_list(g.at("r"), g.sub("r"));
    if (g.has("d")) inv.grid.d = number_list(g.at("d"), g.sub("d"));
    for (double r : inv.grid.r) positive(r, g.sub("r"));
  }
  return inv;
}

std::vector<DcCheck> parse_dc(const Obj& o) {
  o.allow({"checks"});
  if (!o.has("checks")) return {{"s", 0.25, 1.0}, {"b", 0.3, 1.0}, {"c", 2.0, 1.0}};
  const json& cs = o.at("checks");
  if (!cs.is_array()) fail(o.sub("checks"), "must be an array");
  std::vector<DcCheck> out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Obj c(cs[i], o.sub("checks") + "[" + std::to_string(i) + "]");
    c.allow({"param", "value", "reference"});
    DcCheck dc{c.string("param"), c.number("value"), c.number("reference", 1.0)};
    if (dc.param != "s" && dc.param != "b" && dc.param != "c") {
      fail(c.sub("param"), "must be one of s, b, c");
    }
    if (dc.value == 0.0 || dc.reference == 0.0) fail(c.path(), "value and reference must be non-zero");
    out.push_back(dc);
  }
  return out;
}

}  // namespace

Config parse_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  const Obj root(doc, "config");
  root.allow({"model", "params", "inputs", "integrator", "initial_state", "seed", "output_dir",
              "custom", "experiment"});
  Config cfg;
  cfg.raw = doc;
  cfg.model = parse_model(root.string("model", "extended2"), root.sub("model"));

  if (root.has("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail(root.sub("seed"), "must be a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (seed_override) cfg.seed = *seed_override;
  cfg.raw["seed"] = cfg.seed;

  cfg.output_dir = root.string("output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) fail(root.sub("output_dir"), "must not be empty");

  // Parameters.
  const json empty = json::object();
  const Obj params(root.has("params") ? root.at("params") : empty, root.sub("params"));
  auto require_positive = [&](std::initializer_list<std::string_view> names) {
    for (std::string_view n : names) {
      const std::string key(n);
      cfg.params[key] = positive(params.number(key), params.sub(key));
    }
  };
  switch (cfg.model) {
    case ModelKind::Extended2:
      cfg.extended = extended_from(params, ExtendedParams::paper());
      cfg.params = cfg.extended->bindings();
      cfg.params["r0"] = cfg.extended->r0();
      cfg.params["d0"] = cfg.extended->d0();
      break;
    case ModelKind::Original3:
      params.allow({"u0", "s", "p", "y0"});
      require_positive({"u0", "s", "p", "y0"});
      break;
    case ModelKind::Simplified2:
    case ModelKind::Substituted2:
      params.allow({"u0", "s", "y0"});
      require_positive({"u0", "s", "y0"});
      break;
    case ModelKind::Custom: {
      static const std::set<std::string> reserved{"t", "r", "d", "u"};
      for (const auto& [k, v] : params.raw().items()) {
        const bool state_name = k.size() > 1 && k[0] == 'x' &&
                                k.find_first_not_of("0123456789", 1) == std::string::npos;
        if (!expr::is_identifier(k) || reserved.count(k) || state_name) {
          fail(params.sub(k), "is not a usable parameter name");
        }
        cfg.params[k] = Obj::as_number(v, params.sub(k));
      }
      break;
    }
  }

  if (cfg.model == ModelKind::Custom) {
    if (!root.has("custom")) fail(root.sub("custom"), "is required for model 'custom'");
    const Obj c(root.at("custom"), root.sub("custom"));
    c.allow({"dim", "rhs", "output_index"});
    cfg.custom_dim = c.count("dim", 0, 1);
    if (cfg.custom_dim == 0) fail(c.sub("dim"), "is required");
    if (!c.has("rhs") || !c.at("rhs").is_array()) fail(c.sub("rhs"), "must be an array of strings");
    for (const json& t : c.at("rhs")) {
      if (!t.is_string()) fail(c.sub("rhs"), "must be an array of strings");
      cfg.custom_rhs.push_back(t.get<std::string>());
    }
    cfg.output_index = c.count("output_index", 0);
  } else if (root.has("custom")) {
    fail(root.sub("custom"), "only allowed with model 'custom'");
  }

  // Inputs.
  const bool ext = cfg.model == ModelKind::Extended2;
  if (!root.has("inputs")) {
    cfg.drive = ext ? Drive::constant({cfg.extended->r0(), cfg.extended->d0(), 0.0}) : Drive{};
  } else if (root.at("inputs").is_string()) {
    if (root.at("inputs") != "paper") fail(root.sub("inputs"), "must be \"paper\" or an object");
    cfg.drive = Drive::paper(cfg.seed);
  } else {
    const Obj in(root.at("inputs"), root.sub("inputs"));
    in.allow({"r", "d", "u"});
    if (ext) {
      cfg.drive.r = Schedule::constant(cfg.extended->r0());
      cfg.drive.d = Schedule::constant(cfg.extended->d0());
    }
    if (in.has("r")) cfg.drive.r = parse_schedule(in.at("r"), in.sub("r"), "r", cfg.seed, 0);
    if (in.has("d")) cfg.drive.d = parse_schedule(in.at("d"), in.sub("d"), "d", cfg.seed, 1);
    if (in.has("u")) cfg.drive.u = parse_schedule(in.at("u"), in.sub("u"), "u", cfg.seed, 2);
  }

  // Integrator.
  if (root.has("integrator")) {
    const Obj ig(root.at("integrator"), root.sub("integrator"));
    ig.allow({"h", "t_end", "decimate", "divergence_limit"});
    cfg.integrator.h = positive(ig.number("h", cfg.integrator.h), ig.sub("h"));
    cfg.integrator.t_end = positive(ig.number("t_end", cfg.integrator.t_end), ig.sub("t_end"));
    cfg.integrator.decimate = ig.count("decimate", cfg.integrator.decimate, 1);
    cfg.integrator.divergence_limit =
        positive(ig.number("divergence_limit", cfg.integrator.divergence_limit), ig.sub("divergence_limit"));
    const double steps = cfg.integrator.t_end / cfg.integrator.h;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      fail(ig.path(), "t_end must be an integer multiple of h");
    }
  }
  if (cfg.drive.horizon() < cfg.integrator.t_end) {
    std::ostringstream os;
    os << "input schedules end at t=" << cfg.drive.horizon() << " before t_end="
       << cfg.integrator.t_end;
    fail(root.sub("inputs"), os.str());
  }

  // Model and initial state; constructing the system surfaces expression errors now.
  SystemModel sys = [&] {
    try {
      return cfg.system();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(cfg.model == ModelKind::Custom ? root.sub("custom") : root.sub("params"), e.what());
    }
  }();
  if (root.has("initial_state")) {
    const json& s = root.at("initial_state");
    if (s.is_string()) {
      if (s != "E2" || !ext) fail(root.sub("initial_state"), "\"E2\" is only valid for extended2");
    } else {
      cfg.initial_state = number_list(s, root.sub("initial_state"));
      if (cfg.initial_state->size() != sys.dimension()) {
        fail(root.sub("initial_state"),
             "needs " + std::to_string(sys.dimension()) + " components for model " +
                 std::string(to_string(cfg.model)));
      }
    }
  } else if (!ext) {
    fail(root.sub("initial_state"), "is required for model " + std::string(to_string(cfg.model)));
  }
  if (ext && !cfg.initial_state && !(cfg.drive.at(0.0).r > 0.0)) {
    fail(root.sub("inputs"), "r(0) must be positive to start at E2");
  }

  if (root.has("experiment")) {
    const Obj ex(root.at("experiment"), root.sub("experiment"));
    ex.allow({"phase", "invariance", "dc_check"});
    if ((ex.has("phase") || ex.has("invariance") || ex.has("dc_check")) && !ext) {
      fail(ex.path(), "experiments require model extended2");
    }
    if (ex.has("phase")) cfg.phase = parse_phase(Obj(ex.at("phase"), ex.sub("phase")), *cfg.extended);
    if (ex.has("invariance")) {
      cfg.invariance = parse_invariance(Obj(ex.at("invariance"), ex.sub("invariance")));
    }
    if (ex.has("dc_check")) cfg.dc_checks = parse_dc(Obj(ex.at("dc_check"), ex.sub("dc_check")));
  }
  if (ext) {
    if (!cfg.phase) cfg.phase = parse_phase(Obj(empty, "config.experiment.phase"), *cfg.extended);
    if (!cfg.invariance) cfg.invariance = parse_invariance(Obj(empty, "config.experiment.invariance"));
    if (cfg.dc_checks.empty()) cfg.dc_checks = parse_dc(Obj(empty, "config.experiment.dc_check"));
  }
  return cfg;
}

SystemModel Config::system() const {
  auto get = [&](const char* k) { return params.at(k); };
  switch (model) {
    case ModelKind::Extended2: return make_extended2(*extended);
    case ModelKind::Original3:
      return make_original3(OriginalParams(get("u0"), get("s"), get("p"), get("y0")));
    case ModelKind::Simplified2:
      return make_simplified2(SimplifiedParams(get("u0"), get("s"), get("y0")));
    case ModelKind::Substituted2:
      return make_substituted2(SimplifiedParams(get("u0"), get("s"), get("y0")));
    case ModelKind::Custom:
      return from_expressions(custom_dim, custom_rhs, output_index, params);
  }
  throw ConfigError("unknown model");
}

State Config::start_state() const {
  if (initial_state) return *initial_state;
  const InputSample in = drive.at(0.0);
  const Vec2 e2 = analysis::equilibria(extended_params(), in.r, in.d).e2.point;
  return {e2[0], e2[1]};
}

const ExtendedParams& Config::extended_params() const {
  if (!extended) throw ConfigError("config.model: this command requires model extended2");
  return *extended;
}

Config load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, seed);
}

json paper_config_json() {
  return json{
      {"model", "extended2"},
      {"params", {{"b", 0.3}, {"c", 2.0}, {"s", 0.25}, {"l", 0.7}, {"r0", 11.0}, {"d0", 0.01}}},
      {"inputs", "paper"},
      {"integrator", {{"h", 0.01}, {"t_end", 400.0}, {"decimate", 10}}},
      {"seed", 0},
      {"experiment",
       {{"phase",
         {{"grid", {{"y", {{"lo", -2.0}, {"hi", 20.0}, {"count", 21}}},
                    {"z", {{"lo", 0.0}, {"hi", 10.0}, {"count", 21}}}}},
          {"t_max", 400.0},
          {"variants",
           json::array({{{"name", "baseline"}},
                        {{"name", "s1.5"}, {"params", {{"s", 1.5}}}},
                        {{"name", "b0.6"}, {"params", {{"b", 0.6}}}},
                        {{"name", "c4"}, {"params", {{"c", 4.0}}}}})}}},
        {"invariance",
         {{"transient", 50.0},
          {"tests", json::array({{{"param", "s"}, {"from", 0.25}, {"to", 1.5}},
                                 {{"param", "b"}, {"from", 0.3}, {"to", 0.6}},
                                 {{"param", "c"}, {"from", 2.0}, {"to", 4.0}}})}}},
        {"dc_check",
         {{"checks", json::array({{{"param", "s"}, {"value", 0.25}, {"reference", 1.0}},
                                  {{"param", "b"}, {"value", 0.3}, {"reference", 1.0}},
                                  {{"param", "c"}, {"value", 2.0}, {"reference", 1.0}}})}}}}}};
}

}  // namespace invaria::cli
