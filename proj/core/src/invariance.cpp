#include "invaria/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "invaria/analysis.hpp"
#include "invaria/csv.hpp"
#include "invaria/error.hpp"

namespace invaria::invariance {

std::string_view to_string(Coordinates c) {
  return c == Coordinates::YOutput ? "y-output" : "z-output";
}

std::string_view to_string(Decision d) {
  return d == Decision::Invariant ? "invariant" : "not-invariant";
}

Vec2 to_x(Coordinates c, const Vec2& yz) {
  return c == Coordinates::YOutput ? Vec2{yz[1], yz[0]} : yz;
}

Vec2 to_yz(Coordinates c, const Vec2& x) {
  return c == Coordinates::YOutput ? Vec2{x[1], x[0]} : x;
}

Vec2 rhs_in_x(Coordinates c, const Vec2& x, double r, double d, const ExtendedParams& p) {
  return to_x(c, rhs_extended(to_yz(c, x), r, d, p));
}

expr::Expr Equivariance::beta() { return expr::Expr::symbol("x2"); }

namespace {

const std::set<std::string>& allowed_symbols() {
  static const std::set<std::string> s{"x1", "x2", "r", "d", "b", "c", "s", "l"};
  return s;
}

void check_symbols(const expr::Expr& e, std::string_view what) {
  for (const auto& sym : expr::symbols(e)) {
    if (!allowed_symbols().count(sym)) {
      throw InvalidArgument(std::string(what) + " references unknown symbol '" + sym + "'");
    }
  }
}

expr::Bindings alpha_env(const ExtendedParams& p_to, double x1, double x2, double r, double d) {
  expr::Bindings env = p_to.bindings();
  env["x1"] = x1;
  env["x2"] = x2;
  env["r"] = r;
  env["d"] = d;
  return env;
}

}  // namespace

Equivariance make_equivariance(std::string param, double from, double to,
                               std::string_view alpha_text, Coordinates coords,
                               std::optional<std::string_view> singular_text,
                               std::optional<std::string_view> beta_text) {
  if (param != "b" && param != "c" && param != "s" && param != "l") {
    throw InvalidArgument("equivariance parameter must be one of b, c, s, l (got '" + param + "')");
  }
  if (!std::isfinite(from) || !std::isfinite(to)) {
    throw InvalidArgument("equivariance parameter values must be finite");
  }
  Equivariance eq{std::move(param), from, to, expr::parse(alpha_text), coords, std::nullopt};
  check_symbols(eq.alpha, "alpha");
  if (singular_text) {
    eq.singular = expr::parse(*singular_text);
    check_symbols(*eq.singular, "singular-set expression");
  }
  if (beta_text && !(expr::parse(*beta_text) == Equivariance::beta())) {
    throw InvalidArgument("beta must be exactly x2 so that the output map is preserved");
  }
  return eq;
}

std::vector<Equivariance> builtin_candidates() {
  return {
      make_equivariance("s", 1.0, 1.5, "x1/s", Coordinates::YOutput, "l*r - x2"),
      make_equivariance("b", 1.0, 0.6, "(x2 + s*x1*(l*r - x2) - b*x2)/(s*(l*r - x2))",
                        Coordinates::YOutput, "l*r - x2"),
      make_equivariance("c", 1.0, 4.0, "((c - 1)*r + x1)/c", Coordinates::ZOutput, "c*x2"),
  };
}

Vec2 apply(const Equivariance& eq, const ExtendedParams& base, const Vec2& x, double r, double d) {
  const ExtendedParams p_to = base.with(eq.param_name, eq.param_to);
  return {expr::eval(eq.alpha, alpha_env(p_to, x[0], x[1], r, d)), x[1]};
}

EquivarianceGrid EquivarianceGrid::standard() {
  EquivarianceGrid g;
  for (int i = 0; i < 20; ++i) {
    const double v = 0.1 + i * (20.0 - 0.1) / 19.0;
    g.x1.push_back(v);
    g.x2.push_back(v);
  }
  g.r = {8.0, 11.0, 16.0};
  g.d = {0.01, 5.0};
  return g;
}

namespace {

bool in_singular_set(const Equivariance& eq, const ExtendedParams& p_to, const GridPoint& pt) {
  if (!eq.singular) return false;
  const double v = expr::eval(*eq.singular, alpha_env(p_to, pt.x1, pt.x2, pt.r, pt.d));
  return std::abs(v) < Equivariance::kSingularTol;
}

}  // namespace

std::vector<GridPoint> grid_points(const Equivariance& eq, const ExtendedParams& base,
                                   const EquivarianceGrid& grid) {
  const ExtendedParams p_to = base.with(eq.param_name, eq.param_to);
  std::vector<GridPoint> out;
  for (double r : grid.r) {
    for (double d : grid.d) {
      for (double x1 : grid.x1) {
        for (double x2 : grid.x2) {
          const GridPoint pt{x1, x2, r, d};
          if (!in_singular_set(eq, p_to, pt)) out.push_back(pt);
        }
      }
    }
  }
  return out;
}

ConditionResiduals check_equivariance(const ExtendedParams& base, const Equivariance& eq,
                                      std::span<const GridPoint> points) {
  const ExtendedParams p_to = base.with(eq.param_name, eq.param_to);
  const ExtendedParams p_from = base.with(eq.param_name, eq.param_from);
  ConditionResiduals out;
  out.points.reserve(points.size());
  for (const GridPoint& pt : points) {
    if (in_singular_set(eq, p_to, pt)) {
      std::ostringstream os;
      os << "grid point (x1=" << pt.x1 << ", x2=" << pt.x2 << ", r=" << pt.r
         << ") lies in the singular set of the " << eq.param_name << " candidate";
      throw InvalidArgument(os.str());
    }
    const expr::Bindings env = alpha_env(p_to, pt.x1, pt.x2, pt.r, pt.d);
    const Vec2 eta{expr::eval(eq.alpha, env), pt.x2};
    const Vec2 lhs = rhs_in_x(eq.coords, eta, pt.r, pt.d, p_to);

    const double da_dx1 = expr::partial_fd(eq.alpha, env, "x1");
    const double da_dx2 = expr::partial_fd(eq.alpha, env, "x2");
    const Vec2 f = rhs_in_x(eq.coords, {pt.x1, pt.x2}, pt.r, pt.d, p_from);
    const Vec2 rhs{da_dx1 * f[0] + da_dx2 * f[1], f[1]};

    const Vec2 res{std::abs(lhs[0] - rhs[0]), std::abs(lhs[1] - rhs[1])};
    for (int k = 0; k < 2; ++k) {
      out.max[k] = std::max(out.max[k], res[k]);
      out.mean[k] += res[k];
    }
    out.points.push_back({pt, lhs, rhs, res});
  }
  if (!out.points.empty()) {
    for (double& m : out.mean) m /= static_cast<double>(out.points.size());
  }
  return out;
}

Decision decide(double residual, const Thresholds& thresholds) {
  if (!(thresholds.invariant > 0.0) || !(thresholds.not_invariant >= thresholds.invariant)) {
    throw InvalidArgument("thresholds must satisfy 0 < invariant <= not_invariant");
  }
  if (residual < thresholds.invariant) return Decision::Invariant;
  if (residual > thresholds.not_invariant) return Decision::NotInvariant;
  std::ostringstream os;
  os << "residual " << residual << " lies in the undecided band [" << thresholds.invariant << ", "
     << thresholds.not_invariant << "]";
  throw UndecidedError(os.str());
}

DcOutputResult dc_output_test(const ExtendedParams& base, const std::string& param, double from,
                              double to, const Drive& drive, double transient,
                              const IntegratorOptions& opts, const Thresholds& thresholds,
                              std::uint64_t seed) {
  const ExtendedParams p_from = base.with(param, from);
  const ExtendedParams p_to = base.with(param, to);
  const InputSample in0 = drive.at(0.0);

  auto run = [&](const ExtendedParams& p) {
    const Vec2 e2 = analysis::equilibria(p, in0.r, in0.d).e2.point;
    const State x0{e2[0], e2[1]};
    return integrate(make_extended2(p), x0, drive, opts, seed);
  };
  const Trajectory a = run(p_from);
  const Trajectory b = run(p_to);

  DcOutputResult out;
  ResidualSeries& s = out.series;
  double max_res = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double res = b.states[i][0] - a.states[i][0];
    s.t.push_back(a.times[i]);
    s.y_from.push_back(a.states[i][0]);
    s.y_to.push_back(b.states[i][0]);
    s.z_from.push_back(a.states[i][1]);
    s.z_to.push_back(b.states[i][1]);
    s.residual.push_back(res);
    if (a.times[i] >= transient) max_res = std::max(max_res, std::abs(res));
  }
  out.verdict = {param, from, to, std::nullopt, max_res, decide(max_res, thresholds), thresholds, seed};
  return out;
}

Vec2 substitution_scale(const std::string& param, double value) {
  if (!(value != 0.0) || !std::isfinite(value)) {
    throw InvalidArgument("substitution value must be finite and non-zero");
  }
  if (param == "s" || param == "c") return {value, 1.0};
  if (param == "b") return {1.0, value};
  throw InvalidArgument("no coordinate substitution defined for parameter '" + param + "'");
}

DcCoordinateResult dc_coordinate_check(const ExtendedParams& base, const std::string& param,
                                       double value, double reference, const Drive& drive,
                                       const IntegratorOptions& opts, std::optional<Vec2> x0_yz) {
  constexpr Coordinates kCoords = Coordinates::YOutput;
  const Vec2 k_val = substitution_scale(param, value);
  const Vec2 k_ref = substitution_scale(param, reference);
  const ExtendedParams p_val = base.with(param, value);
  const ExtendedParams p_ref = base.with(param, reference);
  const InputSample in0 = drive.at(0.0);

  if (!x0_yz) x0_yz = analysis::equilibria(p_val, in0.r, in0.d).e2.point;
  DcCoordinateResult out;
  out.param = param;
  out.value = value;
  out.reference = reference;
  out.x0 = to_x(kCoords, *x0_yz);
  out.v0 = {k_val[0] * out.x0[0], k_val[1] * out.x0[1]};
  const Vec2 x_ref0{out.v0[0] / k_ref[0], out.v0[1] / k_ref[1]};

  const Vec2 start_ref = to_yz(kCoords, x_ref0);
  const Trajectory a = integrate(make_extended2(p_val), State{x0_yz->begin(), x0_yz->end()},
                                 drive, opts);
  const Trajectory b =
      integrate(make_extended2(p_ref), State{start_ref.begin(), start_ref.end()}, drive, opts);

  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2 xa = to_x(kCoords, {a.states[i][0], a.states[i][1]});
    const Vec2 xb = to_x(kCoords, {b.states[i][0], b.states[i][1]});
    for (int k = 0; k < 2; ++k) {
      const double diff = std::abs(k_val[k] * xa[k] - k_ref[k] * xb[k]);
      out.max_discrepancy = std::max(out.max_discrepancy, diff);
    }
  }
  return out;
}

double gamma_residual(const Equivariance& eq, const ExtendedParams& base, const Vec2& nominal_x,
                      const Vec2& perturbed_x, double r, double d) {
  const Vec2 mapped = apply(eq, base, nominal_x, r, d);
  return std::max(std::abs(mapped[0] - perturbed_x[0]), std::abs(mapped[1] - perturbed_x[1]));
}

void write_residual_csv(std::ostream& os, const ResidualSeries& series) {
  csv::write_header(os, {"t", "y_from", "y_to", "residual"});
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    csv::write_row(os, {series.t[i], series.y_from[i], series.y_to[i], series.residual[i]});
  }
}

}  // namespace invaria::invariance
