#include "invaria/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "invaria/error.hpp"

namespace invaria {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    std::ostringstream os;
    os << "parameter " << name << " must be positive (got " << v << ")";
    throw InvalidArgument(os.str());
  }
}

template <typename... T>
void require_finite(const char* where, T... values) {
  if (!(std::isfinite(values) && ...)) {
    throw NumericError(std::string("non-finite input to ") + where);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameter sets

ExtendedParams::ExtendedParams(double b, double c, double s, double l, double r0, double d0)
    : b_(b), c_(c), s_(s), l_(l), r0_(r0), d0_(d0) {
  require_positive(b, "b");
  require_positive(c, "c");
  require_positive(s, "s");
  require_positive(r0, "r0");
  if (!std::isfinite(d0) || d0 < 0.0) throw InvalidArgument("parameter d0 must be non-negative");
  if (l == 1.0) throw InvalidArgument("z2 singular at l=1");
  if (!std::isfinite(l) || !(l > 0.0 && l < 1.0)) {
    std::ostringstream os;
    os << "parameter l must lie in (0, 1) (got " << l << ")";
    throw InvalidArgument(os.str());
  }
}

ExtendedParams ExtendedParams::paper() { return {0.3, 2.0, 0.25, 0.7, 11.0, 0.01}; }

double ExtendedParams::get(std::string_view name) const {
  if (name == "b") return b_;
  if (name == "c") return c_;
  if (name == "s") return s_;
  if (name == "l") return l_;
  if (name == "r0") return r0_;
  if (name == "d0") return d0_;
  throw InvalidArgument("unknown parameter '" + std::string(name) + "'");
}

ExtendedParams ExtendedParams::with(std::string_view name, double value) const {
  double b = b_, c = c_, s = s_, l = l_, r0 = r0_, d0 = d0_;
  if (name == "b") b = value;
  else if (name == "c") c = value;
  else if (name == "s") s = value;
  else if (name == "l") l = value;
  else if (name == "r0") r0 = value;
  else if (name == "d0") d0 = value;
  else throw InvalidArgument("unknown parameter '" + std::string(name) + "'");
  return {b, c, s, l, r0, d0};
}

expr::Bindings ExtendedParams::bindings() const {
  return {{"b", b_}, {"c", c_}, {"s", s_}, {"l", l_}};
}

OriginalParams::OriginalParams(double u0, double s, double p, double y0)
    : u0_(u0), s_(s), p_(p), y0_(y0) {
  require_positive(u0, "u0");
  require_positive(s, "s");
  require_positive(p, "p");
  require_positive(y0, "y0");
}

expr::Bindings OriginalParams::bindings() const {
  return {{"u0", u0_}, {"s", s_}, {"p", p_}, {"y0", y0_}};
}

SimplifiedParams::SimplifiedParams(double u0, double s, double y0) : u0_(u0), s_(s), y0_(y0) {
  require_positive(u0, "u0");
  require_positive(s, "s");
  require_positive(y0, "y0");
}

expr::Bindings SimplifiedParams::bindings() const {
  return {{"u0", u0_}, {"s", s_}, {"y0", y0_}};
}

// ---------------------------------------------------------------------------
// Hard-coded right-hand sides

Vec2 rhs_extended(const Vec2& yz, double r, double d, const ExtendedParams& p) {
  const auto [y, z] = yz;
  require_finite("rhs_extended", y, z, r, d);
  return {p.b() * y + d + p.s() * z * (p.l() * r - y), -p.c() * z * (r - y)};
}

Vec3 rhs_original(const Vec3& yxz, double u, const OriginalParams& p) {
  const auto [y, x, z] = yxz;
  require_finite("rhs_original", y, x, z, u);
  return {p.u0() + u - p.s() * x * y, p.p() * z * y - x, z * (y - p.y0())};
}

Vec2 rhs_simplified(const Vec2& yz, double u, const SimplifiedParams& p) {
  const auto [y, z] = yz;
  require_finite("rhs_simplified", y, z, u);
  return {p.u0() + u - p.s() * z * y, z * (y - p.y0())};
}

Vec2 rhs_substituted(const Vec2& yzt, double u, const SimplifiedParams& p) {
  const auto [y, zt] = yzt;
  require_finite("rhs_substituted", y, zt, u);
  return {p.u0() + u - zt * y, zt * (y - p.y0())};
}

std::vector<std::size_t> negative_components(std::span<const double> state) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] < 0.0) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SystemModel

SystemModel::SystemModel(std::string name, std::vector<std::string> state_names,
                         std::vector<std::string> input_names, std::size_t output_index,
                         expr::Bindings params, RhsFn rhs)
    : name_(std::move(name)),
      state_names_(std::move(state_names)),
      input_names_(std::move(input_names)),
      output_index_(output_index),
      params_(std::move(params)),
      rhs_(std::move(rhs)) {
  if (state_names_.empty()) throw InvalidArgument("model dimension must be at least 1");
  if (output_index_ >= state_names_.size()) {
    throw InvalidArgument("output index " + std::to_string(output_index_) +
                          " out of range for dimension " + std::to_string(state_names_.size()));
  }
  if (!rhs_) throw InvalidArgument("model rhs is empty");
}

void SystemModel::rhs(double t, std::span<const double> x, const InputSample& in,
                      std::span<double> dx) const {
  if (x.size() != dimension() || dx.size() != dimension()) {
    throw InvalidArgument("state dimension mismatch for model " + name_);
  }
  rhs_(t, x, in, dx);
  for (double v : dx) {
    if (!std::isfinite(v)) throw NumericError("non-finite derivative in model " + name_);
  }
}

State SystemModel::rhs(double t, std::span<const double> x, const InputSample& in) const {
  State dx(dimension());
  rhs(t, x, in, dx);
  return dx;
}

SystemModel make_extended2(const ExtendedParams& p) {
  return SystemModel("extended2", {"y", "z"}, {"r", "d"}, 0, p.bindings(),
                     [p](double, std::span<const double> x, const InputSample& in,
                         std::span<double> dx) {
                       const Vec2 f = rhs_extended({x[0], x[1]}, in.r, in.d, p);
                       dx[0] = f[0];
                       dx[1] = f[1];
                     });
}

SystemModel make_original3(const OriginalParams& p) {
  return SystemModel("original3", {"y", "x", "z"}, {"u"}, 0, p.bindings(),
                     [p](double, std::span<const double> x, const InputSample& in,
                         std::span<double> dx) {
                       const Vec3 f = rhs_original({x[0], x[1], x[2]}, in.u, p);
                       std::copy(f.begin(), f.end(), dx.begin());
                     });
}

SystemModel make_simplified2(const SimplifiedParams& p) {
  return SystemModel("simplified2", {"y", "z"}, {"u"}, 0, p.bindings(),
                     [p](double, std::span<const double> x, const InputSample& in,
                         std::span<double> dx) {
                       const Vec2 f = rhs_simplified({x[0], x[1]}, in.u, p);
                       dx[0] = f[0];
                       dx[1] = f[1];
                     });
}

SystemModel make_substituted2(const SimplifiedParams& p) {
  expr::Bindings params{{"u0", p.u0()}, {"y0", p.y0()}};
  return SystemModel("substituted2", {"y", "zt"}, {"u"}, 0, std::move(params),
                     [p](double, std::span<const double> x, const InputSample& in,
                         std::span<double> dx) {
                       const Vec2 f = rhs_substituted({x[0], x[1]}, in.u, p);
                       dx[0] = f[0];
                       dx[1] = f[1];
                     });
}

SystemModel from_expressions(std::size_t dim, const std::vector<std::string>& rhs_texts,
                             std::size_t output_index, const expr::Bindings& params,
                             std::string name) {
  if (dim == 0) throw InvalidArgument("model dimension must be at least 1");
  if (rhs_texts.size() != dim) {
    throw InvalidArgument("expected " + std::to_string(dim) + " rhs expressions, got " +
                          std::to_string(rhs_texts.size()));
  }
  if (output_index >= dim) {
    throw InvalidArgument("output index " + std::to_string(output_index) +
                          " out of range for dimension " + std::to_string(dim));
  }

  // Slot layout: x1..xn, t, r, d, u, params...
  std::vector<std::string> slots;
  std::vector<std::string> state_names;
  for (std::size_t i = 0; i < dim; ++i) {
    state_names.push_back("x" + std::to_string(i + 1));
    slots.push_back(state_names.back());
  }
  const std::size_t input_base = slots.size();
  for (const char* s : {"t", "r", "d", "u"}) slots.emplace_back(s);
  for (const auto& [k, v] : params) {
    if (std::find(slots.begin(), slots.end(), k) != slots.end()) {
      throw InvalidArgument("parameter '" + k + "' shadows a state or input symbol");
    }
    slots.push_back(k);
  }

  std::vector<expr::CompiledExpr> compiled;
  std::set<std::string> used;
  for (const auto& text : rhs_texts) {
    const expr::Expr e = expr::parse(text);
    compiled.emplace_back(e, slots);
    const auto syms = expr::symbols(e);
    used.insert(syms.begin(), syms.end());
  }
  std::vector<std::string> inputs;
  for (const char* s : {"r", "d", "u"}) {
    if (used.count(s)) inputs.emplace_back(s);
  }

  std::vector<double> param_values;
  for (const auto& [k, v] : params) param_values.push_back(v);

  auto rhs = [compiled = std::move(compiled), param_values, dim, input_base](
                 double t, std::span<const double> x, const InputSample& in,
                 std::span<double> dx) {
    thread_local std::vector<double> frame;
    frame.resize(dim + 4 + param_values.size());
    std::copy(x.begin(), x.end(), frame.begin());
    frame[input_base] = t;
    frame[input_base + 1] = in.r;
    frame[input_base + 2] = in.d;
    frame[input_base + 3] = in.u;
    std::copy(param_values.begin(), param_values.end(), frame.begin() + input_base + 4);
    for (std::size_t i = 0; i < dim; ++i) dx[i] = compiled[i](frame);
  };
  return SystemModel(std::move(name), std::move(state_names), std::move(inputs), output_index,
                     params, std::move(rhs));
}

}  // namespace invaria
