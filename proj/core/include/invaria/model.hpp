#pragma once

// Built-in ODE systems and the generic right-hand-side interface.
//
// State ordering is fixed per model and never permuted here:
//   extended2     (y, z)
//   original3     (y, x, z)
//   simplified2   (y, z)
//   substituted2  (y, zt)     zt = s * z
//   custom        (x1, ..., xn)

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "invaria/expr.hpp"

namespace invaria {

using State = std::vector<double>;
using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

/// Instantaneous values of every external input a model may read.
struct InputSample {
  double r = 0.0;
  double d = 0.0;
  double u = 0.0;
};

/// Constants of the adaptive proportional-integral feedback system plus the
/// baseline reference and disturbance levels. Validated on construction:
/// b, c, s, r0 > 0, d0 >= 0 and 0 < l < 1.
class ExtendedParams {
 public:
  ExtendedParams(double b, double c, double s, double l, double r0, double d0);

  /// b=0.3, c=2, s=0.25, l=0.7, r0=11, d0=0.01.
  static ExtendedParams paper();

  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double s() const noexcept { return s_; }
  double l() const noexcept { return l_; }
  double r0() const noexcept { return r0_; }
  double d0() const noexcept { return d0_; }

  /// Value by name: one of b, c, s, l, r0, d0.
  double get(std::string_view name) const;

  /// Copy with one named constant replaced (and re-validated).
  ExtendedParams with(std::string_view name, double value) const;

  /// {b, c, s, l} for expression evaluation.
  expr::Bindings bindings() const;

  friend bool operator==(const ExtendedParams&, const ExtendedParams&) = default;

 private:
  double b_, c_, s_, l_, r0_, d0_;
};

/// Constants of the three-state hormonal circuit. All strictly positive.
class OriginalParams {
 public:
  OriginalParams(double u0, double s, double p, double y0);

  double u0() const noexcept { return u0_; }
  double s() const noexcept { return s_; }
  double p() const noexcept { return p_; }
  double y0() const noexcept { return y0_; }

  expr::Bindings bindings() const;

 private:
  double u0_, s_, p_, y0_;
};

/// Constants of the two-state reduction (no p). All strictly positive.
class SimplifiedParams {
 public:
  SimplifiedParams(double u0, double s, double y0);

  double u0() const noexcept { return u0_; }
  double s() const noexcept { return s_; }
  double y0() const noexcept { return y0_; }

  expr::Bindings bindings() const;

 private:
  double u0_, s_, y0_;
};

/// (b*y + d + s*z*(l*r - y), -c*z*(r - y)).
Vec2 rhs_extended(const Vec2& yz, double r, double d, const ExtendedParams& p);

/// (u0 + u - s*x*y, p*z*y - x, z*(y - y0)) for state (y, x, z).
Vec3 rhs_original(const Vec3& yxz, double u, const OriginalParams& p);

/// (u0 + u - s*z*y, z*(y - y0)).
Vec2 rhs_simplified(const Vec2& yz, double u, const SimplifiedParams& p);

/// (u0 + u - zt*y, zt*(y - y0)); the gain s is absorbed into zt.
Vec2 rhs_substituted(const Vec2& yzt, double u, const SimplifiedParams& p);

/// Indices of components that are negative (y < 0 or z < 0 in the built-ins
/// are biologically infeasible but still integrable).
std::vector<std::size_t> negative_components(std::span<const double> state);

/// A named ODE system with bound parameters behind one rhs interface.
class SystemModel {
 public:
  using RhsFn = std::function<void(double t, std::span<const double> x, const InputSample& in,
                                   std::span<double> dx)>;

  SystemModel(std::string name, std::vector<std::string> state_names,
              std::vector<std::string> input_names, std::size_t output_index,
              expr::Bindings params, RhsFn rhs);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return state_names_.size(); }
  std::size_t output_index() const noexcept { return output_index_; }
  const std::vector<std::string>& state_names() const noexcept { return state_names_; }
  /// Subset of {r, d, u} the model reads, in CSV column order.
  const std::vector<std::string>& input_names() const noexcept { return input_names_; }
  const expr::Bindings& params() const noexcept { return params_; }

  /// Writes f(t, x, in) into dx. Throws NumericError if the input state or
  /// the result contains a non-finite value.
  void rhs(double t, std::span<const double> x, const InputSample& in, std::span<double> dx) const;

  State rhs(double t, std::span<const double> x, const InputSample& in) const;

 private:
  std::string name_;
  std::vector<std::string> state_names_;
  std::vector<std::string> input_names_;
  std::size_t output_index_;
  expr::Bindings params_;
  RhsFn rhs_;
};

SystemModel make_extended2(const ExtendedParams& p);
SystemModel make_original3(const OriginalParams& p);
SystemModel make_simplified2(const SimplifiedParams& p);
/// Uses u0 and y0 of `p`; s does not appear.
SystemModel make_substituted2(const SimplifiedParams& p);

/// User-defined system. Each text is the derivative of x1..xn in order and
/// may reference x1..xn, r, d, u, t and any name in `params`. Unknown symbols
/// and parse errors are reported here, before any evaluation.
SystemModel from_expressions(std::size_t dim, const std::vector<std::string>& rhs_texts,
                             std::size_t output_index, const expr::Bindings& params,
                             std::string name = "custom");

}  // namespace invaria
