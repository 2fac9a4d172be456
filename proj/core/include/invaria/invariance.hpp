#pragma once

// Numerical checks of P-invariance and dynamical compensation for the
// extended model.
//
// This module owns the permutation between the model's (y, z) ordering and
// the (x1, x2) coordinates the equivariance conditions are written in:
//   Coordinates::YOutput   x1 = z, x2 = y   (output g = x2 = y)
//   Coordinates::ZOutput   x1 = y, x2 = z   (output g = x2 = z)

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invaria/expr.hpp"
#include "invaria/integrate.hpp"
#include "invaria/model.hpp"
#include "invaria/signals.hpp"

namespace invaria::invariance {

enum class Coordinates { YOutput, ZOutput };

std::string_view to_string(Coordinates c);

Vec2 to_x(Coordinates c, const Vec2& yz);
Vec2 to_yz(Coordinates c, const Vec2& x);

/// Extended-model vector field expressed in x coordinates.
Vec2 rhs_in_x(Coordinates c, const Vec2& x, double r, double d, const ExtendedParams& p);

/// Candidate transformation eta(x1, x2) = (alpha(x1, x2), x2) mapping the
/// system at `param_from` onto the system at `param_to`. The second
/// component is always x2 so the output map is preserved exactly.
///
/// `alpha` may reference x1, x2, r, d, b, c, s, l; parameters are bound to
/// their `param_to` values when alpha is evaluated. Points where
/// |singular| < kSingularTol are outside the candidate's domain.
struct Equivariance {
  std::string param_name;
  double param_from = 1.0;
  double param_to = 1.0;
  expr::Expr alpha;
  Coordinates coords = Coordinates::YOutput;
  std::optional<expr::Expr> singular;

  static constexpr double kSingularTol = 1e-6;

  /// The structural second component, the symbol x2.
  static expr::Expr beta();
};

/// Parses and validates a candidate. If `beta_text` is given it must parse
/// to exactly the symbol x2.
Equivariance make_equivariance(std::string param, double from, double to,
                               std::string_view alpha_text, Coordinates coords,
                               std::optional<std::string_view> singular_text = std::nullopt,
                               std::optional<std::string_view> beta_text = std::nullopt);

/// The three closed-form candidates, nominal value 1:
///   s: alpha = x1/s                                         (YOutput, to 1.5)
///   b: alpha = (x2 + s x1 (l r - x2) - b x2) / (s (l r - x2)) (YOutput, to 0.6)
///   c: alpha = ((c - 1) r + x1) / c                         (ZOutput, to 4)
std::vector<Equivariance> builtin_candidates();

/// eta(x) for the candidate's param_to binding of `base`.
Vec2 apply(const Equivariance& eq, const ExtendedParams& base, const Vec2& x, double r, double d);

struct GridPoint {
  double x1, x2, r, d;
};

struct EquivarianceGrid {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> r;
  std::vector<double> d;

  /// x1, x2 in [0.1, 20] with 20 points each, r in {8, 11, 16}, d in {0.01, 5}.
  static EquivarianceGrid standard();
};

/// Cartesian product of the grid minus points in the candidate's singular set.
std::vector<GridPoint> grid_points(const Equivariance& eq, const ExtendedParams& base,
                                   const EquivarianceGrid& grid);

struct PointResidual {
  GridPoint at;
  Vec2 lhs;       // f(eta(x), u, p_to)
  Vec2 rhs;       // eta_*(x) f(x, u, p_from)
  Vec2 residual;  // |lhs - rhs| componentwise
};

struct ConditionResiduals {
  std::vector<PointResidual> points;
  Vec2 max{0.0, 0.0};
  Vec2 mean{0.0, 0.0};

  double overall_max() const noexcept { return max[0] > max[1] ? max[0] : max[1]; }
};

/// Evaluates f(eta(x), u, p_to) = eta_*(x) f(x, u, p_from) at every point,
/// with the Jacobian of eta by central differences (h = 1e-5 max(1, |x|)).
/// Throws InvalidArgument if a point lies in the singular set.
ConditionResiduals check_equivariance(const ExtendedParams& base, const Equivariance& eq,
                                      std::span<const GridPoint> points);

struct Thresholds {
  double invariant = 1e-5;
  double not_invariant = 1e-2;
};

enum class Decision { Invariant, NotInvariant };

std::string_view to_string(Decision d);

/// residual < invariant -> Invariant; residual > not_invariant ->
/// NotInvariant; anything else throws UndecidedError.
Decision decide(double residual, const Thresholds& thresholds);

struct InvarianceVerdict {
  std::string param;
  double from = 0.0;
  double to = 0.0;
  std::optional<double> max_condition_residual;
  double max_output_residual = 0.0;
  Decision decision = Decision::NotInvariant;
  Thresholds thresholds;
  std::uint64_t seed = 0;
};

struct ResidualSeries {
  std::vector<double> t;
  std::vector<double> y_from, y_to;
  std::vector<double> z_from, z_to;
  std::vector<double> residual;  // y_to - y_from
};

struct DcOutputResult {
  InvarianceVerdict verdict;
  ResidualSeries series;
};

/// Paired simulation. Each run starts at its own closed-form E2 for the
/// drive's t=0 inputs and is driven by the same r(t), d(t). The residual is
/// max |y_to - y_from| over t >= transient.
DcOutputResult dc_output_test(const ExtendedParams& base, const std::string& param, double from,
                              double to, const Drive& drive, double transient,
                              const IntegratorOptions& opts, const Thresholds& thresholds = {},
                              std::uint64_t seed = 0);

/// Scale factors (k1, k2) of the coordinate change v = (k1 x1, k2 x2) in
/// YOutput coordinates: s -> (s, 1), b -> (1, b), c -> (c, 1).
Vec2 substitution_scale(const std::string& param, double value);

struct DcCoordinateResult {
  std::string param;
  double value = 0.0;
  double reference = 1.0;
  Vec2 x0{};   // initial state of the run at `value`, YOutput coordinates
  Vec2 v0{};   // transformed initial state shared by both runs
  double max_discrepancy = 0.0;
};

/// Simulates at param=value from x0 (defaults to E2), maps the trajectory
/// through v = scale(value) x, simulates at param=reference from the
/// matching transformed start, maps it through scale(reference) and returns
/// the largest componentwise difference of the two v-trajectories.
DcCoordinateResult dc_coordinate_check(const ExtendedParams& base, const std::string& param,
                                       double value, double reference, const Drive& drive,
                                       const IntegratorOptions& opts,
                                       std::optional<Vec2> x0_yz = std::nullopt);

/// max |eta(nominal_x) - perturbed_x|, the initial-condition consistency
/// eta(gamma) = gamma_p.
double gamma_residual(const Equivariance& eq, const ExtendedParams& base, const Vec2& nominal_x,
                      const Vec2& perturbed_x, double r, double d);

void write_residual_csv(std::ostream& os, const ResidualSeries& series);

}  // namespace invaria::invariance
