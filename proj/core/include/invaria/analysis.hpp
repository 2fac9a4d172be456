#pragma once

// Equilibria, linearization and phase-plane sampling for the extended
// (adaptive proportional-integral feedback) model. States are (y, z).

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "invaria/model.hpp"

namespace invaria::analysis {

using Complex = std::complex<double>;
using EigenPair = std::array<Complex, 2>;

/// Row-major 2x2 matrix.
struct Matrix2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

  double trace() const noexcept { return a11 + a22; }
  double det() const noexcept { return a11 * a22 - a12 * a21; }
};

enum class Classification {
  Saddle,
  StableNode,
  StableSpiral,
  UnstableNode,
  UnstableSpiral,
  Degenerate,
};

std::string_view to_string(Classification c);

enum class EquilibriumKind { E1, E2 };

struct Equilibrium {
  EquilibriumKind kind;
  Vec2 point;
  EigenPair eigenvalues;
  Classification classification;
  double tau;
  double delta;
  int discriminant_case;
};

struct StabilityReport {
  Equilibrium e1;
  Equilibrium e2;
  ExtendedParams params;
  double r;
  double d;
};

inline constexpr double kDefaultReTol = 1e-9;

/// E1 = (-d/b, 0) and E2 = (r, (d + b r) / (s r (1 - l))). E1 eigenvalues
/// come from the closed forms {b, -c (d + b r) / b}; E2 eigenvalues from
/// eigen2(jacobian(E2)). Throws InvalidArgument for r <= 0.
StabilityReport equilibria(const ExtendedParams& p, double r, double d,
                           double re_tol = kDefaultReTol);

/// [[b - s z, s (l r - y)], [c z, -c (r - y)]].
Matrix2 jacobian(const ExtendedParams& p, const Vec2& yz, double r);

/// Roots of lambda^2 - tau lambda + delta, larger real root first. Real
/// roots are computed without cancellation: the larger-magnitude root
/// directly, the other as delta / root. Complex roots as (re + i im, re - i im).
EigenPair eigen2(const Matrix2& m);

EigenPair eigen2_from_trace_det(double tau, double delta);

/// Throws InvalidArgument if re_tol <= 0.
Classification classify(const EigenPair& eigs, double re_tol = kDefaultReTol);

/// 1 when |tau^2 - 4 delta| <= 1e-12, 2 when negative, 3 when positive.
int discriminant_case(double tau, double delta);

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 2;

  /// lo + i (hi - lo) / (count - 1); a single-point axis returns lo.
  double at(std::size_t i) const noexcept;
};

struct PhaseGrid {
  GridAxis y;
  GridAxis z;
};

struct FieldSample {
  double y, z;
  double dy, dz;
  double magnitude;
  double ny, nz;  // unit direction, zero at a fixed point
};

/// rhs_extended at every node, y-major (all z for the first y, ...).
std::vector<FieldSample> vector_field(const ExtendedParams& p, double r, double d,
                                      const PhaseGrid& grid);

enum class BasinLabel { ConvergedE2, Diverged, Undecided };

std::string_view to_string(BasinLabel label);

struct BasinSample {
  double y0, z0;
  BasinLabel label;
  /// Earliest step time after which the trajectory stays within the
  /// convergence distance of E2; NaN unless converged.
  double t_converge;
};

struct BasinOptions {
  double t_max = 400.0;
  double h = 0.01;
  double converge_distance = 1e-2;
  double divergence_limit = 1e9;
  /// 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Integrates every node with constant inputs. Results are in grid order
/// regardless of how many worker threads ran.
std::vector<BasinSample> basin_sample(const ExtendedParams& p, double r, double d,
                                      const PhaseGrid& grid, const BasinOptions& opts = {});

/// CSV `y,z,dy,dz`.
void write_field_csv(std::ostream& os, const std::vector<FieldSample>& field);
/// CSV `y0,z0,label,t_converge`.
void write_basin_csv(std::ostream& os, const std::vector<BasinSample>& basin);

struct PortraitTrace {
  std::vector<Vec2> points;
};

/// 800x600 SVG: field arrows, trajectories and equilibrium markers.
void write_phase_svg(std::ostream& os, const PhaseGrid& grid,
                     const std::vector<FieldSample>& field,
                     const std::vector<PortraitTrace>& traces, const StabilityReport& report,
                     const std::string& title);

}  // namespace invaria::analysis
