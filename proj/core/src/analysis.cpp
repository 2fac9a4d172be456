#include "invaria/analysis.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "invaria/csv.hpp"
#include "invaria/error.hpp"
#include "invaria/integrate.hpp"
#include "invaria/signals.hpp"
#include "parallel.hpp"

namespace invaria::analysis {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Saddle: return "saddle";
    case Classification::StableNode: return "stable-node";
    case Classification::StableSpiral: return "stable-spiral";
    case Classification::UnstableNode: return "unstable-node";
    case Classification::UnstableSpiral: return "unstable-spiral";
    case Classification::Degenerate: return "degenerate";
  }
  return "unknown";
}

std::string_view to_string(BasinLabel label) {
  switch (label) {
    case BasinLabel::ConvergedE2: return "converged-to-E2";
    case BasinLabel::Diverged: return "diverged";
    case BasinLabel::Undecided: return "undecided";
  }
  return "unknown";
}

Matrix2 jacobian(const ExtendedParams& p, const Vec2& yz, double r) {
  const auto [y, z] = yz;
  return {p.b() - p.s() * z, p.s() * (p.l() * r - y), p.c() * z, -p.c() * (r - y)};
}

EigenPair eigen2_from_trace_det(double tau, double delta) {
  const double disc = tau * tau - 4.0 * delta;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double big = tau >= 0.0 ? 0.5 * (tau + root) : 0.5 * (tau - root);
    const double small = big != 0.0 ? delta / big : 0.0;
    return {Complex(std::max(big, small)), Complex(std::min(big, small))};
  }
  const double re = 0.5 * tau;
  const double im = 0.5 * std::sqrt(-disc);
  return {Complex(re, im), Complex(re, -im)};
}

EigenPair eigen2(const Matrix2& m) { return eigen2_from_trace_det(m.trace(), m.det()); }

Classification classify(const EigenPair& eigs, double re_tol) {
  if (!(re_tol > 0.0)) throw InvalidArgument("re_tol must be positive");
  const double re1 = eigs[0].real(), re2 = eigs[1].real();
  if (std::abs(re1) <= re_tol || std::abs(re2) <= re_tol) return Classification::Degenerate;
  const bool complex_pair = eigs[0].imag() != 0.0 || eigs[1].imag() != 0.0;
  if (complex_pair) return re1 < 0.0 ? Classification::StableSpiral : Classification::UnstableSpiral;
  if ((re1 > 0.0) != (re2 > 0.0)) return Classification::Saddle;
  return re1 < 0.0 ? Classification::StableNode : Classification::UnstableNode;
}

int discriminant_case(double tau, double delta) {
  const double disc = tau * tau - 4.0 * delta;
  if (std::abs(disc) <= 1e-12) return 1;
  return disc < 0.0 ? 2 : 3;
}

StabilityReport equilibria(const ExtendedParams& p, double r, double d, double re_tol) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("reference r must be positive");
  if (!std::isfinite(d)) throw InvalidArgument("disturbance d must be finite");

  auto make = [&](EquilibriumKind kind, Vec2 point, EigenPair eigs) {
    const Matrix2 j = jacobian(p, point, r);
    Equilibrium e{kind, point, eigs, classify(eigs, re_tol), j.trace(), j.det(), 0};
    e.discriminant_case = discriminant_case(e.tau, e.delta);
    return e;
  };

  const Vec2 p1{-d / p.b(), 0.0};
  const double lam_b = p.b();
  const double lam_c = -p.c() * (d + p.b() * r) / p.b();
  const EigenPair e1_eigs{Complex(std::max(lam_b, lam_c)), Complex(std::min(lam_b, lam_c))};

  const Vec2 p2{r, (d + p.b() * r) / (p.s() * r * (1.0 - p.l()))};
  const EigenPair e2_eigs = eigen2(jacobian(p, p2, r));

  return {make(EquilibriumKind::E1, p1, e1_eigs), make(EquilibriumKind::E2, p2, e2_eigs), p, r, d};
}

double GridAxis::at(std::size_t i) const noexcept {
  if (count <= 1) return lo;
  if (i + 1 == count) return hi;
  return lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(count - 1);
}

namespace {

void validate(const PhaseGrid& g) {
  for (const GridAxis* a : {&g.y, &g.z}) {
    if (a->count == 0) throw InvalidArgument("grid axis needs at least one node");
    if (!std::isfinite(a->lo) || !std::isfinite(a->hi) || a->hi < a->lo) {
      throw InvalidArgument("grid axis range must be finite with lo <= hi");
    }
  }
}

}  // namespace

std::vector<FieldSample> vector_field(const ExtendedParams& p, double r, double d,
                                      const PhaseGrid& grid) {
  validate(grid);
  std::vector<FieldSample> out;
  out.reserve(grid.y.count * grid.z.count);
  for (std::size_t i = 0; i < grid.y.count; ++i) {
    for (std::size_t j = 0; j < grid.z.count; ++j) {
      const double y = grid.y.at(i), z = grid.z.at(j);
      const Vec2 f = rhs_extended({y, z}, r, d, p);
      const double mag = std::hypot(f[0], f[1]);
      const double ny = mag > 0.0 ? f[0] / mag : 0.0;
      const double nz = mag > 0.0 ? f[1] / mag : 0.0;
      out.push_back({y, z, f[0], f[1], mag, ny, nz});
    }
  }
  return out;
}

std::vector<BasinSample> basin_sample(const ExtendedParams& p, double r, double d,
                                      const PhaseGrid& grid, const BasinOptions& opts) {
  validate(grid);
  if (!(opts.h > 0.0) || !(opts.t_max > 0.0)) throw InvalidArgument("basin h and t_max must be positive");
  const StabilityReport report = equilibria(p, r, d);
  const Vec2 e2 = report.e2.point;
  const auto n_steps = static_cast<std::size_t>(std::llround(opts.t_max / opts.h));
  // Deep inside the linear regime of the (locally asymptotically stable) E2
  // the outcome can no longer change, so the run stops early.
  const double settled = opts.converge_distance * 1e-4;

  const std::size_t nz = grid.z.count;
  std::vector<BasinSample> out(grid.y.count * nz);
  const SystemModel model = make_extended2(p);
  const Drive drive = Drive::constant({r, d, 0.0});

  detail::parallel_for(out.size(), opts.threads, [&](std::size_t idx) {
    const double y0 = grid.y.at(idx / nz), z0 = grid.z.at(idx % nz);
    BasinSample s{y0, z0, BasinLabel::Undecided, std::numeric_limits<double>::quiet_NaN()};
    Rk4Stepper stepper(model);
    State x{y0, z0};
    auto dist = [&] { return std::hypot(x[0] - e2[0], x[1] - e2[1]); };
    // Time of the last step that ended outside the convergence ball; < 0 if none.
    double t_outside = dist() < opts.converge_distance ? -1.0 : 0.0;
    try {
      for (std::size_t k = 0; k < n_steps; ++k) {
        if (dist() < settled) break;
        stepper.step(static_cast<double>(k) * opts.h, opts.h, x, drive);
        if (std::abs(x[0]) > opts.divergence_limit || std::abs(x[1]) > opts.divergence_limit ||
            !std::isfinite(x[0]) || !std::isfinite(x[1])) {
          s.label = BasinLabel::Diverged;
          out[idx] = s;
          return;
        }
        if (dist() >= opts.converge_distance) t_outside = static_cast<double>(k + 1) * opts.h;
      }
    } catch (const NumericError&) {
      s.label = BasinLabel::Diverged;
      out[idx] = s;
      return;
    }
    if (dist() < opts.converge_distance) {
      s.label = BasinLabel::ConvergedE2;
      s.t_converge = t_outside < 0.0 ? 0.0 : t_outside + opts.h;
    }
    out[idx] = s;
  });
  return out;
}

void write_field_csv(std::ostream& os, const std::vector<FieldSample>& field) {
  csv::write_header(os, {"y", "z", "dy", "dz"});
  for (const auto& f : field) csv::write_row(os, {f.y, f.z, f.dy, f.dz});
}

void write_basin_csv(std::ostream& os, const std::vector<BasinSample>& basin) {
  csv::write_header(os, {"y0", "z0", "label", "t_converge"});
  for (const auto& b : basin) {
    os << csv::format(b.y0) << ',' << csv::format(b.z0) << ',' << to_string(b.label) << ',';
    if (!std::isnan(b.t_converge)) os << csv::format(b.t_converge);
    os << '\n';
  }
}

}  // namespace invaria::analysis
