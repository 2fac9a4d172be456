#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invaria/model.hpp"
#include "invaria/signals.hpp"

namespace invaria {

struct IntegratorOptions {
  double h = 0.01;
  double t_end = 400.0;
  /// Record every `decimate`-th step (the final step is always recorded).
  std::size_t decimate = 10;
  /// Any |state component| above this aborts with DivergenceError.
  double divergence_limit = 1e9;
};

struct TrajectoryMeta {
  std::string model;
  expr::Bindings params;
  std::uint64_t seed = 0;
  double h = 0.0;
  std::size_t decimate = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  /// Per row, one value per entry of `input_names`.
  std::vector<std::vector<double>> inputs;
  std::vector<std::string> input_names;
  std::vector<std::string> state_names;
  TrajectoryMeta meta;
  /// First recorded time at which a state component was negative.
  std::optional<double> first_negative_time;

  std::size_t size() const noexcept { return times.size(); }
  /// Column `i` of the state over all rows.
  std::vector<double> component(std::size_t i) const;
};

/// Classical fixed-step RK4. Stage inputs come from the drive sampled at the
/// stage times t, t+h/2, t+h.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(const SystemModel& model);

  /// Advances x in place from t to t + h.
  void step(double t, double h, std::span<double> x, const Drive& drive);

 private:
  const SystemModel& model_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// Throws InvalidArgument for bad options or a drive shorter than t_end,
/// DivergenceError when the guard trips and NumericError on non-finite rhs.
Trajectory integrate(const SystemModel& model, std::span<const double> x0, const Drive& drive,
                     const IntegratorOptions& opts, std::uint64_t seed = 0);

struct SettleResult {
  State state;
  double t = 0.0;
  std::size_t steps = 0;
  double residual = 0.0;  // ||rhs||_inf at `state`
};

/// Integrates with constant inputs until ||rhs||_inf < tol. Throws
/// NoSettleError (carrying the final residual) if t_max is reached first.
SettleResult settle(const SystemModel& model, std::span<const double> x0, const InputSample& in,
                    double tol, double t_max, double h = 0.01);

/// Header `t,<inputs>,<states>`; 17 significant digits; '\n' line endings.
void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace invaria
