#include "invaria/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "invaria/csv.hpp"
#include "invaria/error.hpp"

namespace invaria {

std::vector<double> Trajectory::component(std::size_t i) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.at(i));
  return out;
}

Rk4Stepper::Rk4Stepper(const SystemModel& model)
    : model_(model),
      k1_(model.dimension()),
      k2_(model.dimension()),
      k3_(model.dimension()),
      k4_(model.dimension()),
      tmp_(model.dimension()) {}

void Rk4Stepper::step(double t, double h, std::span<double> x, const Drive& drive) {
  const std::size_t n = x.size();
  const double half = 0.5 * h;
  const InputSample in0 = drive.at(t);
  const InputSample in_mid = drive.at(t + half);
  const InputSample in1 = drive.at(t + h);

  model_.rhs(t, x, in0, k1_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + half * k1_[i];
  model_.rhs(t + half, tmp_, in_mid, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + half * k2_[i];
  model_.rhs(t + half, tmp_, in_mid, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * k3_[i];
  model_.rhs(t + h, tmp_, in1, k4_);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] += (h / 6.0) * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }
}

namespace {

std::size_t step_count(double t_end, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("step size h must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive");
  const double ratio = t_end / h;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "t_end=" << t_end << " is not a whole number of steps of h=" << h;
    throw InvalidArgument(os.str());
  }
  return static_cast<std::size_t>(n);
}

std::vector<double> select_inputs(const SystemModel& model, const InputSample& in) {
  std::vector<double> out;
  for (const auto& name : model.input_names()) {
    if (name == "r") out.push_back(in.r);
    else if (name == "d") out.push_back(in.d);
    else out.push_back(in.u);
  }
  return out;
}

void check_state(std::span<const double> x, double t, double limit) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite state at t=" << t;
      throw NumericError(os.str());
    }
    if (std::abs(v) > limit) {
      std::ostringstream os;
      os << "state diverged (|x| > " << limit << ") at t=" << t;
      throw DivergenceError(os.str(), t);
    }
  }
}

}  // namespace

Trajectory integrate(const SystemModel& model, std::span<const double> x0, const Drive& drive,
                     const IntegratorOptions& opts, std::uint64_t seed) {
  if (x0.size() != model.dimension()) {
    throw InvalidArgument("initial state has " + std::to_string(x0.size()) +
                          " components, model " + model.name() + " needs " +
                          std::to_string(model.dimension()));
  }
  if (opts.decimate == 0) throw InvalidArgument("decimate must be >= 1");
  const std::size_t n_steps = step_count(opts.t_end, opts.h);
  if (drive.horizon() < opts.t_end) {
    std::ostringstream os;
    os << "input schedules end at t=" << drive.horizon() << " before t_end=" << opts.t_end;
    throw InvalidArgument(os.str());
  }
  check_state(x0, 0.0, opts.divergence_limit);

  Trajectory traj;
  traj.input_names = model.input_names();
  traj.state_names = model.state_names();
  traj.meta = {model.name(), model.params(), seed, opts.h, opts.decimate};
  const std::size_t rows = n_steps / opts.decimate + 2;
  traj.times.reserve(rows);
  traj.states.reserve(rows);
  traj.inputs.reserve(rows);

  auto record = [&](double t, std::span<const double> x) {
    traj.times.push_back(t);
    traj.states.emplace_back(x.begin(), x.end());
    traj.inputs.push_back(select_inputs(model, drive.at(t)));
    if (!traj.first_negative_time && !negative_components(x).empty()) {
      traj.first_negative_time = t;
    }
  };

  State x(x0.begin(), x0.end());
  Rk4Stepper stepper(model);
  record(0.0, x);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * opts.h;
    stepper.step(t, opts.h, x, drive);
    const double t_next = static_cast<double>(k + 1) * opts.h;
    check_state(x, t_next, opts.divergence_limit);
    if ((k + 1) % opts.decimate == 0 || k + 1 == n_steps) record(t_next, x);
  }
  return traj;
}

SettleResult settle(const SystemModel& model, std::span<const double> x0, const InputSample& in,
                    double tol, double t_max, double h) {
  if (!(tol > 0.0)) throw InvalidArgument("settle tolerance must be positive");
  if (!(h > 0.0)) throw InvalidArgument("step size h must be positive");
  if (x0.size() != model.dimension()) throw InvalidArgument("initial state dimension mismatch");

  const Drive drive = Drive::constant(in);
  Rk4Stepper stepper(model);
  SettleResult out;
  out.state.assign(x0.begin(), x0.end());
  State dx(model.dimension());
  for (;;) {
    const double t = static_cast<double>(out.steps) * h;
    model.rhs(t, out.state, in, dx);
    out.residual = 0.0;
    for (double v : dx) out.residual = std::max(out.residual, std::abs(v));
    out.t = t;
    if (out.residual < tol) return out;
    if (t >= t_max) {
      std::ostringstream os;
      os << "did not settle within t_max=" << t_max << " (final ||rhs||_inf=" << out.residual
         << ")";
      throw NoSettleError(os.str(), out.residual);
    }
    stepper.step(t, h, out.state, drive);
    ++out.steps;
    check_state(out.state, t + h, 1e9);
  }
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << 't';
  for (const auto& n : traj.input_names) os << ',' << n;
  for (const auto& n : traj.state_names) os << ',' << n;
  os << '\n';
  std::vector<double> row;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    row.clear();
    row.push_back(traj.times[i]);
    row.insert(row.end(), traj.inputs[i].begin(), traj.inputs[i].end());
    row.insert(row.end(), traj.states[i].begin(), traj.states[i].end());
    csv::write_row(os, row);
  }
}

}  // namespace invaria
