#pragma once

// Piecewise step-like input signals with optional held Gaussian excitation.
//
// Noise is counter-based: the draw for hold window k = floor(t / sample_dt)
// is a pure function of (seed, stream, k). No generator state is shared, so
// sampling is reentrant and independent of call order.
//
// Algorithm: key = splitmix64(splitmix64(seed ^ splitmix64(stream)) + k);
// two 53-bit uniforms u1 = ((key >> 11) + 0.5) * 2^-53 and u2 likewise from
// splitmix64(key); n = sqrt(-2 ln u1) * cos(2 pi u2) (Box-Muller).

#include <cstdint>
#include <limits>
#include <vector>

#include "invaria/model.hpp"

namespace invaria {

struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  double base = 0.0;
  double noise_std = 0.0;
};

class Schedule {
 public:
  static constexpr double kDefaultSampleDt = 0.5;

  /// Segments must be non-empty, start at t=0, be contiguous and each have
  /// t_start < t_end, finite base and noise_std >= 0.
  Schedule(std::vector<Segment> segments, std::uint64_t seed = 0, double sample_dt = kDefaultSampleDt,
           std::uint64_t stream = 0);

  /// Noise-free value on [0, +inf).
  static Schedule constant(double value);

  double sample(double t) const;

  /// End of the last segment (may be +inf).
  double horizon() const noexcept { return segments_.back().t_end; }

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  double sample_dt() const noexcept { return sample_dt_; }

 private:
  std::vector<Segment> segments_;
  std::uint64_t seed_;
  double sample_dt_;
  std::uint64_t stream_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Standard-normal draw for hold window `k`.
double held_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t k) noexcept;

/// Reference used by the numerical experiments over [0, 400]:
///   [0,50] 11 | [50,150] 16 + N(0,1) | [150,300] 11 | [300,350] 13.75 + N(0,1) | [350,400] 13.75
Schedule paper_schedule_r(std::uint64_t seed);

/// Disturbance used by the numerical experiments over [0, 400]:
///   [0,200] 0.01 | [200,300] 2.5 + N(0,1) | [300,350] 5 + N(0,1) | [350,400] 5
Schedule paper_schedule_d(std::uint64_t seed);

/// The r, d and u signals that drive a model.
struct Drive {
  Schedule r = Schedule::constant(0.0);
  Schedule d = Schedule::constant(0.0);
  Schedule u = Schedule::constant(0.0);

  static Drive constant(const InputSample& in);
  static Drive paper(std::uint64_t seed);

  InputSample at(double t) const { return {r.sample(t), d.sample(t), u.sample(t)}; }
  double horizon() const noexcept;
};

}  // namespace invaria
