#include "invaria/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "invaria/error.hpp"

namespace invaria {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double held_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t k) noexcept {
  const std::uint64_t key = splitmix64(splitmix64(seed ^ splitmix64(stream)) + k);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(key >> 11) + 0.5) * kScale;
  const double u2 = (static_cast<double>(splitmix64(key) >> 11) + 0.5) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Schedule::Schedule(std::vector<Segment> segments, std::uint64_t seed, double sample_dt,
                   std::uint64_t stream)
    : segments_(std::move(segments)), seed_(seed), sample_dt_(sample_dt), stream_(stream) {
  if (segments_.empty()) throw InvalidArgument("schedule needs at least one segment");
  if (!(sample_dt_ > 0.0) || !std::isfinite(sample_dt_)) {
    throw InvalidArgument("schedule sample_dt must be positive");
  }
  if (segments_.front().t_start != 0.0) throw InvalidArgument("schedule must start at t=0");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    std::ostringstream where;
    where << "schedule segment " << i << ": ";
    if (!(s.t_start < s.t_end)) throw InvalidArgument(where.str() + "t_start must be < t_end");
    if (!std::isfinite(s.base)) throw InvalidArgument(where.str() + "base must be finite");
    if (!(s.noise_std >= 0.0) || !std::isfinite(s.noise_std)) {
      throw InvalidArgument(where.str() + "noise_std must be finite and >= 0");
    }
    if (i + 1 < segments_.size() && s.t_end != segments_[i + 1].t_start) {
      throw InvalidArgument(where.str() + "segments must be contiguous");
    }
  }
}

Schedule Schedule::constant(double value) {
  return Schedule({{0.0, std::numeric_limits<double>::infinity(), value, 0.0}});
}

double Schedule::sample(double t) const {
  if (!(t >= 0.0) || t > horizon()) {
    std::ostringstream os;
    os << "schedule sampled at t=" << t << " outside [0, " << horizon() << "]";
    throw InvalidArgument(os.str());
  }
  // Half-open segments, except the last which also owns its end point.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.t_end; });
  if (it == segments_.end()) --it;
  if (it->noise_std == 0.0) return it->base;
  const auto k = static_cast<std::uint64_t>(std::floor(t / sample_dt_));
  return it->base + it->noise_std * held_normal(seed_, stream_, k);
}

Schedule paper_schedule_r(std::uint64_t seed) {
  return Schedule(
      {
          {0.0, 50.0, 11.0, 0.0},
          {50.0, 150.0, 16.0, 1.0},
          {150.0, 300.0, 11.0, 0.0},
          {300.0, 350.0, 13.75, 1.0},
          {350.0, 400.0, 13.75, 0.0},
      },
      seed, Schedule::kDefaultSampleDt, /*stream=*/0);
}

Schedule paper_schedule_d(std::uint64_t seed) {
  return Schedule(
      {
          {0.0, 200.0, 0.01, 0.0},
          {200.0, 300.0, 2.5, 1.0},
          {300.0, 350.0, 5.0, 1.0},
          {350.0, 400.0, 5.0, 0.0},
      },
      seed, Schedule::kDefaultSampleDt, /*stream=*/1);
}

Drive Drive::constant(const InputSample& in) {
  return {Schedule::constant(in.r), Schedule::constant(in.d), Schedule::constant(in.u)};
}

Drive Drive::paper(std::uint64_t seed) {
  return {paper_schedule_r(seed), paper_schedule_d(seed), Schedule::constant(0.0)};
}

double Drive::horizon() const noexcept {
  return std::min({r.horizon(), d.horizon(), u.horizon()});
}

}  // namespace invaria
