#include "mfed/synth.hpp"

#include <algorithm>
#include <cmath>

namespace mfed::synth {

AccelSample motion_shape(Motion kind, const Person& person, double u, double amp) {
  const double z = u / person.width;
  const double g = std::exp(-0.5 * z * z);
  const double sign = kind == Motion::EatingGesture ? 1.0 : -1.0;
  AccelSample s;
  s.ax = -amp * person.depth * g;
  s.ay = sign * amp * person.tilt * 2.0 * g;
  s.az = sign * amp * person.tilt * 1.5 * z * g;
  return s;
}

AccelSeries make_trace(const TraceSpec& spec, const std::vector<PlantedMotion>& motions, const Person& person) {
  std::mt19937_64 rng(spec.seed);
  AccelSeries s = flat_trace(spec.duration, spec.rate, spec.noise_sd, rng());
  std::uniform_real_distribution<double> jitter(0.85, 1.15);
  for (const auto& m : motions) {
    Person p = person;
    p.width *= jitter(rng);
    const double amp = jitter(rng);
    const double reach = 5.0 * p.width;
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil((m.t - reach) * spec.rate));
    const auto hi = static_cast<std::ptrdiff_t>(std::floor((m.t + reach) * spec.rate));
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(lo, 0);
         i <= hi && i < static_cast<std::ptrdiff_t>(s.samples.size()); ++i) {
      auto& x = s.samples[static_cast<std::size_t>(i)];
      const AccelSample d = motion_shape(m.kind, p, x.t - m.t, amp);
      x.ax += d.ax;
      x.ay += d.ay;
      x.az += d.az;
    }
  }
  return s;
}

AccelSeries flat_trace(Seconds duration, double rate, double noise_sd, std::uint64_t seed) {
  AccelSeries s;
  s.rate = rate;
  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  s.samples.resize(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sd > 0 ? noise_sd : 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& x = s.samples[i];
    x.t = static_cast<double>(i) / rate;
    if (noise_sd > 0) {
      x.ax = noise(rng);
      x.ay = noise(rng);
      x.az = noise(rng);
    }
  }
  return s;
}

std::vector<PlantedMotion> meal(Seconds start, int count, Seconds spacing) {
  return evenly_spaced(start, count, spacing, Motion::EatingGesture);
}

std::vector<PlantedMotion> evenly_spaced(Seconds start, int count, Seconds spacing, Motion kind) {
  std::vector<PlantedMotion> out;
  for (int i = 0; i < count; ++i) out.push_back({start + i * spacing, kind});
  return out;
}

GestureWindow make_window(const std::optional<Motion>& kind, const Person& person, std::size_t rows, double rate,
                          double noise_sd, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, noise_sd > 0 ? noise_sd : 1.0);
  auto noise = [&](std::mt19937_64& g) { return noise_sd > 0 ? gauss(g) : 0.0; };
  std::uniform_real_distribution<double> jitter(0.85, 1.15);
  std::uniform_real_distribution<double> shift(-0.3, 0.3);
  Person p = person;
  p.width *= jitter(rng);
  const double amp = jitter(rng);
  const double center = static_cast<double>(rows / 2) / rate + shift(rng);

  GestureWindow w;
  w.rows = rows;
  w.samples.resize(rows * 3);
  for (std::size_t r = 0; r < rows; ++r) {
    AccelSample d;
    if (kind) d = motion_shape(*kind, p, static_cast<double>(r) / rate - center, amp);
    w.samples[r * 3 + 0] = d.ax + noise(rng);
    w.samples[r * 3 + 1] = d.ay + noise(rng);
    w.samples[r * 3 + 2] = d.az + noise(rng);
  }
  w.poi.index = rows / 2;
  w.poi.t = static_cast<double>(rows / 2) / rate;
  w.poi.ax_value = w.at(rows / 2, 0);
  return w;
}

std::vector<Person> people(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> depth(4.5, 7.5);
  std::uniform_real_distribution<double> width(0.35, 0.6);
  std::uniform_real_distribution<double> tilt(0.7, 1.3);
  std::vector<Person> out;
  for (int i = 0; i < count; ++i) out.push_back({depth(rng), width(rng), tilt(rng)});
  return out;
}

}  // namespace mfed::synth
