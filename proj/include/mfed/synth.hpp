#pragma once

// Synthetic wrist traces with planted motions, for tests, demos and the
// end-to-end harness.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mfed/signal.hpp"

namespace mfed::synth {

enum class Motion { EatingGesture, Distractor };

/// Per-person motion style. Eating: X dips while Y swings positive and Z
/// swings through a rotation. Distractor: same X dip, Y and Z mirrored.
struct Person {
  double depth = 6.0;  // m/s^2 at the bottom of the X dip
  double width = 0.45; // s, Gaussian sigma
  double tilt = 1.0;   // scales the Y/Z swing
};

struct PlantedMotion {
  Seconds t = 0.0;
  Motion kind = Motion::EatingGesture;
};

struct TraceSpec {
  Seconds duration = 60.0;
  double rate = 25.0;
  double noise_sd = 0.15;
  std::uint64_t seed = 1;
};

/// Motion contribution at offset u seconds from the motion center, scaled
/// by `amp`.
AccelSample motion_shape(Motion kind, const Person& person, double u, double amp = 1.0);

/// Gaussian noise plus every planted motion. Each motion's amplitude and
/// width jitter by up to +-15% per motion.
AccelSeries make_trace(const TraceSpec& spec, const std::vector<PlantedMotion>& motions, const Person& person = {});

/// All-zero trace with the given noise level.
AccelSeries flat_trace(Seconds duration, double rate = 25.0, double noise_sd = 0.0, std::uint64_t seed = 1);

/// `count` eating gestures from `start`, spaced `spacing` apart.
std::vector<PlantedMotion> meal(Seconds start, int count, Seconds spacing);

/// `count` isolated motions of one kind placed `spacing` apart from `start`.
std::vector<PlantedMotion> evenly_spaced(Seconds start, int count, Seconds spacing, Motion kind);

/// A rows x 3 window centered (with up to +-0.3 s jitter) on one motion, or
/// pure noise when `kind` is empty.
GestureWindow make_window(const std::optional<Motion>& kind, const Person& person, std::size_t rows, double rate,
                          double noise_sd, std::mt19937_64& rng);

/// Person styles for leave-one-person-out experiments.
std::vector<Person> people(int count, std::uint64_t seed);

}  // namespace mfed::synth
