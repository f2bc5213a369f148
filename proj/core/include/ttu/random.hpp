#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>

#include "ttu/time.hpp"

namespace ttu {

using Rng = std::mt19937_64;

/// Independent, reproducible engine for one purpose ("stream") of one run.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

namespace delay {

struct Constant {
  Duration value;
};

/// Uniform over the closed interval [lo, hi].
struct Uniform {
  Duration lo;
  Duration hi;
};

/// Normal(mean, stddev), truncated at zero.
struct Gaussian {
  Duration mean;
  Duration stddev;
};

/// Gaussian with probability `outlier_prob` of an additional `outlier_shift`.
struct Contaminated {
  Gaussian base;
  double outlier_prob = 0.0;
  Duration outlier_shift;
};

}  // namespace delay

using DelayModel =
    std::variant<delay::Constant, delay::Uniform, delay::Gaussian, delay::Contaminated>;

/// Draws a non-negative duration from `model`.
Duration sample(const DelayModel& model, Rng& rng);

/// Mean of the model (before truncation at zero).
Duration nominal_mean(const DelayModel& model);

/// Largest value the model can produce, or Duration::max() when unbounded.
Duration upper_bound(const DelayModel& model);

std::string describe(const DelayModel& model);

}  // namespace ttu
