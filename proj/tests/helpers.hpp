#pragma once

#include <cmath>

#include "sis/model.hpp"

// Shared parameter sets. All use N = 100, mu = gamma = 20, i0 = 50; they
// differ in where beta and sigma put the threshold value. Sigma is derived
// from sigma^2 with sqrt so these match CLI runs passing --sigma2.

namespace sis::testing {

// sigma^2 = 0.0121: threshold just below 1, conjecture region, Case I,
// rate bound -0.5.
inline ModelParams params_conjecture() {
    return {1.0, 20.0, 20.0, std::sqrt(0.0121), 100.0, 50.0};
}

// sigma^2 = 0.02: threshold 0, heavy noise, Case II, rate bound -16.
inline ModelParams params_heavy_noise() {
    return {1.0, 20.0, 20.0, std::sqrt(0.02), 100.0, 50.0};
}

// sigma = 0.03: threshold 2.3875, persistent, average bound 60.
inline ModelParams params_persistent() {
    return {1.0, 20.0, 20.0, 0.03, 100.0, 50.0};
}

// beta = 0.3, sigma = 0.05: threshold 0.4375 with N below the endemic
// level, so the time-average vanishes.
inline ModelParams params_vanishing() {
    return {0.3, 20.0, 20.0, 0.05, 100.0, 50.0};
}

// Noise-free logistic case, threshold 2.5.
inline ModelParams params_noise_free() {
    return {1.0, 20.0, 20.0, 0.0, 100.0, 50.0};
}

}  // namespace sis::testing
