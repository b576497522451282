#pragma once

#include <cstdint>

#include "sis/model.hpp"
#include "sis/pathstats.hpp"

// Fixed-step schemes for the SIS SDE. All three keep the state inside
// (0, N) by clamping proposals to [clamp_eps*N, (1-clamp_eps)*N]; a clamped
// step charges its displacement to the martingale accumulators (an
// effective Brownian increment), so the discrete integral identities stay
// exact across boundary events.

namespace sis {

enum class Scheme {
    EulerMaruyamaState,  // Euler-Maruyama on I
    EulerMaruyamaLog,    // Euler-Maruyama on log I (positivity structural)
    Milstein,            // EM on I plus the (1/2) b b' (dW^2 - dt) correction
};

const char* to_string(Scheme s);

struct SchemeConfig {
    Scheme scheme = Scheme::EulerMaruyamaLog;
    double dt = 1e-3;
    double t_end = 0.0;             // required > dt
    double clamp_eps = 1e-12;       // clamp bounds are [eps*N, (1-eps)*N]
    double extinction_eps = -1.0;   // stop when I <= this; < 0 resolves to
                                    // 1e-10*N, 0 disables stopping
    std::uint64_t record_stride = 0;  // in steps; 0 picks <= 10000 samples
};

// Throws std::invalid_argument naming the violated constraint.
void validate(const SchemeConfig& cfg);

// Resolved extinction threshold for a given population size.
double resolve_extinction_eps(const SchemeConfig& cfg, const ModelParams& p);

// Running state of one path. t is maintained by the driver as
// step_index * dt (multiplicatively, so no additive drift); step functions
// update everything else. log_i is the authoritative state for the log
// scheme and is refreshed only at record time for the others. Accumulators
// use the pre-step (left endpoint) state.
struct StepState {
    double t = 0.0;
    double i = 0.0;
    double log_i = 0.0;
    double mart_state = 0.0;  // sum of sigma*(N-I_k)*I_k*dW_k
    double mart_log = 0.0;    // sum of (N-I_k)*dW_k
    double sum_i = 0.0;       // sum of I_k*dt
    double sum_i2 = 0.0;      // sum of I_k^2*dt
    std::uint64_t clamp_count = 0;
};

struct ClampBounds {
    double lo;
    double hi;
};

inline ClampBounds make_bounds(const ModelParams& p, double clamp_eps) {
    return {clamp_eps * p.capacity, (1.0 - clamp_eps) * p.capacity};
}

// One Euler-Maruyama step on I: proposal I + a*dt + b*dW, clamped into
// [lo, hi]. On a clamp the whole displacement beyond the drift is treated
// as the realized noise increment.
inline StepState step_em_state(const StepState& s, const ModelParams& p, double dt,
                               double dW, const ClampBounds& bounds) {
    const double a = drift(s.i, p);
    const double b = diffusion(s.i, p);
    double next = s.i + a * dt + b * dW;
    double mart_inc = b * dW;
    double dw_eff = dW;
    StepState ns = s;
    if (next < bounds.lo) {
        next = bounds.lo;
        mart_inc = (next - s.i) - a * dt;
        if (b != 0.0) dw_eff = mart_inc / b;
        ++ns.clamp_count;
    } else if (next > bounds.hi) {
        next = bounds.hi;
        mart_inc = (next - s.i) - a * dt;
        if (b != 0.0) dw_eff = mart_inc / b;
        ++ns.clamp_count;
    }
    ns.sum_i = s.sum_i + s.i * dt;
    ns.sum_i2 = s.sum_i2 + s.i * s.i * dt;
    ns.mart_state = s.mart_state + mart_inc;
    ns.mart_log = s.mart_log + (p.capacity - s.i) * dw_eff;
    ns.i = next;
    return ns;
}

// One Euler-Maruyama step on y = log I with the Ito drift; I = exp(y) is
// positive by construction and only the upper bound can clamp.
inline StepState step_em_log(const StepState& s, const ModelParams& p, double dt,
                             double dW, const ClampBounds& bounds) {
    const double lam = log_drift(s.i, p);
    const double c = p.sigma * (p.capacity - s.i);
    double y = s.log_i + lam * dt + c * dW;
    double next = std::exp(y);
    double mart_log_inc = (p.capacity - s.i) * dW;
    double dw_eff = dW;
    StepState ns = s;
    if (next >= p.capacity) {
        y = std::log(bounds.hi);
        next = bounds.hi;
        if (p.sigma > 0.0) {
            mart_log_inc = (y - s.log_i - lam * dt) / p.sigma;
            dw_eff = mart_log_inc / (p.capacity - s.i);
        }
        ++ns.clamp_count;
    }
    ns.sum_i = s.sum_i + s.i * dt;
    ns.sum_i2 = s.sum_i2 + s.i * s.i * dt;
    ns.mart_state = s.mart_state + diffusion(s.i, p) * dw_eff;
    ns.mart_log = s.mart_log + mart_log_inc;
    ns.i = next;
    ns.log_i = y;
    return ns;
}

// One Milstein step on I: EM plus (1/2) b b' (dW^2 - dt) with
// b'(I) = sigma*(N - 2I).
inline StepState step_milstein(const StepState& s, const ModelParams& p, double dt,
                               double dW, const ClampBounds& bounds) {
    const double a = drift(s.i, p);
    const double b = diffusion(s.i, p);
    const double bp = p.sigma * (p.capacity - 2.0 * s.i);
    const double corr = 0.5 * b * bp * (dW * dW - dt);
    double next = s.i + a * dt + b * dW + corr;
    // The correction is a discretization term, not realized noise, so it
    // stays out of the accumulator; the state identity then carries an
    // O(dt) residual under this scheme.
    double mart_inc = b * dW;
    double dw_eff = dW;
    StepState ns = s;
    if (next < bounds.lo) {
        next = bounds.lo;
        mart_inc = (next - s.i) - a * dt;
        if (b != 0.0) dw_eff = mart_inc / b;
        ++ns.clamp_count;
    } else if (next > bounds.hi) {
        next = bounds.hi;
        mart_inc = (next - s.i) - a * dt;
        if (b != 0.0) dw_eff = mart_inc / b;
        ++ns.clamp_count;
    }
    ns.sum_i = s.sum_i + s.i * dt;
    ns.sum_i2 = s.sum_i2 + s.i * s.i * dt;
    ns.mart_state = s.mart_state + mart_inc;
    ns.mart_log = s.mart_log + (p.capacity - s.i) * dw_eff;
    ns.i = next;
    return ns;
}

// Simulates one path. The noise stream is keyed by (seed, path_index), so
// distinct indices can never share draws. Records ceil(n_steps/stride)
// samples plus the initial and final states; stops early at the extinction
// threshold when one is active.
PathRecord simulate_path(const ModelParams& p, const SchemeConfig& cfg,
                         std::uint64_t seed, std::uint32_t path_index = 0);

}  // namespace sis
