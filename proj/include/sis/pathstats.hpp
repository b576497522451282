#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sis/model.hpp"

// Per-path records and the functionals computed from them: endpoint and
// regression log-slopes, running time-averages, the stochastic remainder
// psi, the left-endpoint integral identity, and the exact decomposition of
// log I(t)/t into constant + average + remainder terms.

namespace sis {

// One recorded point. sum_i and sum_i2 are left-endpoint Riemann sums of I
// and I^2 up to time t; mart_state accumulates sigma*(N-I_k)*I_k*dW_k and
// mart_log accumulates (N-I_k)*dW_k (no sigma factor), both discrete
// martingales in the step index.
struct Sample {
    double t;
    double i;
    double log_i;
    double sum_i;
    double sum_i2;
    double mart_state;
    double mart_log;
};

struct PathRecord {
    std::uint64_t params_hash = 0;  // FNV-1a over params, scheme config, seed, index
    std::vector<Sample> samples;    // samples.front() is the t = 0 state
    bool extinct = false;
    double t_stop = 0.0;
    std::uint64_t clamp_count = 0;
    std::uint64_t n_steps = 0;      // steps actually taken
    std::uint64_t seed = 0;
    std::uint32_t path_index = 0;
    double extinction_eps = 0.0;    // resolved threshold; 0 means disabled

    // Derived at the end of a simulation (finalize_record).
    double slope_endpoint = 0.0;
    double slope_regression = 0.0;  // NaN when too few usable samples
    double avg_i = 0.0;             // <I(t_stop)>
    double avg_i2 = 0.0;            // <I^2(t_stop)>
    double psi = 0.0;               // remainder at t_stop
    double hoelder_margin = 0.0;    // <I^2> - <I>^2 at t_stop
    bool clamp_unreliable = false;  // clamps exceeded 1% of steps
};

// Flat per-path summary used for aggregation and reporting.
struct PathSummary {
    std::uint32_t path_index = 0;
    std::uint64_t seed = 0;
    bool extinct = false;
    double t_stop = 0.0;
    double slope_endpoint = 0.0;
    double slope_regression = 0.0;  // NaN when unavailable
    double avg_i = 0.0;
    double avg_i2 = 0.0;
    double psi = 0.0;
    double mart_state_over_t = 0.0;
    double mart_log_over_t = 0.0;
    double mart_term = 0.0;         // sigma * mart_log / t_stop, the remainder martingale
    std::uint64_t clamp_count = 0;
    std::uint64_t n_steps = 0;
    bool clamp_unreliable = false;
    double hoelder_margin = 0.0;
    double min_hoelder_margin = 0.0;      // min over recorded samples with t > 0
    double max_identity_residual = 0.0;   // max relative residual over samples with t > 0
    double decomp_residual = 0.0;         // relative decomposition closure error
};

// sum_x / t. Throws std::invalid_argument when t <= 0.
double running_average(double sum_x, double t);

// Remainder of the time-average identity at a recorded time:
//   psi(t) = (I(0) - I(t))/(beta t) + mart_state(t)/(beta t).
// Throws std::out_of_range when no sample was recorded at at_t (tolerance
// 1e-9 in t), std::invalid_argument when at_t <= 0.
double psi(const PathRecord& rec, const ModelParams& p, double at_t);

// log(I(t_stop)/I(0)) / t_stop; for extinct paths the stopped value is the
// extinction threshold, so log(eps/I(0)) / t_stop.
double slope_endpoint(const PathRecord& rec);

// OLS slope of log I over recorded samples with t >= t_stop/2. Requires at
// least 10 such samples, otherwise nullopt.
std::optional<double> slope_regression(const PathRecord& rec);

// Terms of the pathwise identity
//   log I(t)/t = T1 + T2*<I> + Psi(t),
//   T1 = beta*N - mu - gamma - sigma^2 N^2/2,
//   T2 = (sigma^2/2)(N + (mu+gamma)/beta) - beta,
//   Psi = log I(0)/t + sigma*mart_log/t - (sigma^2/2)*[<I^2> - (N - (mu+gamma)/beta)<I>].
// The bracket equals psi(t) by the integral identity, so the closure is exact
// in exact arithmetic; residual_rel measures the floating-point gap against
// the realized endpoint log-slope.
struct SlopeDecomposition {
    double constant_term = 0.0;
    double average_term = 0.0;
    double psi_term = 0.0;
    double total = 0.0;
    double log_slope = 0.0;   // log I(t_stop) / t_stop
    double residual_rel = 0.0;
};

SlopeDecomposition slope_decomposition(const PathRecord& rec, const ModelParams& p);

// First recorded time with I <= eps, or nullopt if the path never crossed.
std::optional<double> detect_extinction(const std::vector<Sample>& samples, double eps);

// Relative residual of <I^2> = (N - (mu+gamma)/beta)<I> + psi at one sample
// (requires s.t > 0). i0 is the path's initial value.
double identity_residual(const Sample& s, const ModelParams& p, double i0);

// Max of identity_residual over recorded samples with t > 0.
double max_identity_residual(const PathRecord& rec, const ModelParams& p);

// Min over recorded samples with t > 0 of <I^2> - <I>^2 (Cauchy-Schwarz
// says this is >= 0 up to rounding).
double min_hoelder_margin(const PathRecord& rec);

// Fills the derived fields of rec from its samples.
void finalize_record(PathRecord& rec, const ModelParams& p);

PathSummary summarize(const PathRecord& rec, const ModelParams& p);

}  // namespace sis
