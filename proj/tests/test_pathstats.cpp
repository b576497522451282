#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "sis/pathstats.hpp"
#include "sis/sde.hpp"

using namespace sis;
using namespace sis::testing;

namespace {

// Stationary noise-free record at the endemic level N - (mu+gamma)/beta.
PathRecord stationary_record(double level, double t_end, double dt) {
    PathRecord rec;
    rec.extinction_eps = 1e-8;
    double sum_i = 0.0, sum_i2 = 0.0;
    const auto n = static_cast<std::uint64_t>(std::llround(t_end / dt));
    for (std::uint64_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * dt;
        rec.samples.push_back({t, level, std::log(level), sum_i, sum_i2, 0.0, 0.0});
        sum_i += level * dt;
        sum_i2 += level * level * dt;
    }
    rec.t_stop = static_cast<double>(n) * dt;
    rec.n_steps = n;
    return rec;
}

// Drives n steps of the given stepper and packs every state into a record.
template <typename StepFn>
PathRecord drive_path(const ModelParams& p, double i0, double dt,
                      const std::vector<double>& dws, StepFn step) {
    const ClampBounds bounds = make_bounds(p, 1e-12);
    PathRecord rec;
    rec.extinction_eps = 1e-8;
    StepState st;
    st.i = i0;
    st.log_i = std::log(i0);
    rec.samples.push_back({0.0, st.i, st.log_i, 0, 0, 0, 0});
    for (std::size_t k = 0; k < dws.size(); ++k) {
        st = step(st, p, dt, dws[k], bounds);
        st.t = static_cast<double>(k + 1) * dt;
        rec.samples.push_back(
            {st.t, st.i, std::log(st.i), st.sum_i, st.sum_i2, st.mart_state, st.mart_log});
    }
    rec.t_stop = rec.samples.back().t;
    rec.n_steps = dws.size();
    return rec;
}

}  // namespace

TEST_CASE("running average") {
    CHECK(running_average(120.0, 60.0) == 2.0);
    CHECK(running_average(0.0, 5.0) == 0.0);
    CHECK_THROWS_AS(running_average(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(running_average(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("stationary path: identity holds exactly and psi vanishes") {
    const ModelParams p = params_noise_free();
    // endemic level N - (mu+gamma)/beta = 60 makes both identity sides 3600
    const PathRecord rec = stationary_record(60.0, 10.0, 0.5);
    CHECK(psi(rec, p, 10.0) == 0.0);
    CHECK(max_identity_residual(rec, p) == 0.0);
    CHECK(slope_endpoint(rec) == 0.0);
    CHECK(min_hoelder_margin(rec) == 0.0);
    const auto reg = slope_regression(rec);
    REQUIRE(reg.has_value());
    CHECK(std::fabs(*reg) <= 1e-12);
}

TEST_CASE("psi rejects missing or non-positive times") {
    const ModelParams p = params_noise_free();
    const PathRecord rec = stationary_record(60.0, 10.0, 0.5);
    CHECK_THROWS_AS(psi(rec, p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(psi(rec, p, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(psi(rec, p, 0.7), std::out_of_range);   // between samples
    CHECK_THROWS_AS(psi(rec, p, 11.0), std::out_of_range);  // past the end
    CHECK_NOTHROW(psi(rec, p, 0.5));
}

TEST_CASE("three hand-stepped state-scheme increments") {
    const ModelParams p = params_conjecture();
    const std::vector<double> dws{0.0, 0.02, -0.01};
    const PathRecord rec =
        drive_path(p, 50.0, 0.01, dws,
                   [](const StepState& s, const ModelParams& mp, double dt, double dw,
                      const ClampBounds& b) { return step_em_state(s, mp, dt, dw, b); });

    CHECK(rec.samples[1].i == doctest::Approx(55.0).epsilon(1e-12));
    CHECK(rec.samples[2].i == doctest::Approx(63.195).epsilon(1e-9));
    // left-endpoint sums over the first three states
    CHECK(rec.samples[3].sum_i ==
          doctest::Approx((50.0 + 55.0 + 63.195) * 0.01).epsilon(1e-9));
    // identity closes at every recorded point
    CHECK(max_identity_residual(rec, p) <= 1e-13);
    // psi agrees with its direct definition
    const Sample& last = rec.samples.back();
    const double direct = ((50.0 - last.i) + last.mart_state) / (p.beta * last.t);
    CHECK(psi(rec, p, last.t) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("three hand-stepped log-scheme increments close the decomposition") {
    const ModelParams p = params_conjecture();
    const std::vector<double> dws{0.0, 0.02, -0.01};
    const PathRecord rec =
        drive_path(p, 50.0, 0.01, dws,
                   [](const StepState& s, const ModelParams& mp, double dt, double dw,
                      const ClampBounds& b) { return step_em_log(s, mp, dt, dw, b); });
    CHECK(rec.samples[1].i == doctest::Approx(50.0 * std::exp(-0.05125)).epsilon(1e-9));
    const SlopeDecomposition d = slope_decomposition(rec, p);
    CHECK(d.residual_rel <= 1e-12);
    CHECK(d.total == doctest::Approx(d.log_slope).epsilon(1e-10));
}

TEST_CASE("endpoint slope of exact exponential decay") {
    PathRecord rec;
    rec.extinction_eps = 1e-8;
    for (int k = 0; k <= 40; ++k) {
        const double t = 0.25 * k;
        const double log_i = std::log(50.0) - 0.5 * t;
        rec.samples.push_back({t, std::exp(log_i), log_i, 0, 0, 0, 0});
    }
    rec.t_stop = 10.0;
    rec.n_steps = 40;
    CHECK(slope_endpoint(rec) == doctest::Approx(-0.5).epsilon(1e-12));
    const auto reg = slope_regression(rec);
    REQUIRE(reg.has_value());
    CHECK(*reg == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("extinct paths measure the slope against the threshold") {
    PathRecord rec;
    rec.extinct = true;
    rec.extinction_eps = 1e-8;
    rec.t_stop = 2.0;
    rec.samples.push_back({0.0, 50.0, std::log(50.0), 0, 0, 0, 0});
    rec.samples.push_back({2.0, 5e-9, std::log(5e-9), 100.0, 5000.0, 0, 0});
    rec.n_steps = 2;
    const double expect = (std::log(1e-8) - std::log(50.0)) / 2.0;
    CHECK(slope_endpoint(rec) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("regression slope needs ten usable samples") {
    PathRecord rec;
    rec.extinction_eps = 1e-8;
    for (int k = 0; k <= 8; ++k)
        rec.samples.push_back({0.5 * k, 50.0, std::log(50.0), 0, 0, 0, 0});
    rec.t_stop = 4.0;
    rec.n_steps = 8;
    CHECK_FALSE(slope_regression(rec).has_value());  // 5 samples past t/2
}

TEST_CASE("regression recovers a noisy linear trend") {
    PathRecord rec;
    rec.extinction_eps = 1e-8;
    for (int k = 0; k <= 200; ++k) {
        const double t = 0.1 * k;
        const double log_i = 3.0 - 2.0 * t + 0.01 * std::sin(12.9898 * k);
        rec.samples.push_back({t, std::exp(log_i), log_i, 0, 0, 0, 0});
    }
    rec.t_stop = 20.0;
    rec.n_steps = 200;
    const auto reg = slope_regression(rec);
    REQUIRE(reg.has_value());
    CHECK(*reg == doctest::Approx(-2.0).epsilon(0.005));
}

TEST_CASE("detect_extinction finds the first crossing") {
    std::vector<Sample> samples;
    const double is[5] = {50.0, 30.0, 10.0, 0.5, 0.2};
    for (int k = 0; k < 5; ++k)
        samples.push_back({1.0 * k, is[k], std::log(is[k]), 0, 0, 0, 0});
    auto hit = detect_extinction(samples, 1.0);
    REQUIRE(hit.has_value());
    CHECK(*hit == 3.0);
    CHECK_FALSE(detect_extinction(samples, 0.1).has_value());
    // threshold above the initial value trips at the first sample
    auto immediate = detect_extinction(samples, 100.0);
    REQUIRE(immediate.has_value());
    CHECK(*immediate == 0.0);
}

TEST_CASE("identity residual detects a corrupted accumulator") {
    const ModelParams p = params_noise_free();
    PathRecord rec = stationary_record(60.0, 10.0, 0.5);
    CHECK(max_identity_residual(rec, p) == 0.0);
    rec.samples.back().mart_state += 1.0;
    CHECK(max_identity_residual(rec, p) > 1e-6);
}

TEST_CASE("summarize copies the derived quantities") {
    const ModelParams p = params_conjecture();
    SchemeConfig cfg;
    cfg.scheme = Scheme::EulerMaruyamaState;
    cfg.dt = 1e-3;
    cfg.t_end = 5.0;
    const PathRecord rec = simulate_path(p, cfg, 17, 4);
    const PathSummary s = summarize(rec, p);
    CHECK(s.path_index == 4);
    CHECK(s.seed == 17);
    CHECK(s.t_stop == rec.t_stop);
    CHECK(s.slope_endpoint == rec.slope_endpoint);
    CHECK(s.avg_i == rec.avg_i);
    CHECK(s.psi == rec.psi);
    CHECK(s.mart_term == doctest::Approx(p.sigma * s.mart_log_over_t).epsilon(1e-15));
    CHECK(s.n_steps == rec.n_steps);
    CHECK(s.max_identity_residual <= 1e-10);
    CHECK(s.min_hoelder_margin >= -1e-9 * 100.0 * 100.0);
    // functional purity: a second pass gives identical numbers
    const PathSummary s2 = summarize(rec, p);
    CHECK(s.decomp_residual == s2.decomp_residual);
    CHECK(s.max_identity_residual == s2.max_identity_residual);
}
