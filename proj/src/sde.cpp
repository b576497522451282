#include "sis/sde.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "sis/rng.hpp"

namespace sis {

namespace {

[[noreturn]] void reject(const std::string& what) {
    throw std::invalid_argument("scheme config: " + what);
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
        h ^= bytes[k];
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t fnv1a_double(std::uint64_t h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return fnv1a(h, &bits, sizeof bits);
}

std::uint64_t config_hash(const ModelParams& p, const SchemeConfig& cfg,
                          double eps, std::uint64_t stride, std::uint64_t seed,
                          std::uint32_t path_index) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (double v : {p.beta, p.gamma, p.mu, p.sigma, p.capacity, p.i0, cfg.dt,
                     cfg.t_end, cfg.clamp_eps, eps})
        h = fnv1a_double(h, v);
    const std::uint64_t tag[3] = {static_cast<std::uint64_t>(cfg.scheme), stride, seed};
    h = fnv1a(h, tag, sizeof tag);
    h = fnv1a(h, &path_index, sizeof path_index);
    return h;
}

Sample make_sample(const StepState& s, Scheme scheme) {
    const double log_i =
        scheme == Scheme::EulerMaruyamaLog ? s.log_i : std::log(s.i);
    return {s.t, s.i, log_i, s.sum_i, s.sum_i2, s.mart_state, s.mart_log};
}

template <typename StepFn>
void run_loop(StepState& st, std::vector<Sample>& samples, PathRecord& rec,
              const ModelParams& p, const SchemeConfig& cfg, double eps,
              std::uint64_t n_steps, std::uint64_t stride, PathRng& rng,
              const ClampBounds& bounds, StepFn step) {
    const double dt = cfg.dt;
    for (std::uint64_t k = 1; k <= n_steps; ++k) {
        const double dW = brownian_increment(rng, dt);
        st = step(st, p, dt, dW, bounds);
        st.t = static_cast<double>(k) * dt;
        if (eps > 0.0 && st.i <= eps) {
            rec.extinct = true;
            rec.n_steps = k;
            samples.push_back(make_sample(st, cfg.scheme));
            return;
        }
        if (k % stride == 0 || k == n_steps)
            samples.push_back(make_sample(st, cfg.scheme));
    }
    rec.n_steps = n_steps;
}

}  // namespace

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::EulerMaruyamaState: return "em-state";
        case Scheme::EulerMaruyamaLog: return "em-log";
        case Scheme::Milstein: return "milstein";
    }
    return "unknown";
}

void validate(const SchemeConfig& cfg) {
    if (!(std::isfinite(cfg.dt) && cfg.dt > 0.0)) reject("dt must be > 0");
    if (!(std::isfinite(cfg.t_end) && cfg.t_end > 0.0)) reject("t_end must be > 0");
    if (!(cfg.dt < cfg.t_end)) reject("dt must be < t_end");
    if (!(cfg.clamp_eps > 0.0 && cfg.clamp_eps < 1e-3))
        reject("clamp_eps must lie in (0, 1e-3)");
    if (cfg.extinction_eps >= 0.0 && !std::isfinite(cfg.extinction_eps))
        reject("extinction_eps must be finite");
}

double resolve_extinction_eps(const SchemeConfig& cfg, const ModelParams& p) {
    return cfg.extinction_eps < 0.0 ? 1e-10 * p.capacity : cfg.extinction_eps;
}

PathRecord simulate_path(const ModelParams& p, const SchemeConfig& cfg,
                         std::uint64_t seed, std::uint32_t path_index) {
    validate(p);
    validate(cfg);
    const double eps = resolve_extinction_eps(cfg, p);
    if (eps >= p.i0)
        throw std::invalid_argument("scheme config: extinction_eps must be < i0");

    const auto n_steps =
        static_cast<std::uint64_t>(std::llround(cfg.t_end / cfg.dt));
    if (n_steps < 1) reject("t_end/dt rounds to zero steps");
    const std::uint64_t stride =
        cfg.record_stride > 0 ? cfg.record_stride : std::max<std::uint64_t>(1, (n_steps + 9999) / 10000);

    PathRecord rec;
    rec.seed = seed;
    rec.path_index = path_index;
    rec.extinction_eps = eps;
    rec.params_hash = config_hash(p, cfg, eps, stride, seed, path_index);
    rec.samples.reserve(n_steps / stride + 2);

    StepState st;
    st.i = p.i0;
    st.log_i = std::log(p.i0);
    rec.samples.push_back(make_sample(st, cfg.scheme));

    PathRng rng(seed, path_index);
    const ClampBounds bounds = make_bounds(p, cfg.clamp_eps);
    switch (cfg.scheme) {
        case Scheme::EulerMaruyamaState:
            run_loop(st, rec.samples, rec, p, cfg, eps, n_steps, stride, rng, bounds,
                     [](const StepState& s, const ModelParams& mp, double dt, double dW,
                        const ClampBounds& b) { return step_em_state(s, mp, dt, dW, b); });
            break;
        case Scheme::EulerMaruyamaLog:
            run_loop(st, rec.samples, rec, p, cfg, eps, n_steps, stride, rng, bounds,
                     [](const StepState& s, const ModelParams& mp, double dt, double dW,
                        const ClampBounds& b) { return step_em_log(s, mp, dt, dW, b); });
            break;
        case Scheme::Milstein:
            run_loop(st, rec.samples, rec, p, cfg, eps, n_steps, stride, rng, bounds,
                     [](const StepState& s, const ModelParams& mp, double dt, double dW,
                        const ClampBounds& b) { return step_milstein(s, mp, dt, dW, b); });
            break;
    }

    rec.t_stop = static_cast<double>(rec.n_steps) * cfg.dt;
    rec.clamp_count = st.clamp_count;
    finalize_record(rec, p);
    return rec;
}

}  // namespace sis
