#include "sis/pathstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sis {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const Sample& final_sample(const PathRecord& rec) {
    if (rec.samples.empty())
        throw std::invalid_argument("path record has no samples");
    return rec.samples.back();
}

}  // namespace

double running_average(double sum_x, double t) {
    if (!(t > 0.0))
        throw std::invalid_argument("running_average: t must be > 0");
    return sum_x / t;
}

double psi(const PathRecord& rec, const ModelParams& p, double at_t) {
    if (!(at_t > 0.0))
        throw std::invalid_argument("psi: at_t must be > 0");
    const double tol = 1e-9 * std::max(1.0, std::fabs(at_t));
    auto it = std::lower_bound(rec.samples.begin(), rec.samples.end(), at_t - tol,
                               [](const Sample& s, double t) { return s.t < t; });
    if (it == rec.samples.end() || std::fabs(it->t - at_t) > tol)
        throw std::out_of_range("psi: no recorded sample at requested time");
    const double i0 = rec.samples.front().i;
    return ((i0 - it->i) + it->mart_state) / (p.beta * at_t);
}

double slope_endpoint(const PathRecord& rec) {
    const Sample& last = final_sample(rec);
    const Sample& first = rec.samples.front();
    if (!(rec.t_stop > 0.0))
        throw std::invalid_argument("slope_endpoint: t_stop must be > 0");
    if (rec.extinct)
        return (std::log(rec.extinction_eps) - first.log_i) / rec.t_stop;
    return (last.log_i - first.log_i) / rec.t_stop;
}

std::optional<double> slope_regression(const PathRecord& rec) {
    const double t_lo = rec.t_stop / 2.0;
    double st = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (const Sample& s : rec.samples) {
        if (s.t < t_lo) continue;
        st += s.t;
        sy += s.log_i;
        ++n;
    }
    if (n < 10) return std::nullopt;
    const double tbar = st / static_cast<double>(n);
    const double ybar = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (const Sample& s : rec.samples) {
        if (s.t < t_lo) continue;
        const double dtc = s.t - tbar;
        sxx += dtc * dtc;
        sxy += dtc * (s.log_i - ybar);
    }
    if (!(sxx > 0.0)) return std::nullopt;
    return sxy / sxx;
}

SlopeDecomposition slope_decomposition(const PathRecord& rec, const ModelParams& p) {
    const Sample& last = final_sample(rec);
    const Sample& first = rec.samples.front();
    const double t = rec.t_stop;
    if (!(t > 0.0))
        throw std::invalid_argument("slope_decomposition: t_stop must be > 0");

    const double n = p.capacity;
    const double s2 = p.sigma * p.sigma;
    const double kt = (p.mu + p.gamma) / p.beta;
    const double avg_i = last.sum_i / t;
    const double avg_i2 = last.sum_i2 / t;

    SlopeDecomposition d;
    d.constant_term = p.beta * n - p.mu - p.gamma - 0.5 * s2 * n * n;
    d.average_term = (0.5 * s2 * (n + kt) - p.beta) * avg_i;
    // The bracket below is psi(t) written through the integral identity;
    // this form closes the decomposition to rounding error on log-scheme
    // paths, where the same Riemann sums generated the trajectory.
    const double psi_identity = avg_i2 - (n - kt) * avg_i;
    d.psi_term = first.log_i / t + p.sigma * last.mart_log / t - 0.5 * s2 * psi_identity;
    d.total = d.constant_term + d.average_term + d.psi_term;
    d.log_slope = last.log_i / t;
    d.residual_rel =
        std::fabs(d.total - d.log_slope) / std::max(std::fabs(d.log_slope), 1e-15);
    return d;
}

std::optional<double> detect_extinction(const std::vector<Sample>& samples, double eps) {
    for (const Sample& s : samples)
        if (s.i <= eps) return s.t;
    return std::nullopt;
}

double identity_residual(const Sample& s, const ModelParams& p, double i0) {
    if (!(s.t > 0.0))
        throw std::invalid_argument("identity_residual: sample time must be > 0");
    const double kt = (p.mu + p.gamma) / p.beta;
    const double avg_i = s.sum_i / s.t;
    const double avg_i2 = s.sum_i2 / s.t;
    const double rem = ((i0 - s.i) + s.mart_state) / (p.beta * s.t);
    const double rhs = (p.capacity - kt) * avg_i + rem;
    const double scale =
        std::max({std::fabs(avg_i2), std::fabs((p.capacity - kt) * avg_i),
                  std::fabs(rem), 1e-300});
    return std::fabs(avg_i2 - rhs) / scale;
}

double max_identity_residual(const PathRecord& rec, const ModelParams& p) {
    const double i0 = rec.samples.front().i;
    double worst = 0.0;
    for (const Sample& s : rec.samples) {
        if (!(s.t > 0.0)) continue;
        worst = std::max(worst, identity_residual(s, p, i0));
    }
    return worst;
}

double min_hoelder_margin(const PathRecord& rec) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const Sample& s : rec.samples) {
        if (!(s.t > 0.0)) continue;
        const double avg_i = s.sum_i / s.t;
        const double margin = s.sum_i2 / s.t - avg_i * avg_i;
        lowest = std::min(lowest, margin);
    }
    return lowest;
}

void finalize_record(PathRecord& rec, const ModelParams& p) {
    const Sample& last = final_sample(rec);
    rec.slope_endpoint = slope_endpoint(rec);
    const auto reg = slope_regression(rec);
    rec.slope_regression = reg ? *reg : kNan;
    rec.avg_i = last.sum_i / rec.t_stop;
    rec.avg_i2 = last.sum_i2 / rec.t_stop;
    rec.psi = psi(rec, p, rec.t_stop);
    rec.hoelder_margin = rec.avg_i2 - rec.avg_i * rec.avg_i;
    rec.clamp_unreliable =
        rec.n_steps > 0 && rec.clamp_count * 100 > rec.n_steps;
}

PathSummary summarize(const PathRecord& rec, const ModelParams& p) {
    const Sample& last = final_sample(rec);
    PathSummary s;
    s.path_index = rec.path_index;
    s.seed = rec.seed;
    s.extinct = rec.extinct;
    s.t_stop = rec.t_stop;
    s.slope_endpoint = rec.slope_endpoint;
    s.slope_regression = rec.slope_regression;
    s.avg_i = rec.avg_i;
    s.avg_i2 = rec.avg_i2;
    s.psi = rec.psi;
    s.mart_state_over_t = last.mart_state / rec.t_stop;
    s.mart_log_over_t = last.mart_log / rec.t_stop;
    s.mart_term = p.sigma * last.mart_log / rec.t_stop;
    s.clamp_count = rec.clamp_count;
    s.n_steps = rec.n_steps;
    s.clamp_unreliable = rec.clamp_unreliable;
    s.hoelder_margin = rec.hoelder_margin;
    s.min_hoelder_margin = min_hoelder_margin(rec);
    s.max_identity_residual = max_identity_residual(rec, p);
    s.decomp_residual = slope_decomposition(rec, p).residual_rel;
    return s;
}

}  // namespace sis
