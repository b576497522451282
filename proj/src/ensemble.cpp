#include "sis/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace sis {

namespace {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Sample mean and standard error (n-1 denominator); stderr is 0 for n == 1.
MeanStderr mean_stderr(const std::vector<double>& xs) {
    const auto n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace

void validate(const EnsembleConfig& cfg) {
    if (cfg.n_paths < 1)
        throw std::invalid_argument("ensemble config: n_paths must be >= 1");
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty())
        throw std::invalid_argument("quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("quantile: q must lie in [0, 1]");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double w = h - static_cast<double>(lo);
    return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

EnsembleReport aggregate(std::vector<PathSummary> summaries) {
    if (summaries.empty())
        throw std::invalid_argument("aggregate: no path summaries");
    std::sort(summaries.begin(), summaries.end(),
              [](const PathSummary& a, const PathSummary& b) {
                  return a.path_index < b.path_index;
              });

    EnsembleReport rep;
    rep.n_paths = static_cast<std::uint32_t>(summaries.size());

    std::vector<double> slopes, avgs, marts;
    slopes.reserve(summaries.size());
    avgs.reserve(summaries.size());
    marts.reserve(summaries.size());
    std::size_t n_extinct = 0;
    double worst_identity = 0.0;
    for (const PathSummary& s : summaries) {
        slopes.push_back(s.slope_endpoint);
        avgs.push_back(s.avg_i);
        marts.push_back(s.mart_term);
        if (s.extinct) ++n_extinct;
        worst_identity = std::max(worst_identity, s.max_identity_residual);
    }

    rep.extinct_fraction =
        static_cast<double>(n_extinct) / static_cast<double>(summaries.size());
    const MeanStderr sl = mean_stderr(slopes);
    rep.slope_mean = sl.mean;
    rep.slope_stderr = sl.stderr_;
    std::vector<double> sorted = slopes;
    std::sort(sorted.begin(), sorted.end());
    const double qs[5] = {0.05, 0.25, 0.50, 0.75, 0.95};
    for (int k = 0; k < 5; ++k) rep.slope_quantiles[k] = quantile(sorted, qs[k]);
    rep.avg_i_mean = mean_stderr(avgs).mean;
    const MeanStderr mt = mean_stderr(marts);
    rep.mart_mean = mt.mean;
    rep.mart_stderr = mt.stderr_;
    rep.max_identity_residual = worst_identity;
    rep.per_path = std::move(summaries);
    return rep;
}

EnsembleReport run_ensemble(const ModelParams& p, const SchemeConfig& cfg,
                            const EnsembleConfig& ens) {
    const RegimeReport regime = classify(p);  // validates p
    validate(cfg);
    validate(ens);

    std::vector<PathSummary> summaries(ens.n_paths);
    std::uint32_t workers = ens.max_workers > 0 ? ens.max_workers
                                                : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min(workers, ens.n_paths);

    std::atomic<std::uint32_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            const std::uint32_t j = next.fetch_add(1);
            if (j >= ens.n_paths || failed.load()) return;
            try {
                const PathRecord rec = simulate_path(p, cfg, ens.base_seed, j);
                summaries[j] = summarize(rec, p);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    EnsembleReport rep = aggregate(std::move(summaries));
    rep.regime = regime;
    rep.scheme = cfg.scheme;
    return rep;
}

}  // namespace sis
