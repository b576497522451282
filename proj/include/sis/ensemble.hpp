#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sis/pathstats.hpp"
#include "sis/sde.hpp"

// Ensembles of independent paths and their summary statistics. Path j runs
// on the noise stream keyed by (base_seed, j), so reports are bit-identical
// for any worker count: the work split never touches the draws, and
// aggregation always proceeds in path-index order.

namespace sis {

struct EnsembleConfig {
    std::uint32_t n_paths = 1;
    std::uint64_t base_seed = 0;
    std::uint32_t max_workers = 0;  // 0 picks the hardware thread count
};

void validate(const EnsembleConfig& cfg);

struct EnsembleReport {
    RegimeReport regime;
    Scheme scheme = Scheme::EulerMaruyamaLog;
    std::uint32_t n_paths = 0;
    double extinct_fraction = 0.0;
    double slope_mean = 0.0;
    double slope_stderr = 0.0;
    std::array<double, 5> slope_quantiles{};  // 5%, 25%, 50%, 75%, 95%
    double avg_i_mean = 0.0;
    double mart_mean = 0.0;    // mean of sigma*mart_log/t_stop across paths
    double mart_stderr = 0.0;
    double max_identity_residual = 0.0;
    std::vector<PathSummary> per_path;
};

// Linear-interpolation quantile of an already sorted vector, q in [0, 1].
double quantile(const std::vector<double>& sorted, double q);

// Sorts summaries by path index and fills the statistics fields. The
// caller sets regime and scheme. Throws std::invalid_argument when empty.
EnsembleReport aggregate(std::vector<PathSummary> summaries);

EnsembleReport run_ensemble(const ModelParams& p, const SchemeConfig& cfg,
                            const EnsembleConfig& ens);

}  // namespace sis
