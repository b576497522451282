#pragma once

#include <cmath>
#include <string>

// Scalar SIS epidemic SDE on the interval (0, N):
//
//   dI = [(beta*N - mu - gamma)*I - beta*I^2] dt + sigma*(N - I)*I dB
//
// S = N - I is implied by the constant-population identity and is never
// simulated separately. All state is in absolute individuals.

namespace sis {

struct ModelParams {
    double beta;      // transmission coefficient, 1/(individual*time)
    double gamma;     // cure rate, 1/time
    double mu;        // per-capita death rate, 1/time
    double sigma;     // noise intensity, 1/(individual*sqrt(time))
    double capacity;  // total population N, individuals
    double i0;        // initial infected I(0), individuals, in (0, N)
};

// Throws std::invalid_argument naming the violated constraint.
void validate(const ModelParams& p);

enum class TheoremCase { CaseI, CaseII };

const char* to_string(TheoremCase c);

// Regime classification: threshold value, extinction/persistence flags and
// the analytic rate / time-average bounds they imply.
struct RegimeReport {
    double r0s = 0.0;               // beta*N/(mu+gamma) - sigma^2*N^2/(2(mu+gamma))
    bool cond_13i = false;          // r0s < 1 and sigma^2 <= beta/N
    bool cond_13ii = false;         // sigma^2 > max(beta/N, beta^2/(2(mu+gamma)))
    bool conjecture_region = false; // r0s < 1 and beta/N < sigma^2 <= beta^2/(2(mu+gamma))
    bool persistence = false;       // r0s > 1
    TheoremCase theorem_case = TheoremCase::CaseI;
    double rate_bound = 0.0;        // a.s. upper bound on lim sup log I(t)/t, 1/time
    double average_bound = 0.0;     // a.s. upper bound on lim sup <I(t)>, individuals
    bool deterministic = false;     // sigma == 0
    bool critical = false;          // r0s == 1 exactly; no analytic conclusion applies
};

// Drift a(I) = (beta*N - mu - gamma)*I - beta*I^2. Defined for all real i;
// callers restrict to [0, N].
inline double drift(double i, const ModelParams& p) {
    return (p.beta * p.capacity - p.mu - p.gamma) * i - p.beta * i * i;
}

// Diffusion b(I) = sigma*(N - I)*I.
inline double diffusion(double i, const ModelParams& p) {
    return p.sigma * (p.capacity - i) * i;
}

// Drift of log I from the Ito formula:
//   beta*N - mu - gamma - beta*I - (sigma^2/2)*(N - I)^2
inline double log_drift(double i, const ModelParams& p) {
    const double ni = p.capacity - i;
    return p.beta * p.capacity - p.mu - p.gamma - p.beta * i
           - 0.5 * p.sigma * p.sigma * ni * ni;
}

// Same quantity with the square expanded; kept for cross-checking the
// algebra in tests.
inline double log_drift_expanded(double i, const ModelParams& p) {
    const double s2 = p.sigma * p.sigma;
    const double n = p.capacity;
    return p.beta * n - p.mu - p.gamma - 0.5 * s2 * n * n
           + (s2 * n - p.beta) * i - 0.5 * s2 * i * i;
}

// Threshold value separating extinction (< 1) from persistence (> 1).
inline double r0s(const ModelParams& p) {
    const double n = p.capacity;
    const double removal = p.mu + p.gamma;
    return p.beta * n / removal - p.sigma * p.sigma * n * n / (2.0 * removal);
}

// Validates p and fills every RegimeReport field.
RegimeReport classify(const ModelParams& p);

}  // namespace sis
