#include "sis/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sis {

namespace {

[[noreturn]] void reject(const std::string& what) {
    throw std::invalid_argument("model params: " + what);
}

}  // namespace

const char* to_string(TheoremCase c) {
    return c == TheoremCase::CaseI ? "CaseI" : "CaseII";
}

void validate(const ModelParams& p) {
    if (!(std::isfinite(p.beta) && std::isfinite(p.gamma) && std::isfinite(p.mu)
          && std::isfinite(p.sigma) && std::isfinite(p.capacity) && std::isfinite(p.i0)))
        reject("all fields must be finite");
    if (!(p.beta > 0.0)) reject("beta must be > 0");
    if (!(p.gamma > 0.0)) reject("gamma must be > 0");
    if (!(p.mu > 0.0)) reject("mu must be > 0");
    if (!(p.sigma >= 0.0)) reject("sigma must be >= 0");
    if (!(p.capacity > 0.0)) reject("capacity must be > 0");
    if (!(p.i0 > 0.0 && p.i0 < p.capacity)) reject("i0 must lie strictly in (0, capacity)");
}

RegimeReport classify(const ModelParams& p) {
    validate(p);

    const double n = p.capacity;
    const double removal = p.mu + p.gamma;
    const double s2 = p.sigma * p.sigma;
    const double kt = removal / p.beta;  // deterministic endemic threshold N - K

    RegimeReport r;
    r.r0s = r0s(p);
    r.deterministic = (p.sigma == 0.0);
    r.critical = (r.r0s == 1.0);
    r.persistence = (r.r0s > 1.0);

    const bool subcritical = (r.r0s < 1.0);
    r.cond_13i = subcritical && (s2 <= p.beta / n);
    r.cond_13ii = (s2 > p.beta / n) && (s2 > p.beta * p.beta / (2.0 * removal));
    r.conjecture_region =
        subcritical && (s2 > p.beta / n) && (s2 <= p.beta * p.beta / (2.0 * removal));

    // Case split for the extinction rate bound: Case I needs either
    // (sigma^2/2)*(N + (mu+gamma)/beta) <= beta or N <= (mu+gamma)/beta,
    // and then the rate is (mu+gamma)*(r0s - 1); otherwise the rate is
    // -(sigma^2/2)*((mu+gamma)/beta)^2.
    const bool case1 = (0.5 * s2 * (n + kt) <= p.beta) || (n <= kt);
    if (case1) {
        r.theorem_case = TheoremCase::CaseI;
        r.rate_bound = removal * (r.r0s - 1.0);
    } else {
        r.theorem_case = TheoremCase::CaseII;
        r.rate_bound = -0.5 * s2 * kt * kt;
    }

    // Time-average bound: <I> -> 0 when N <= (mu+gamma)/beta, else
    // lim sup <I> <= N - (mu+gamma)/beta.
    r.average_bound = (n <= kt) ? 0.0 : n - kt;

    return r;
}

}  // namespace sis
