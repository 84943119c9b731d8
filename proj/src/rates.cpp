#include "entqkd/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "entqkd/types.hpp"

namespace entqkd::rates {

double binary_entropy(double q) {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::domain_error("binary_entropy: q must lie in [0, 1] (got " +
                                std::to_string(q) + ")");
    if (q == 0.0 || q == 1.0) return 0.0;
    return -(1.0 - q) * std::log2(1.0 - q) - q * std::log2(q);
}

void KeyRateInput::validate() const {
    if (!(qber >= 0.0 && qber <= 0.5))
        throw std::domain_error("key rate: qber must lie in [0, 1/2] (got " +
                                std::to_string(qber) + ")");
    if (!(bell_s >= 0.0 && bell_s <= two_sqrt2 + 1e-12))
        throw std::domain_error(
            "key rate: bell_s must lie in [0, 2*sqrt(2)] (got " +
            std::to_string(bell_s) + ")");
}

KeyRateResult di_key_rate(const KeyRateInput& in) {
    in.validate();
    double eve_term = 1.0;  // no Bell violation: Eve unconstrained
    if (in.bell_s > 2.0) {
        const double half = in.bell_s / 2.0;
        const double arg = (1.0 + std::sqrt(half * half - 1.0)) / 2.0;
        eve_term = binary_entropy(std::min(arg, 1.0));
    }
    const double r = 1.0 - binary_entropy(in.qber) - eve_term;
    return {r, r > 0.0};
}

KeyRateResult bb84_key_rate(double qber) {
    if (!(qber >= 0.0 && qber <= 0.5))
        throw std::domain_error(
            "bb84_key_rate: qber must lie in [0, 1/2] (got " +
            std::to_string(qber) + ")");
    const double r = 1.0 - 2.0 * binary_entropy(qber);
    return {r, r > 0.0};
}

double bb84_qber_threshold() {
    double lo = 0.0, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bb84_key_rate(mid).rate > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace entqkd::rates
