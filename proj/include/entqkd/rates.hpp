#pragma once

namespace entqkd::rates {

struct KeyRateInput {
    double qber;    // in [0, 1/2]
    double bell_s;  // in [0, 2*sqrt(2)], with 1e-12 numerical headroom
    void validate() const;
};

struct KeyRateResult {
    double rate;  // bits per channel use; may be negative
    bool secure;  // rate > 0
};

// h(q) = -(1-q) log2(1-q) - q log2(q), with 0 log 0 = 0 at both endpoints.
double binary_entropy(double q);

// Devetak-Winter bound for DI-QKD: 1 - h(Q) - h((1 + sqrt((S/2)^2 - 1))/2).
// Below the classical bound S <= 2 the square root turns imaginary; the
// Eve-information term is then pinned to h(1/2) = 1, which is continuous at
// S = 2 and encodes "no security without a Bell violation".
KeyRateResult di_key_rate(const KeyRateInput& in);

// Devetak-Winter bound for entanglement-based BB84 on a symmetric channel:
// 1 - 2 h(Q).
KeyRateResult bb84_key_rate(double qber);

// QBER at which the BB84 rate crosses zero (~0.110028), by bisection.
double bb84_qber_threshold();

}  // namespace entqkd::rates
