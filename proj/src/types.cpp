#include "entqkd/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace entqkd {

void DetectorModel::validate() const {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("eta must lie in [0, 1] (got " +
                                    std::to_string(eta) + ")");
    if (!(nu >= 0.0))
        throw std::invalid_argument("nu must be >= 0 (got " +
                                    std::to_string(nu) + ")");
}

void AnalyzerSettings::validate() const {
    if (!std::isfinite(theta_a) || !std::isfinite(theta_b))
        throw std::invalid_argument("analyzer angles must be finite");
}

void QuantumDot::validate() const {
    if (!(survival >= 0.0 && survival <= 1.0))
        throw std::invalid_argument("p must lie in [0, 1] (got " +
                                    std::to_string(survival) + ")");
    if (!std::isfinite(fss_phase))
        throw std::invalid_argument("fss must be finite");
}

void Spdc::validate() const {
    if (!(xi > 0.0) || !std::isfinite(xi))
        throw std::invalid_argument("xi must be > 0 (got " +
                                    std::to_string(xi) + ")");
    if (!(tail_bound > 0.0))
        throw std::invalid_argument("truncation tail bound must be > 0");
    if (max_pairs == 0 || max_pairs < -1)
        throw std::invalid_argument("max_pairs must be >= 1 (or -1 for auto)");
}

void MeasurementPlan::validate() const {
    for (double t : {theta_a1, theta_a2, theta_b1, theta_b2, theta_a0})
        if (!std::isfinite(t))
            throw std::invalid_argument("measurement angles must be finite");
}

double spdc_tail_weight(double xi, int max_pairs) {
    // sum_{k>n} (k+1) x^k = x^{n+1} ((n+2) - (n+1) x) / (1-x)^2, x = tanh^2 xi
    const double t = std::tanh(xi);
    const double x = t * t;
    const double n = max_pairs;
    const double head = std::pow(x, n + 1.0) * ((n + 2.0) - (n + 1.0) * x);
    const double sech2 = 1.0 - x;  // 1/cosh^2 = 1 - tanh^2
    return head / ((1.0 - x) * (1.0 - x)) * sech2;
}

int spdc_pair_cutoff(double xi, double bound) {
    if (!(bound > 0.0)) throw std::invalid_argument("tail bound must be > 0");
    for (int n = 1; n < 100000; ++n)
        if (spdc_tail_weight(xi, n) < bound) return n;
    throw std::invalid_argument(
        "no feasible truncation for xi = " + std::to_string(xi) +
        " at tail bound " + std::to_string(bound));
}

double OutcomeDistribution::sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
}

void OutcomeDistribution::validate() {
    for (double& p : probs) {
        if (p < -1e-10)
            throw std::runtime_error(
                "outcome probability below -1e-10; backend bug (got " +
                std::to_string(p) + ")");
        if (p < 0.0) p = 0.0;
    }
    const double s = sum();
    if (std::abs(s - 1.0) > 1e-10)
        throw std::runtime_error("outcome probabilities sum to " +
                                 std::to_string(s) + ", expected 1");
}

}  // namespace entqkd
