#include "entqkd/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "entqkd/fock.hpp"
#include "entqkd/gaussian.hpp"
#include "entqkd/rates.hpp"

namespace entqkd::metrics {

namespace {

bool is_spdc(const SourceModel& s) { return std::holds_alternative<Spdc>(s); }

}  // namespace

OutcomeDistribution outcome_distribution(const SourceModel& source,
                                         const AnalyzerSettings& s,
                                         const DetectorModel& det,
                                         Backend backend) {
    if (backend == Backend::automatic)
        backend = is_spdc(source) ? Backend::gaussian : Backend::fock;
    if (backend == Backend::gaussian) {
        if (!is_spdc(source))
            throw std::domain_error(
                "the gaussian backend only handles spdc sources");
        return gaussian::outcome_distribution(std::get<Spdc>(source).xi, s,
                                              det);
    }
    return fock::outcome_distribution(fock::make_source_state(source), s, det);
}

double correlation(const LogicalDistribution& L) {
    const double sam = L.tt + L.rr;
    const double diff = L.tr + L.rt;
    const double total = sam + diff;
    if (total == 0.0)
        throw std::domain_error("correlation of an all-zero distribution");
    return (sam - diff) / total;
}

namespace {

double binned_correlation(const SourceModel& source, const DetectorModel& det,
                          double theta_a, double theta_b,
                          binning::Strategy strategy, Backend backend) {
    const auto dist =
        outcome_distribution(source, {theta_a, theta_b}, det, backend);
    return correlation(binning::bin(dist, strategy));
}

}  // namespace

double bell_parameter(const SourceModel& source, const DetectorModel& det,
                      const MeasurementPlan& plan, binning::Strategy strategy,
                      Backend backend) {
    plan.validate();
    const double e11 = binned_correlation(source, det, plan.theta_a1,
                                          plan.theta_b1, strategy, backend);
    const double e12 = binned_correlation(source, det, plan.theta_a1,
                                          plan.theta_b2, strategy, backend);
    const double e21 = binned_correlation(source, det, plan.theta_a2,
                                          plan.theta_b1, strategy, backend);
    const double e22 = binned_correlation(source, det, plan.theta_a2,
                                          plan.theta_b2, strategy, backend);
    return std::abs(e11 + e12 - e21 + e22);
}

double qber_di_from(const OutcomeDistribution& key_basis,
                    binning::Strategy strategy) {
    const auto L = binning::bin(key_basis, strategy);
    return L.tr + L.rt;
}

double qber_di(const SourceModel& source, const DetectorModel& det,
               const MeasurementPlan& plan, binning::Strategy strategy,
               Backend backend) {
    plan.validate();
    const auto dist = outcome_distribution(
        source, {plan.theta_a0, plan.theta_b1}, det, backend);
    return qber_di_from(dist, strategy);
}

double qber_bb84_from(const OutcomeDistribution& key_basis) {
    const auto& probs = key_basis.probs;
    const double sam = probs[pattern_index(true, false, true, false)] +
                       probs[pattern_index(false, true, false, true)];
    const double diff = probs[pattern_index(true, false, false, true)] +
                        probs[pattern_index(false, true, true, false)];
    const double total = sam + diff;
    if (total <= 0.0)
        throw std::domain_error(
            "qber_bb84: no conclusive coincidence events (eta = 0 and "
            "nu = 0?)");
    return diff / total;
}

double qber_bb84(const SourceModel& source, const DetectorModel& det,
                 const MeasurementPlan& plan, Backend backend) {
    plan.validate();
    const auto dist = outcome_distribution(
        source, {plan.theta_a0, plan.theta_b1}, det, backend);
    return qber_bb84_from(dist);
}

MetricsReport compute_metrics(const SourceModel& source,
                              const DetectorModel& det,
                              const MeasurementPlan& plan,
                              binning::Strategy strategy, Backend backend) {
    plan.validate();
    MetricsReport r{};
    r.correlations[0] = binned_correlation(source, det, plan.theta_a1,
                                           plan.theta_b1, strategy, backend);
    r.correlations[1] = binned_correlation(source, det, plan.theta_a1,
                                           plan.theta_b2, strategy, backend);
    r.correlations[2] = binned_correlation(source, det, plan.theta_a2,
                                           plan.theta_b1, strategy, backend);
    r.correlations[3] = binned_correlation(source, det, plan.theta_a2,
                                           plan.theta_b2, strategy, backend);
    r.bell_s = std::abs(r.correlations[0] + r.correlations[1] -
                        r.correlations[2] + r.correlations[3]);
    const auto key_basis = outcome_distribution(
        source, {plan.theta_a0, plan.theta_b1}, det, backend);
    r.qber_di = qber_di_from(key_basis, strategy);
    r.qber_bb84 = qber_bb84_from(key_basis);
    for (double e : r.correlations)
        if (std::abs(e) > 1.0 + 1e-9)
            throw std::runtime_error("correlation outside [-1, 1]");
    if (r.bell_s > 4.0 + 1e-9)
        throw std::runtime_error("bell parameter above the algebraic bound 4");
    return r;
}

SecurityThresholds di_security_thresholds(double fss_phase) {
    const double kappa = std::sqrt(2.0) * (1.0 + std::cos(fss_phase));
    const auto rate = [kappa](double q) {
        return rates::di_key_rate({q, std::min(kappa * (1.0 - 2.0 * q),
                                               two_sqrt2)})
            .rate;
    };
    if (!(rate(0.0) > 0.0))
        throw std::domain_error(
            "no secure regime along the QD family at this FSS phase");
    double lo = 0.0, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (rate(mid) > 0.0 ? lo : hi) = mid;
    }
    const double q = 0.5 * (lo + hi);
    return {q, kappa * (1.0 - 2.0 * q)};
}

}  // namespace entqkd::metrics
