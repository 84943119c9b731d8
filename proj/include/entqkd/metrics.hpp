#pragma once

#include "entqkd/binning.hpp"
#include "entqkd/types.hpp"

namespace entqkd::metrics {

// Which engine evaluates the click statistics. `automatic` routes SPDC
// sources through the Gaussian engine (exact, no truncation) and everything
// else through the Fock engine.
enum class Backend { automatic, fock, gaussian };

struct MetricsReport {
    double bell_s;
    double qber_di;
    double qber_bb84;
    // E(a1,b1), E(a1,b2), E(a2,b1), E(a2,b2)
    std::array<double, 4> correlations;
};

OutcomeDistribution outcome_distribution(const SourceModel& source,
                                         const AnalyzerSettings& s,
                                         const DetectorModel& det,
                                         Backend backend = Backend::automatic);

// E = (P_sam - P_diff) / (P_sam + P_diff); the denominator is 1 for binned
// inputs. Throws on a zero total.
double correlation(const LogicalDistribution& L);

// S = |E(a1,b1) + E(a1,b2) - E(a2,b1) + E(a2,b2)| through the chosen backend
// and binning strategy.
double bell_parameter(const SourceModel& source, const DetectorModel& det,
                      const MeasurementPlan& plan, binning::Strategy strategy,
                      Backend backend = Backend::automatic);

// DI QBER: P~_diff of the binned distribution at the key settings (a0, b1).
double qber_di_from(const OutcomeDistribution& key_basis,
                    binning::Strategy strategy);
double qber_di(const SourceModel& source, const DetectorModel& det,
               const MeasurementPlan& plan, binning::Strategy strategy,
               Backend backend = Backend::automatic);

// BB84 QBER over conclusive events only: exactly one click per side at the
// key settings, no binning. Throws if no conclusive coincidences can occur.
double qber_bb84_from(const OutcomeDistribution& key_basis);
double qber_bb84(const SourceModel& source, const DetectorModel& det,
                 const MeasurementPlan& plan,
                 Backend backend = Backend::automatic);

MetricsReport compute_metrics(const SourceModel& source,
                              const DetectorModel& det,
                              const MeasurementPlan& plan,
                              binning::Strategy strategy,
                              Backend backend = Backend::automatic);

// Error rates above 1/2 describe an anticorrelated raw key; relabeling one
// side's bit maps Q -> 1 - Q without touching S.
inline double effective_qber(double q) { return q <= 0.5 ? q : 1.0 - q; }

// Security boundary along the depolarized-QD family, where
// S = sqrt(2) (1 + cos fss) (1 - 2 Q): the largest Q (and the matching
// smallest S) with a non-negative DI key rate. Root-found, not hard-coded.
struct SecurityThresholds {
    double max_qber;
    double min_bell;
};
SecurityThresholds di_security_thresholds(double fss_phase);

}  // namespace entqkd::metrics
