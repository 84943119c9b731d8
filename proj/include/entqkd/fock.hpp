#pragma once

#include <map>
#include <vector>

#include "entqkd/types.hpp"

namespace entqkd::fock {

// Four-mode pure state: occupation tuple -> complex amplitude. Mode order is
// (H_A, V_A, H_B, V_B) at the source and (T_A, R_A, T_B, R_B) once the
// analyzers have been applied.
struct PureComponent {
    std::map<std::array<int, 4>, std::complex<double>> amp;
    double norm_sq() const;
};

// Mixed states are kept as convex mixtures of pure components; the click
// statistics only ever need the ensemble average of diagonal weights.
struct FockState {
    struct Entry {
        double weight;
        PureComponent pure;
    };
    std::vector<Entry> ensemble;

    bool is_mixed() const { return ensemble.size() > 1; }
    double trace() const;  // sum of weight * norm_sq
    void validate(double tol = 1e-12) const;
};

// Builds the source state in the (H_A, V_A, H_B, V_B) basis:
//  - IdealBell: one photon per side, |Phi+> or |Psi->.
//  - QuantumDot: p |Phi~+><Phi~+| + (1-p)/4 I(x)I on the one-photon-per-side
//    polarization subspace, with the FSS phase on the VV amplitude.
//  - Spdc: truncated two-mode squeezed vacuum, alternating-sign pair terms,
//    renormalized after truncation. Throws if the truncation tail rule fails.
FockState make_source_state(const SourceModel& source);

// Rewrites the state in the analyzer output basis via
//   a_T = a_H cos(theta) + a_V sin(theta),
//   a_R = -a_H sin(theta) + a_V cos(theta)
// on each side. Photon number per side is conserved.
FockState apply_analyzers(const FockState& state, const AnalyzerSettings& s);

// Tr[rho Pi0_M] for the no-click POVM on every mode in mode_mask, evaluated
// on a state already expressed in the output basis:
//   exp(-nu |M|) * sum_diag rho_nn (1-eta)^(sum of occupations in M).
double no_click_weight(const FockState& rotated, unsigned mode_mask,
                       const DetectorModel& det);

// Full 16-pattern click distribution by inclusion-exclusion over no-click
// weights. Throws on probabilities below -1e-10 or a sum off by > 1e-10.
OutcomeDistribution outcome_distribution(const FockState& state,
                                         const AnalyzerSettings& s,
                                         const DetectorModel& det);

}  // namespace entqkd::fock
