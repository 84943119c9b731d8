#pragma once

#include "entqkd/types.hpp"

namespace entqkd::gaussian {

// Notation of the closed-form SPDC coincidence probabilities:
//   zeta   = tanh^2(xi)/(1 - tanh^2(xi)) + 1/eta
//   gamma  = tanh(xi)/(1 - tanh^2(xi)) * sin(theta_a - theta_b)
//   lambda = tanh(xi)/(1 - tanh^2(xi)) * cos(theta_a - theta_b)
struct SpdcClosedFormParams {
    double zeta;
    double gamma;
    double lambda;
    double eta;  // efficiency the parameters were derived with
    void validate() const;  // zeta > |gamma| and zeta > |lambda|
};

SpdcClosedFormParams closed_form_params(double xi, double eta, double theta_a,
                                        double theta_b);

// The four standard-binned coincidence probabilities:
//   P~_tt = P~_rr = 1/4 + e^{-2 nu}/(2 eta^2) [1/(zeta^2-gamma^2) - 1/(zeta^2-lambda^2)]
// and the swapped form for P~_tr = P~_rt.
LogicalDistribution binned_coincidences_closed_form(
    const SpdcClosedFormParams& p, double nu);

// Full 16-pattern distribution for the SPDC source without truncation error.
// Each no-click weight is a Gaussian expectation in closed determinant form
// over the selected modes; patterns follow by inclusion-exclusion. Must agree
// with the Fock engine (enforced by tests).
OutcomeDistribution outcome_distribution(double xi, const AnalyzerSettings& s,
                                         const DetectorModel& det);

}  // namespace entqkd::gaussian
