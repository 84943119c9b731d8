#pragma once

#include <array>
#include <complex>
#include <variant>

namespace entqkd {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_sqrt2 = 2.8284271247461903;  // Tsirelson bound

// Output ports of the two polarization analyzers. A click pattern, and more
// generally any set of detectors, is a 4-bit mask with bit i <-> mode i.
enum Mode : unsigned { mode_t_a = 0, mode_r_a = 1, mode_t_b = 2, mode_r_b = 3 };

namespace click {
inline constexpr unsigned t_a = 1u << mode_t_a;
inline constexpr unsigned r_a = 1u << mode_r_a;
inline constexpr unsigned t_b = 1u << mode_t_b;
inline constexpr unsigned r_b = 1u << mode_r_b;
inline constexpr unsigned none = 0u;
inline constexpr unsigned all = 0xFu;
}  // namespace click

constexpr unsigned pattern_index(bool t_a, bool r_a, bool t_b, bool r_b) {
    return (t_a ? click::t_a : 0u) | (r_a ? click::r_a : 0u) |
           (t_b ? click::t_b : 0u) | (r_b ? click::r_b : 0u);
}

// On/off detector pair behind each analyzer port: no-click POVM element
// :exp(-eta n - nu): so a dark click on vacuum has probability 1 - exp(-nu).
struct DetectorModel {
    double eta = 1.0;  // detection efficiency
    double nu = 0.0;   // dark-count exponent per detection window
    void validate() const;
};

// Half-wave-plate angles selecting the measurement bases, in radians.
struct AnalyzerSettings {
    double theta_a = 0.0;
    double theta_b = 0.0;
    void validate() const;
};

struct IdealBell {
    enum class State { phi_plus, psi_minus };
    State state = State::phi_plus;
};

// Photon pair from a quantum dot: fine-structure splitting imprints a
// relative phase on the VV component, and channel depolarization mixes in
// white noise with weight 1 - survival.
struct QuantumDot {
    double fss_phase = 0.0;  // dimensionless phase phi*t/hbar
    double survival = 1.0;   // probability the pair survives depolarization
    void validate() const;
};

// Two-mode squeezed vacuum pair source, truncated at max_pairs total pairs.
// max_pairs < 0 means "derive the cutoff from tail_bound".
struct Spdc {
    double xi = 0.1;            // squeezing parameter
    int max_pairs = -1;         // Fock truncation (total pair number)
    double tail_bound = 1e-12;  // admissible truncated tail weight
    void validate() const;
};

using SourceModel = std::variant<IdealBell, QuantumDot, Spdc>;

// Smallest cutoff n with sum_{k>n} (k+1) tanh^{2k}(xi) / cosh^2(xi) < bound.
int spdc_pair_cutoff(double xi, double bound);
// The tail weight above for a given cutoff.
double spdc_tail_weight(double xi, int max_pairs);

// Probabilities of the 16 click patterns over (T_A, R_A, T_B, R_B).
struct OutcomeDistribution {
    std::array<double, 16> probs{};  // indexed by click mask
    double sum() const;
    // Clamps roundoff negatives to zero; throws if any entry is below -1e-10
    // or the total strays from 1 by more than 1e-10.
    void validate();
};

// The four logical outcomes after binning.
struct LogicalDistribution {
    double tt = 0.0, tr = 0.0, rt = 0.0, rr = 0.0;
    double sum() const { return tt + tr + rt + rr; }
};

// CHSH settings (a1, a2) x (b1, b2) plus Alice's key-generation setting a0.
// Defaults are the angles realizing sigma_z/sigma_x measurements on an ideal
// Bell pair.
struct MeasurementPlan {
    double theta_a1 = pi / 8;
    double theta_a2 = 3 * pi / 8;
    double theta_b1 = 0.0;
    double theta_b2 = pi / 4;
    double theta_a0 = 0.0;
    void validate() const;
};

}  // namespace entqkd
