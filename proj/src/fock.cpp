#include "entqkd/fock.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace entqkd::fock {

namespace {

using Occupation = std::array<int, 4>;
using cd = std::complex<double>;

double ipow(double base, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= base;
    return r;
}

// log(k!) from a fixed table, falling back to lgamma beyond it
double log_factorial(int k) {
    static const std::vector<double> table = [] {
        std::vector<double> t(4096);
        for (size_t i = 0; i < t.size(); ++i) t[i] = std::lgamma(i + 1.0);
        return t;
    }();
    return k < static_cast<int>(table.size()) ? table[k]
                                              : std::lgamma(k + 1.0);
}

// Coefficients of |n1, n2>_{H,V} in the rotated pair basis:
//   |n1,n2> -> sum_t coeff[t] |t, n1+n2-t>_{T,R}
// from the binomial expansion of (cos a_T^+ - sin a_R^+)^{n1}
// (sin a_T^+ + cos a_R^+)^{n2}, with the factorial normalization carried in
// log space to stay finite at large occupation.
std::vector<double> rotation_coeffs(int n1, int n2, double theta) {
    const int n = n1 + n2;
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<double> out(static_cast<size_t>(n) + 1, 0.0);
    for (int j = 0; j <= n1; ++j) {
        for (int k = 0; k <= n2; ++k) {
            const int t = j + k;
            const double logmag =
                log_factorial(n1) - log_factorial(j) - log_factorial(n1 - j) +
                log_factorial(n2) - log_factorial(k) - log_factorial(n2 - k) +
                0.5 * (log_factorial(t) + log_factorial(n - t) -
                       log_factorial(n1) - log_factorial(n2));
            out[t] += std::exp(logmag) * ipow(c, j) * ipow(-s, n1 - j) *
                      ipow(s, k) * ipow(c, n2 - k);
        }
    }
    return out;
}

PureComponent basis_pair(int pol_a, int pol_b) {
    // pol = 0 -> H, 1 -> V; one photon per side
    PureComponent c;
    Occupation occ{0, 0, 0, 0};
    occ[pol_a] = 1;
    occ[2 + pol_b] = 1;
    c.amp[occ] = 1.0;
    return c;
}

FockState make_bell(IdealBell b) {
    PureComponent c;
    const double w = 1.0 / std::sqrt(2.0);
    if (b.state == IdealBell::State::phi_plus) {
        c.amp[{1, 0, 1, 0}] = w;   // |HH>
        c.amp[{0, 1, 0, 1}] = w;   // |VV>
    } else {
        c.amp[{1, 0, 0, 1}] = w;   // |HV>
        c.amp[{0, 1, 1, 0}] = -w;  // -|VH>
    }
    return {{{1.0, std::move(c)}}};
}

FockState make_quantum_dot(const QuantumDot& qd) {
    qd.validate();
    FockState st;
    const double p = qd.survival;
    if (p > 0.0) {
        PureComponent c;
        const double w = 1.0 / std::sqrt(2.0);
        c.amp[{1, 0, 1, 0}] = w;
        c.amp[{0, 1, 0, 1}] = std::polar(w, -qd.fss_phase);
        st.ensemble.push_back({p, std::move(c)});
    }
    if (p < 1.0) {
        // white noise: equal mixture of the four polarization products
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                st.ensemble.push_back({(1.0 - p) / 4.0, basis_pair(a, b)});
    }
    return st;
}

FockState make_spdc(const Spdc& src) {
    src.validate();
    const int n_max = src.max_pairs < 0
                          ? spdc_pair_cutoff(src.xi, src.tail_bound)
                          : src.max_pairs;
    if (spdc_tail_weight(src.xi, n_max) >= src.tail_bound)
        throw std::invalid_argument(
            "spdc truncation at " + std::to_string(n_max) +
            " pairs leaves a tail >= " + std::to_string(src.tail_bound));
    const double t = std::tanh(src.xi);
    PureComponent c;
    double norm_sq = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        // sqrt(n+1) t^n |Phi_n> with |Phi_n> = sum_m (-1)^m / sqrt(n+1) ...
        const double term = ipow(t, n);
        for (int m = 0; m <= n; ++m) {
            const double a = (m % 2 == 0 ? term : -term);
            c.amp[{n - m, m, m, n - m}] = a;
            norm_sq += a * a;
        }
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [occ, a] : c.amp) a *= inv;
    return {{{1.0, std::move(c)}}};
}

}  // namespace

double PureComponent::norm_sq() const {
    double s = 0.0;
    for (const auto& [occ, a] : amp) s += std::norm(a);
    return s;
}

double FockState::trace() const {
    double s = 0.0;
    for (const auto& e : ensemble) s += e.weight * e.pure.norm_sq();
    return s;
}

void FockState::validate(double tol) const {
    if (ensemble.empty()) throw std::invalid_argument("empty Fock state");
    for (const auto& e : ensemble)
        if (!(e.weight >= 0.0))
            throw std::invalid_argument("negative ensemble weight");
    const double tr = trace();
    if (std::abs(tr - 1.0) > tol)
        throw std::invalid_argument("Fock state trace " + std::to_string(tr) +
                                    " deviates from 1");
}

FockState make_source_state(const SourceModel& source) {
    return std::visit(
        [](const auto& s) -> FockState {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, IdealBell>) return make_bell(s);
            if constexpr (std::is_same_v<T, QuantumDot>)
                return make_quantum_dot(s);
            if constexpr (std::is_same_v<T, Spdc>) return make_spdc(s);
        },
        source);
}

FockState apply_analyzers(const FockState& state, const AnalyzerSettings& s) {
    s.validate();
    FockState out;
    out.ensemble.reserve(state.ensemble.size());
    for (const auto& e : state.ensemble) {
        // accumulate into dense per-sector buffers; photon number per side
        // is conserved, so each input entry scatters within its
        // (na, nb) sector only
        std::map<std::pair<int, int>, std::vector<cd>> sectors;
        std::map<std::pair<int, int>, std::vector<double>> cache_a, cache_b;
        for (const auto& [occ, a] : e.pure.amp) {
            auto& ca = cache_a[{occ[0], occ[1]}];
            if (ca.empty()) ca = rotation_coeffs(occ[0], occ[1], s.theta_a);
            auto& cb = cache_b[{occ[2], occ[3]}];
            if (cb.empty()) cb = rotation_coeffs(occ[2], occ[3], s.theta_b);
            const int na = occ[0] + occ[1], nb = occ[2] + occ[3];
            auto& buf = sectors[{na, nb}];
            if (buf.empty())
                buf.resize(static_cast<size_t>(na + 1) * (nb + 1));
            for (int ta = 0; ta <= na; ++ta) {
                if (ca[ta] == 0.0) continue;
                const cd left = a * ca[ta];
                cd* row = buf.data() + static_cast<size_t>(ta) * (nb + 1);
                for (int tb = 0; tb <= nb; ++tb) row[tb] += left * cb[tb];
            }
        }
        PureComponent rot;
        for (const auto& [sector, buf] : sectors) {
            const auto [na, nb] = sector;
            for (int ta = 0; ta <= na; ++ta)
                for (int tb = 0; tb <= nb; ++tb) {
                    const cd v = buf[static_cast<size_t>(ta) * (nb + 1) + tb];
                    if (v != 0.0) rot.amp[{ta, na - ta, tb, nb - tb}] = v;
                }
        }
        out.ensemble.push_back({e.weight, std::move(rot)});
    }
    return out;
}

double no_click_weight(const FockState& rotated, unsigned mode_mask,
                       const DetectorModel& det) {
    det.validate();
    if (mode_mask > click::all)
        throw std::invalid_argument("mode mask must be 4 bits");
    double total = 0.0;
    for (const auto& e : rotated.ensemble) {
        for (const auto& [occ, a] : e.pure.amp) {
            double f = e.weight * std::norm(a);
            for (unsigned m = 0; m < 4; ++m)
                if (mode_mask & (1u << m)) f *= ipow(1.0 - det.eta, occ[m]);
            total += f;
        }
    }
    return std::exp(-det.nu * std::popcount(mode_mask)) * total;
}

OutcomeDistribution outcome_distribution(const FockState& state,
                                         const AnalyzerSettings& s,
                                         const DetectorModel& det) {
    det.validate();
    state.validate();
    const FockState rotated = apply_analyzers(state, s);

    // all 16 no-click weights in one pass over the diagonal
    std::array<double, 16> w{};
    for (const auto& e : rotated.ensemble) {
        for (const auto& [occ, a] : e.pure.amp) {
            const double d = e.weight * std::norm(a);
            if (d == 0.0) continue;
            std::array<double, 4> q;
            for (int m = 0; m < 4; ++m) q[m] = ipow(1.0 - det.eta, occ[m]);
            for (unsigned mask = 0; mask < 16; ++mask) {
                double f = d;
                for (unsigned m = 0; m < 4; ++m)
                    if (mask & (1u << m)) f *= q[m];
                w[mask] += f;
            }
        }
    }
    for (unsigned mask = 0; mask < 16; ++mask)
        w[mask] *= std::exp(-det.nu * std::popcount(mask));

    // P(clicks exactly C) = sum_{U subset of C} (-1)^|U| W(U u complement(C))
    OutcomeDistribution dist;
    for (unsigned c = 0; c < 16; ++c) {
        const unsigned z = ~c & click::all;
        double p = 0.0;
        unsigned u = c;
        while (true) {
            p += (std::popcount(u) % 2 == 0 ? 1.0 : -1.0) * w[u | z];
            if (u == 0) break;
            u = (u - 1) & c;
        }
        dist.probs[c] = p;
    }
    dist.validate();
    return dist;
}

}  // namespace entqkd::fock
