#include "entqkd/gaussian.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace entqkd::gaussian {

namespace {

// Determinant of the leading k x k block, Gaussian elimination with partial
// pivoting; k <= 4.
double det_block(std::array<std::array<double, 4>, 4> a, int k) {
    double d = 1.0;
    for (int i = 0; i < k; ++i) {
        int piv = i;
        for (int r = i + 1; r < k; ++r)
            if (std::abs(a[r][i]) > std::abs(a[piv][i])) piv = r;
        if (a[piv][i] == 0.0) return 0.0;
        if (piv != i) {
            std::swap(a[piv], a[i]);
            d = -d;
        }
        d *= a[i][i];
        for (int r = i + 1; r < k; ++r) {
            const double f = a[r][i] / a[i][i];
            for (int c = i; c < k; ++c) a[r][c] -= f * a[i][c];
        }
    }
    return d;
}

// Pair couplings <a_i a_j> of the rotated SPDC state over the output modes
// (T_A, R_A, T_B, R_B); only A-side to B-side entries are nonzero.
std::array<std::array<double, 4>, 4> pair_couplings(double xi, double delta) {
    const double c = std::sinh(xi) * std::cosh(xi);
    const double sd = std::sin(delta), cd = std::cos(delta);
    std::array<std::array<double, 4>, 4> m{};
    auto set = [&m](Mode i, Mode j, double v) { m[i][j] = m[j][i] = v; };
    set(mode_t_a, mode_t_b, -c * sd);
    set(mode_r_a, mode_r_b, -c * sd);
    set(mode_t_a, mode_r_b, c * cd);
    set(mode_r_a, mode_t_b, -c * cd);
    return m;
}

// No-click weight over the modes in `mask`. Writing beta_j = x_j + i y_j,
// the normally ordered characteristic function of the zero-mean state splits
// into independent real Gaussians in x and y with quadratic forms
// nbar I -+ M, and the POVM integral collapses to
//   exp(-nu k) / sqrt(det(I + eta (nbar I - M)) det(I + eta (nbar I + M))).
double no_click_weight(unsigned mask, double xi, double eta, double nu,
                       const std::array<std::array<double, 4>, 4>& m) {
    const int k = std::popcount(mask);
    if (k == 0) return 1.0;
    std::array<int, 4> modes{};
    int idx = 0;
    for (int i = 0; i < 4; ++i)
        if (mask & (1u << i)) modes[idx++] = i;

    const double nbar = std::sinh(xi) * std::sinh(xi);
    std::array<std::array<double, 4>, 4> minus{}, plus{};
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) {
            const double diag = (r == c) ? 1.0 + eta * nbar : 0.0;
            minus[r][c] = diag - eta * m[modes[r]][modes[c]];
            plus[r][c] = diag + eta * m[modes[r]][modes[c]];
        }
    }
    const double dm = det_block(minus, k);
    const double dp = det_block(plus, k);
    if (!(dm > 0.0) || !(dp > 0.0))
        throw std::runtime_error(
            "gaussian no-click determinant not positive; engine bug");
    return std::exp(-nu * k) / std::sqrt(dm * dp);
}

}  // namespace

void SpdcClosedFormParams::validate() const {
    if (!(zeta > std::abs(gamma)) || !(zeta > std::abs(lambda)))
        throw std::domain_error(
            "closed-form parameters violate zeta > |gamma|, |lambda|");
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::domain_error("closed-form parameters need eta in (0, 1]");
}

SpdcClosedFormParams closed_form_params(double xi, double eta, double theta_a,
                                        double theta_b) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::domain_error("eta must lie in (0, 1] (got " +
                                std::to_string(eta) + ")");
    if (!(xi > 0.0))
        throw std::domain_error("xi must be > 0 (got " + std::to_string(xi) +
                                ")");
    const double t = std::tanh(xi);
    const double one_minus = 1.0 - t * t;
    const double delta = theta_a - theta_b;
    SpdcClosedFormParams p{};
    p.zeta = t * t / one_minus + 1.0 / eta;
    p.gamma = t / one_minus * std::sin(delta);
    p.lambda = t / one_minus * std::cos(delta);
    p.eta = eta;
    p.validate();
    return p;
}

LogicalDistribution binned_coincidences_closed_form(
    const SpdcClosedFormParams& p, double nu) {
    p.validate();
    if (!(nu >= 0.0)) throw std::domain_error("nu must be >= 0");
    const double zg = p.zeta * p.zeta - p.gamma * p.gamma;
    const double zl = p.zeta * p.zeta - p.lambda * p.lambda;
    const double e =
        std::exp(-2.0 * nu) / (2.0 * p.eta * p.eta) * (1.0 / zg - 1.0 / zl);
    LogicalDistribution L;
    L.tt = L.rr = 0.25 + e;
    L.tr = L.rt = 0.25 - e;
    return L;
}

OutcomeDistribution outcome_distribution(double xi, const AnalyzerSettings& s,
                                         const DetectorModel& det) {
    det.validate();
    s.validate();
    if (!(xi > 0.0))
        throw std::domain_error("xi must be > 0 (got " + std::to_string(xi) +
                                ")");
    if (!(det.eta > 0.0))
        throw std::domain_error("gaussian engine needs eta > 0");

    const auto m = pair_couplings(xi, s.theta_a - s.theta_b);
    std::array<double, 16> w{};
    for (unsigned mask = 0; mask < 16; ++mask)
        w[mask] = no_click_weight(mask, xi, det.eta, det.nu, m);

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

}  // namespace entqkd::gaussian
