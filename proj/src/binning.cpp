#include "entqkd/binning.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace entqkd::binning {

namespace {

double& slot(LogicalDistribution& L, bool a_is_t, bool b_is_t) {
    if (a_is_t) return b_is_t ? L.tt : L.tr;
    return b_is_t ? L.rt : L.rr;
}

void check_sum(const LogicalDistribution& L) {
    if (std::abs(L.sum() - 1.0) > 1e-10)
        throw std::runtime_error("binned distribution sums to " +
                                 std::to_string(L.sum()) + ", expected 1");
}

}  // namespace

LogicalDistribution bin_standard(const OutcomeDistribution& d) {
    LogicalDistribution L;
    for (unsigned c = 0; c < 16; ++c) {
        const double p = d.probs[c];
        const bool ta = c & click::t_a, ra = c & click::r_a;
        const bool tb = c & click::t_b, rb = c & click::r_b;
        const int na = int(ta) + int(ra), nb = int(tb) + int(rb);
        if (na == 1 && nb == 1) {
            slot(L, ta, tb) += p;
        } else if (na != 1 && nb != 1) {
            // no clicks, all clicks, or a lone same-side double click
            L.tt += p / 4;
            L.tr += p / 4;
            L.rt += p / 4;
            L.rr += p / 4;
        } else if (na + nb == 1) {
            // single click: half to each logical outcome sharing the detector
            if (ta) {
                L.tt += p / 2;
                L.tr += p / 2;
            } else if (ra) {
                L.rt += p / 2;
                L.rr += p / 2;
            } else if (tb) {
                L.tt += p / 2;
                L.rt += p / 2;
            } else {
                L.tr += p / 2;
                L.rr += p / 2;
            }
        } else {
            // triple click: half to each coincident one-per-side pair inside
            for (const bool a_t : {true, false})
                for (const bool b_t : {true, false}) {
                    const bool has_a = a_t ? ta : ra;
                    const bool has_b = b_t ? tb : rb;
                    if (has_a && has_b) slot(L, a_t, b_t) += p / 2;
                }
        }
    }
    check_sum(L);
    return L;
}

LogicalDistribution bin_transmitted_only(const OutcomeDistribution& d) {
    LogicalDistribution L;
    for (unsigned c = 0; c < 16; ++c) {
        const bool a_minus = (c & click::t_a) && !(c & click::r_a);
        const bool b_minus = (c & click::t_b) && !(c & click::r_b);
        slot(L, a_minus, b_minus) += d.probs[c];
    }
    check_sum(L);
    return L;
}

LogicalDistribution bin(const OutcomeDistribution& d, Strategy s) {
    return s == Strategy::standard ? bin_standard(d)
                                   : bin_transmitted_only(d);
}

}  // namespace entqkd::binning
