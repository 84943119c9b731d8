#include "entqkd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "entqkd/rates.hpp"

namespace entqkd::opt {

namespace {

constexpr double simplex_tol = 1e-6;

double wrap_pi(double a) {
    double r = std::fmod(a, pi);
    if (r < 0.0) r += pi;
    return r;
}

double circ_dist(double u, double v) {
    const double d = std::abs(wrap_pi(u) - wrap_pi(v));
    return std::min(d, pi - d);
}

bool is_angle(Var v) { return v != Var::xi; }

Interval default_bounds(Var v) {
    return is_angle(v) ? Interval{0.0, pi} : Interval{0.0, 1.5};
}

struct Evaluator {
    const Problem& p;
    long budget;
    long evals = 0;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> best_x;

    bool exhausted() const { return evals >= budget; }

    // One objective evaluation; angles are reduced mod pi first (the
    // analyzer statistics are pi-periodic), xi is passed as given.
    double operator()(const std::vector<double>& x) {
        MeasurementPlan plan = p.plan;
        SourceModel source = p.source;
        for (size_t i = 0; i < p.free_vars.size(); ++i) {
            const double v = is_angle(p.free_vars[i]) ? wrap_pi(x[i]) : x[i];
            switch (p.free_vars[i]) {
                case Var::theta_a1: plan.theta_a1 = v; break;
                case Var::theta_a2: plan.theta_a2 = v; break;
                case Var::theta_b1: plan.theta_b1 = v; break;
                case Var::theta_b2: plan.theta_b2 = v; break;
                case Var::xi: std::get<Spdc>(source).xi = v; break;
            }
        }
        ++evals;
        double value;
        if (p.objective == Objective::bell_parameter) {
            value = metrics::bell_parameter(source, p.detector, plan,
                                            p.strategy);
        } else {
            const double s = metrics::bell_parameter(source, p.detector, plan,
                                                     p.strategy);
            const double q = metrics::effective_qber(
                metrics::qber_di(source, p.detector, plan, p.strategy));
            value = rates::di_key_rate({q, std::min(s, two_sqrt2)}).rate;
        }
        if (value > best) {
            best = value;
            best_x = x;
        }
        return value;
    }
};

}  // namespace

const char* var_name(Var v) {
    switch (v) {
        case Var::theta_a1: return "theta_a1";
        case Var::theta_a2: return "theta_a2";
        case Var::theta_b1: return "theta_b1";
        case Var::theta_b2: return "theta_b2";
        case Var::xi: return "xi";
    }
    return "?";
}

void Problem::validate() const {
    if (free_vars.empty())
        throw std::invalid_argument("optimize: no free variables");
    for (size_t i = 0; i < free_vars.size(); ++i)
        for (size_t j = i + 1; j < free_vars.size(); ++j)
            if (free_vars[i] == free_vars[j])
                throw std::invalid_argument("optimize: duplicate free variable");
    if (std::find(free_vars.begin(), free_vars.end(), Var::xi) !=
            free_vars.end() &&
        !std::holds_alternative<Spdc>(source))
        throw std::invalid_argument("optimize: xi is only free for spdc");
    if (grid_per_var < 5)
        throw std::invalid_argument("optimize: grid density must be >= 5");
    if (starts < 1) throw std::invalid_argument("optimize: starts must be >= 1");
    for (const auto& [v, b] : bounds)
        if (!(b.lo < b.hi))
            throw std::invalid_argument("optimize: empty bound interval");
    detector.validate();
    plan.validate();
}

std::array<double, 4> canonical_angles(std::array<double, 4> a,
                                       bool difference_only) {
    for (double& v : a) v = wrap_pi(v);
    if (difference_only) {
        const double shift = a[2];  // move theta_b1 to 0, inside [0, pi/4)
        for (double& v : a) v = wrap_pi(v - shift);
    }
    return a;
}

bool angles_equivalent(std::array<double, 4> x, std::array<double, 4> y,
                       double tol) {
    const auto cx = canonical_angles(x, true);
    for (const bool swap_a : {false, true})
        for (const bool swap_b : {false, true})
            for (const double sign : {1.0, -1.0})
                for (const bool half_pi_a : {false, true}) {
                    std::array<double, 4> cand = y;
                    if (swap_a) std::swap(cand[0], cand[1]);
                    if (swap_b) std::swap(cand[2], cand[3]);
                    for (double& v : cand) v *= sign;
                    if (half_pi_a) {
                        cand[0] += pi / 2;
                        cand[1] += pi / 2;
                    }
                    const auto cy = canonical_angles(cand, true);
                    double worst = 0.0;
                    for (int i = 0; i < 4; ++i)
                        worst = std::max(worst, circ_dist(cx[i], cy[i]));
                    if (worst <= tol) return true;
                }
    return false;
}

Result optimize(const Problem& p, std::uint64_t seed, long budget) {
    p.validate();
    if (budget < 100)
        throw std::invalid_argument("optimize: budget must be >= 100");

    const size_t dim = p.free_vars.size();
    std::vector<Interval> box(dim);
    for (size_t i = 0; i < dim; ++i) {
        const auto it = p.bounds.find(p.free_vars[i]);
        box[i] = it != p.bounds.end() ? it->second
                                      : default_bounds(p.free_vars[i]);
    }

    Evaluator eval{p, budget, 0,
                   -std::numeric_limits<double>::infinity(), {}};

    // coarse grid: angles sample [lo, hi) from lo, xi samples (lo, hi] to hi
    const int k = p.grid_per_var;
    std::vector<std::vector<double>> axes(dim);
    for (size_t i = 0; i < dim; ++i) {
        const double span = box[i].hi - box[i].lo;
        for (int j = 0; j < k; ++j)
            axes[i].push_back(is_angle(p.free_vars[i])
                                  ? box[i].lo + j * span / k
                                  : box[i].lo + (j + 1) * span / k);
    }
    struct GridPoint {
        double value;
        std::vector<double> x;
    };
    std::vector<GridPoint> grid;
    std::vector<size_t> idx(dim, 0);
    bool grid_complete = true;
    while (true) {
        if (eval.exhausted()) {
            grid_complete = false;
            break;
        }
        std::vector<double> x(dim);
        for (size_t i = 0; i < dim; ++i) x[i] = axes[i][idx[i]];
        grid.push_back({eval(x), std::move(x)});
        size_t i = 0;
        for (; i < dim; ++i) {
            if (++idx[i] < axes[i].size()) break;
            idx[i] = 0;
        }
        if (i == dim) break;
    }
    std::sort(grid.begin(), grid.end(), [](const GridPoint& a,
                                           const GridPoint& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.x < b.x;
    });

    // pre-draw the per-start simplex jitter so the rng consumption order
    // never depends on the convergence path
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> jitter(p.starts,
                                            std::vector<double>(dim));
    for (auto& row : jitter)
        for (double& v : row) v = unit(rng);

    const int launches =
        std::min<int>(p.starts, static_cast<int>(grid.size()));
    bool all_converged = grid_complete && launches == p.starts;

    for (int start = 0; start < launches; ++start) {
        if (eval.exhausted()) {
            all_converged = false;
            break;
        }
        // initial simplex around the grid point, scaled to half a cell
        std::vector<std::vector<double>> simplex;
        simplex.push_back(grid[start].x);
        for (size_t i = 0; i < dim; ++i) {
            auto v = grid[start].x;
            const double span = box[i].hi - box[i].lo;
            double h = span / (2.0 * k) * (1.0 + 1e-3 * jitter[start][i]);
            if (!is_angle(p.free_vars[i]) && v[i] + h > box[i].hi) h = -h;
            v[i] += h;
            simplex.push_back(std::move(v));
        }
        const size_t n = dim;
        std::vector<double> f(n + 1);
        const auto g = [&](const std::vector<double>& x) -> double {
            for (size_t i = 0; i < dim; ++i)
                if (!is_angle(p.free_vars[i]) &&
                    (x[i] <= box[i].lo || x[i] > box[i].hi))
                    return std::numeric_limits<double>::infinity();
            return -eval(x);
        };
        bool aborted = false;
        for (size_t v = 0; v <= n; ++v) {
            if (eval.exhausted()) {
                aborted = true;
                break;
            }
            f[v] = g(simplex[v]);
        }
        if (aborted) {
            all_converged = false;
            break;
        }

        bool this_converged = false;
        while (true) {
            // order ascending in g
            std::vector<size_t> ord(n + 1);
            for (size_t i = 0; i <= n; ++i) ord[i] = i;
            std::sort(ord.begin(), ord.end(), [&](size_t a, size_t b) {
                if (f[a] != f[b]) return f[a] < f[b];
                return simplex[a] < simplex[b];
            });
            std::vector<std::vector<double>> sx(n + 1);
            std::vector<double> sf(n + 1);
            for (size_t i = 0; i <= n; ++i) {
                sx[i] = simplex[ord[i]];
                sf[i] = f[ord[i]];
            }
            simplex.swap(sx);
            f.swap(sf);

            double diameter = 0.0;
            for (size_t v = 1; v <= n; ++v)
                for (size_t i = 0; i < dim; ++i)
                    diameter = std::max(diameter,
                                        std::abs(simplex[v][i] - simplex[0][i]));
            if (diameter < simplex_tol) {
                this_converged = true;
                break;
            }
            if (eval.exhausted()) break;

            std::vector<double> centroid(dim, 0.0);
            for (size_t v = 0; v < n; ++v)
                for (size_t i = 0; i < dim; ++i)
                    centroid[i] += simplex[v][i] / double(n);

            auto blend = [&](double coef) {
                std::vector<double> x(dim);
                for (size_t i = 0; i < dim; ++i)
                    x[i] = centroid[i] + coef * (centroid[i] - simplex[n][i]);
                return x;
            };
            const auto xr = blend(1.0);
            const double fr = g(xr);
            if (fr < f[0]) {
                const auto xe = blend(2.0);
                const double fe = g(xe);
                if (fe < fr) {
                    simplex[n] = xe;
                    f[n] = fe;
                } else {
                    simplex[n] = xr;
                    f[n] = fr;
                }
            } else if (fr < f[n - 1]) {
                simplex[n] = xr;
                f[n] = fr;
            } else if (fr < f[n]) {
                const auto xc = blend(0.5);  // outside contraction
                const double fc = g(xc);
                if (fc <= fr) {
                    simplex[n] = xc;
                    f[n] = fc;
                } else {
                    for (size_t v = 1; v <= n; ++v) {  // shrink
                        for (size_t i = 0; i < dim; ++i)
                            simplex[v][i] =
                                simplex[0][i] +
                                0.5 * (simplex[v][i] - simplex[0][i]);
                        f[v] = g(simplex[v]);
                    }
                }
            } else {
                const auto xc = blend(-0.5);  // inside contraction
                const double fc = g(xc);
                if (fc < f[n]) {
                    simplex[n] = xc;
                    f[n] = fc;
                } else {
                    for (size_t v = 1; v <= n; ++v) {
                        for (size_t i = 0; i < dim; ++i)
                            simplex[v][i] =
                                simplex[0][i] +
                                0.5 * (simplex[v][i] - simplex[0][i]);
                        f[v] = g(simplex[v]);
                    }
                }
            }
        }
        if (!this_converged) all_converged = false;
    }

    // canonical reporting: angles mod pi always; a common shift putting
    // theta_b1 at 0 additionally applies when the objective depends on angle
    // differences only (spdc statistics) and all four CHSH angles are free
    // with the key setting not entering the objective.
    std::vector<double> xbest = eval.best_x;
    for (size_t i = 0; i < dim; ++i)
        if (is_angle(p.free_vars[i])) xbest[i] = wrap_pi(xbest[i]);

    const bool all_angles_free =
        dim >= 4 &&
        [&] {
            for (Var v : {Var::theta_a1, Var::theta_a2, Var::theta_b1,
                          Var::theta_b2})
                if (std::find(p.free_vars.begin(), p.free_vars.end(), v) ==
                    p.free_vars.end())
                    return false;
            return true;
        }();
    if (all_angles_free && std::holds_alternative<Spdc>(p.source) &&
        p.objective == Objective::bell_parameter) {
        std::array<double, 4> ang{};
        std::array<size_t, 4> pos{};
        size_t slot = 0;
        for (size_t i = 0; i < dim; ++i)
            if (is_angle(p.free_vars[i])) {
                ang[slot] = xbest[i];
                pos[slot] = i;
                ++slot;
            }
        // map into (a1, a2, b1, b2) order for canonicalization
        std::array<double, 4> ordered{};
        std::array<size_t, 4> where{};
        for (size_t s = 0; s < 4; ++s) {
            const Var v = p.free_vars[pos[s]];
            const size_t j = v == Var::theta_a1   ? 0
                             : v == Var::theta_a2 ? 1
                             : v == Var::theta_b1 ? 2
                                                  : 3;
            ordered[j] = ang[s];
            where[j] = pos[s];
        }
        const auto canon = canonical_angles(ordered, true);
        for (size_t j = 0; j < 4; ++j) xbest[where[j]] = canon[j];
    }

    const double raw_best = eval.best;
    const double canon_value = eval(xbest);

    Result res;
    res.best_value = std::max(raw_best, canon_value);
    for (size_t i = 0; i < dim; ++i) res.argmax[p.free_vars[i]] = xbest[i];
    res.evaluations = eval.evals;
    res.converged = all_converged;
    return res;
}

}  // namespace entqkd::opt
