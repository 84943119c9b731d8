#include "entqkd/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "entqkd/binning.hpp"
#include "entqkd/metrics.hpp"
#include "entqkd/optimize.hpp"
#include "entqkd/rates.hpp"
#include "entqkd/types.hpp"

namespace entqkd::cli {

namespace {

namespace fs = std::filesystem;

// all emitted numbers carry 12 significant digits
std::string fmt(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct SourceOpts {
    std::string source;
    std::string bell_state = "phi+";
    double xi = 0.1;
    double fss = 0.0;
    double p = 1.0;
    double eta = 1.0;
    double nu = 0.0;
    std::string binning = "standard";
    std::string angles;
    double truncation_tail = 1e-12;
    std::string backend = "auto";
};

void add_model_flags(CLI::App* cmd, SourceOpts& o) {
    cmd->add_option("--source", o.source, "photon-pair source")
        ->required()
        ->check(CLI::IsMember({"bell", "qd", "spdc"}));
    cmd->add_option("--bell-state", o.bell_state,
                    "bell source state (phi+ or psi-)")
        ->check(CLI::IsMember({"phi+", "psi-"}));
    cmd->add_option("--xi", o.xi, "spdc squeezing parameter");
    cmd->add_option("--fss", o.fss,
                    "qd fine-structure phase (radians, phi*t/hbar)");
    cmd->add_option("--p", o.p, "qd survival probability after the channel");
    cmd->add_option("--eta", o.eta, "detector efficiency (default 1)");
    cmd->add_option("--nu", o.nu, "dark-count exponent per window (default 0)");
    cmd->add_option("--binning", o.binning, "binning strategy")
        ->check(CLI::IsMember({"standard", "vivoli"}));
    cmd->add_option("--angles", o.angles,
                    "a1,a2,b1,b2[,a0] measurement angles in radians")
        ->check([](const std::string& s) -> std::string {
            std::stringstream ss(s);
            std::string tok;
            int count = 0;
            while (std::getline(ss, tok, ',')) {
                try {
                    size_t used = 0;
                    std::stod(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    return "not a number: '" + tok + "'";
                }
                ++count;
            }
            if (count != 4 && count != 5)
                return "expected 4 or 5 comma-separated angles";
            return "";
        });
    cmd->add_option("--truncation-tail", o.truncation_tail,
                    "admissible spdc Fock tail weight (default 1e-12)");
    cmd->add_option("--backend", o.backend,
                    "click-statistics engine (default auto)")
        ->check(CLI::IsMember({"auto", "fock", "gaussian"}));
}

SourceModel build_source(const SourceOpts& o) {
    if (o.source == "bell") {
        IdealBell b;
        b.state = o.bell_state == "psi-" ? IdealBell::State::psi_minus
                                         : IdealBell::State::phi_plus;
        return b;
    }
    if (o.source == "qd") {
        QuantumDot qd{o.fss, o.p};
        qd.validate();
        return qd;
    }
    Spdc s{o.xi, -1, o.truncation_tail};
    s.validate();
    return s;
}

DetectorModel build_detector(const SourceOpts& o) {
    DetectorModel det{o.eta, o.nu};
    det.validate();
    return det;
}

MeasurementPlan build_plan(const SourceOpts& o) {
    MeasurementPlan plan;
    if (!o.angles.empty()) {
        std::vector<double> v;
        std::stringstream ss(o.angles);
        std::string tok;
        while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
        plan.theta_a1 = v[0];
        plan.theta_a2 = v[1];
        plan.theta_b1 = v[2];
        plan.theta_b2 = v[3];
        if (v.size() == 5) plan.theta_a0 = v[4];
    }
    plan.validate();
    return plan;
}

binning::Strategy build_binning(const SourceOpts& o) {
    return o.binning == "vivoli" ? binning::Strategy::transmitted_only
                                 : binning::Strategy::standard;
}

metrics::Backend build_backend(const SourceOpts& o) {
    if (o.backend == "fock") return metrics::Backend::fock;
    if (o.backend == "gaussian") return metrics::Backend::gaussian;
    return metrics::Backend::automatic;
}

// fixed parameters for CSV header comments; `swept` names the variable the
// sweep owns, which therefore has no fixed value to report
std::string describe(const SourceOpts& o, const MeasurementPlan& plan,
                     const std::string& swept = "") {
    std::ostringstream s;
    const auto field = [&](const std::string& key, const std::string& value) {
        if (key != swept) s << " " << key << "=" << value;
    };
    s << "source=" << o.source;
    if (o.source == "bell") field("bell_state", o.bell_state);
    if (o.source == "spdc") {
        field("xi", fmt(o.xi));
        field("truncation_tail", fmt(o.truncation_tail));
    }
    if (o.source == "qd") {
        field("fss", fmt(o.fss));
        field("p", fmt(o.p));
    }
    field("eta", fmt(o.eta));
    field("nu", fmt(o.nu));
    field("binning", o.binning);
    field("backend", o.backend);
    field("angles", fmt(plan.theta_a1) + "," + fmt(plan.theta_a2) + "," +
                        fmt(plan.theta_b1) + "," + fmt(plan.theta_b2) + "," +
                        fmt(plan.theta_a0));
    return s.str();
}

struct RowValues {
    double bell_s, qber_di, qber_bb84, rate_di, rate_bb84;
};

// Rates are evaluated at min(Q, 1-Q): an error rate above 1/2 means the raw
// key is anticorrelated and one side relabels its bit.
RowValues compute_row(const SourceModel& src, const DetectorModel& det,
                      const MeasurementPlan& plan, binning::Strategy strategy,
                      metrics::Backend backend) {
    const auto rep = metrics::compute_metrics(src, det, plan, strategy, backend);
    RowValues r{};
    r.bell_s = rep.bell_s;
    r.qber_di = rep.qber_di;
    r.qber_bb84 = rep.qber_bb84;
    r.rate_di = rates::di_key_rate({metrics::effective_qber(rep.qber_di),
                                    std::min(rep.bell_s, two_sqrt2)})
                    .rate;
    r.rate_bb84 =
        rates::bb84_key_rate(metrics::effective_qber(rep.qber_bb84)).rate;
    return r;
}

void write_csv(const fs::path& path, const std::string& comment,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "# " << comment << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        f << columns[i] << (i + 1 < columns.size() ? "," : "");
    f << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i)
            f << fmt(row[i]) << (i + 1 < row.size() ? "," : "");
        f << "\n";
    }
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

const std::vector<std::string> sweep_columns_tail = {
    "bell_s", "qber_di", "qber_bb84", "rate_di", "rate_bb84"};

struct SweepArgs {
    std::string var;
    double from = 0.0, to = 0.0;
    int steps = 0;
    std::string out;
};

std::vector<std::vector<double>> sweep_rows(const SourceOpts& o,
                                            const SweepArgs& sw,
                                            const MeasurementPlan& plan) {
    if (sw.steps < 2) throw std::invalid_argument("steps must be >= 2");
    if (!(sw.from < sw.to))
        throw std::invalid_argument("sweep needs from < to");
    const bool is_qd_var = sw.var == "p" || sw.var == "fss";
    if (sw.var == "xi" && o.source != "spdc")
        throw std::invalid_argument("sweeping xi requires --source spdc");
    if (is_qd_var && o.source != "qd")
        throw std::invalid_argument("sweeping " + sw.var +
                                    " requires --source qd");

    const auto strategy = build_binning(o);
    const auto backend = build_backend(o);
    std::vector<std::vector<double>> rows;
    rows.reserve(sw.steps);
    for (int i = 0; i < sw.steps; ++i) {
        const double v = sw.from + (sw.to - sw.from) * i / (sw.steps - 1);
        SourceOpts oi = o;
        if (sw.var == "xi") oi.xi = v;
        else if (sw.var == "eta") oi.eta = v;
        else if (sw.var == "nu") oi.nu = v;
        else if (sw.var == "p") oi.p = v;
        else if (sw.var == "fss") oi.fss = v;
        const auto row = compute_row(build_source(oi), build_detector(oi),
                                     plan, strategy, backend);
        rows.push_back(
            {v, row.bell_s, row.qber_di, row.qber_bb84, row.rate_di,
             row.rate_bb84});
    }
    return rows;
}

int cmd_eval(const SourceOpts& o, bool json, std::ostream& out) {
    const auto plan = build_plan(o);
    const auto row = compute_row(build_source(o), build_detector(o), plan,
                                 build_binning(o), build_backend(o));
    if (json) {
        nlohmann::json j;
        j["bell_s"] = row.bell_s;
        j["qber_di"] = row.qber_di;
        j["qber_bb84"] = row.qber_bb84;
        j["rate_di"] = row.rate_di;
        j["rate_bb84"] = row.rate_bb84;
        out << j.dump() << "\n";
    } else {
        out << "S      = " << fmt(row.bell_s) << "\n"
            << "Q_DI   = " << fmt(row.qber_di) << "\n"
            << "Q_BB84 = " << fmt(row.qber_bb84) << "\n"
            << "r_DI   = " << fmt(row.rate_di) << "\n"
            << "r_BB84 = " << fmt(row.rate_bb84) << "\n";
    }
    return 0;
}

int cmd_sweep(const SourceOpts& o, const SweepArgs& sw, std::ostream&) {
    const auto plan = build_plan(o);
    const auto rows = sweep_rows(o, sw, plan);
    std::vector<std::string> cols = {sw.var};
    cols.insert(cols.end(), sweep_columns_tail.begin(),
                sweep_columns_tail.end());
    write_csv(sw.out,
              "entqkd sweep " + sw.var + " from=" + fmt(sw.from) +
                  " to=" + fmt(sw.to) + " steps=" + std::to_string(sw.steps) +
                  " | " + describe(o, plan, sw.var),
              cols, rows);
    return 0;
}

struct OptimizeArgs {
    std::string objective = "bell";
    std::string free_list;
    std::uint64_t seed = 1;
    long budget = 60000;
    int grid = 5;
    int starts = 5;
};

opt::Problem build_problem(const SourceOpts& o, const OptimizeArgs& oa) {
    opt::Problem prob;
    prob.objective = oa.objective == "di-rate"
                         ? opt::Objective::di_key_rate
                         : opt::Objective::bell_parameter;
    std::string free = oa.free_list;
    if (free.empty())
        free = o.source == "spdc" ? "a1,a2,b1,b2,xi" : "a1,a2,b1,b2";
    std::stringstream ss(free);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "a1") prob.free_vars.push_back(opt::Var::theta_a1);
        else if (tok == "a2") prob.free_vars.push_back(opt::Var::theta_a2);
        else if (tok == "b1") prob.free_vars.push_back(opt::Var::theta_b1);
        else if (tok == "b2") prob.free_vars.push_back(opt::Var::theta_b2);
        else if (tok == "xi") prob.free_vars.push_back(opt::Var::xi);
        else
            throw std::invalid_argument("unknown free variable '" + tok +
                                        "' (use a1,a2,b1,b2,xi)");
    }
    prob.source = build_source(o);
    prob.detector = build_detector(o);
    prob.strategy = build_binning(o);
    prob.plan = build_plan(o);
    prob.grid_per_var = oa.grid;
    prob.starts = oa.starts;
    return prob;
}

int cmd_optimize(const SourceOpts& o, const OptimizeArgs& oa, bool json,
                 std::ostream& out) {
    const auto prob = build_problem(o, oa);
    const auto res = opt::optimize(prob, oa.seed, oa.budget);
    if (json) {
        nlohmann::json j;
        j["best_value"] = res.best_value;
        for (const auto& [v, x] : res.argmax) j[opt::var_name(v)] = x;
        j["evaluations"] = res.evaluations;
        j["converged"] = res.converged;
        out << j.dump() << "\n";
    } else {
        out << "best_value  = " << fmt(res.best_value) << "\n";
        for (const auto& [v, x] : res.argmax)
            out << opt::var_name(v) << (v == opt::Var::xi ? "          " : "    ")
                << "= " << fmt(x) << "\n";
        out << "evaluations = " << res.evaluations << "\n"
            << "converged   = " << (res.converged ? "true" : "false") << "\n";
    }
    return 0;
}

// Figures 3-5 share the same eta sweeps of the QD source.
void write_qd_eta_sweeps(int figure, const fs::path& dir) {
    for (const double p : {1.0, 0.9}) {
        for (const double fss : {0.0, 0.25}) {
            SourceOpts o;
            o.source = "qd";
            o.p = p;
            o.fss = fss;
            o.nu = 1e-3;
            SweepArgs sw{"eta", 0.8, 1.0, 101, ""};
            const MeasurementPlan plan;
            const auto rows = sweep_rows(o, sw, plan);
            std::vector<std::string> cols = {"eta"};
            cols.insert(cols.end(), sweep_columns_tail.begin(),
                        sweep_columns_tail.end());
            const std::string name = "fig" + std::to_string(figure) + "_p" +
                                     fmt(p) + "_fss" + fmt(fss) + ".csv";
            write_csv(dir / name,
                      "entqkd reproduce figure " + std::to_string(figure) +
                          " | sweep eta from=0.8 to=1 steps=101 | " +
                          describe(o, plan, "eta"),
                      cols, rows);
        }
    }
}

int cmd_reproduce(int figure, const fs::path& outdir, std::ostream& out) {
    fs::create_directories(outdir);
    if (figure == 2) {
        // standard binning at the ideal-pair angles
        SourceOpts o;
        o.source = "spdc";
        SweepArgs sw{"xi", 0.01, 1.2, 120,
                     (outdir / "fig2_standard.csv").string()};
        cmd_sweep(o, sw, out);

        // transmitted-only binning at jointly optimized angles
        OptimizeArgs oa;
        SourceOpts ov = o;
        ov.binning = "vivoli";
        const auto prob = build_problem(ov, oa);
        const auto res = opt::optimize(prob, oa.seed, oa.budget);
        const double xi_opt = res.argmax.at(opt::Var::xi);
        const std::array<double, 4> ang = {
            res.argmax.at(opt::Var::theta_a1), res.argmax.at(opt::Var::theta_a2),
            res.argmax.at(opt::Var::theta_b1), res.argmax.at(opt::Var::theta_b2)};
        write_csv(outdir / "fig2_summary.csv",
                  "entqkd reproduce figure 2 | transmitted-only binning "
                  "optimum | source=spdc eta=1 nu=0 seed=" +
                      std::to_string(oa.seed) +
                      " budget=" + std::to_string(oa.budget),
                  {"s_max", "xi_opt", "theta_a1", "theta_a2", "theta_b1",
                   "theta_b2", "evaluations", "converged"},
                  {{res.best_value, xi_opt, ang[0], ang[1], ang[2], ang[3],
                    double(res.evaluations), res.converged ? 1.0 : 0.0}});

        ov.angles = fmt(ang[0]) + "," + fmt(ang[1]) + "," + fmt(ang[2]) + "," +
                    fmt(ang[3]);
        SweepArgs swv{"xi", 0.01, 1.2, 120,
                      (outdir / "fig2_vivoli.csv").string()};
        cmd_sweep(ov, swv, out);
        return 0;
    }
    if (figure == 3) {
        write_qd_eta_sweeps(3, outdir);
        std::vector<std::vector<double>> rows;
        for (const double fss : {0.0, 0.25})
            rows.push_back({fss, metrics::di_security_thresholds(fss).min_bell});
        write_csv(outdir / "fig3_thresholds.csv",
                  "entqkd reproduce figure 3 | minimum Bell parameter for a "
                  "positive DI key rate along S = sqrt(2)(1+cos fss)(1-2Q)",
                  {"fss", "bell_min_di"}, rows);
        return 0;
    }
    if (figure == 4) {
        write_qd_eta_sweeps(4, outdir);
        std::vector<std::vector<double>> rows;
        for (const double fss : {0.0, 0.25})
            rows.push_back({fss, metrics::di_security_thresholds(fss).max_qber});
        write_csv(outdir / "fig4_thresholds_di.csv",
                  "entqkd reproduce figure 4 | maximal tolerable DI QBER "
                  "along S = sqrt(2)(1+cos fss)(1-2Q)",
                  {"fss", "qber_max_di"}, rows);
        write_csv(outdir / "fig4_thresholds_bb84.csv",
                  "entqkd reproduce figure 4 | maximal tolerable BB84 QBER",
                  {"qber_max_bb84"}, {{rates::bb84_qber_threshold()}});
        return 0;
    }
    if (figure == 5) {
        write_qd_eta_sweeps(5, outdir);
        return 0;
    }
    throw std::invalid_argument("unknown figure id " + std::to_string(figure) +
                                " (expected 2, 3, 4 or 5)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"entanglement-based QKD feasibility calculator"};
    app.require_subcommand(1);

    SourceOpts oe, os, oo;
    bool eval_json = false, opt_json = false;
    SweepArgs sw;
    OptimizeArgs oa;
    int figure = 0;
    std::string outdir = ".";

    auto* eval = app.add_subcommand(
        "eval", "Bell parameter, QBERs and key rates at one point");
    add_model_flags(eval, oe);
    eval->add_flag("--json", eval_json, "machine-readable output");

    auto* sweep = app.add_subcommand(
        "sweep", "CSV of metrics along one swept variable");
    add_model_flags(sweep, os);
    sweep->add_option("--var", sw.var, "swept variable")
        ->required()
        ->check(CLI::IsMember({"xi", "eta", "nu", "p", "fss"}));
    sweep->add_option("--from", sw.from, "range start")->required();
    sweep->add_option("--to", sw.to, "range end")->required();
    sweep->add_option("--steps", sw.steps, "number of rows")->required();
    sweep->add_option("--out", sw.out, "output CSV path")->required();

    auto* opt_cmd = app.add_subcommand(
        "optimize", "maximize the Bell parameter or the DI key rate");
    add_model_flags(opt_cmd, oo);
    opt_cmd->add_option("--objective", oa.objective, "objective function")
        ->check(CLI::IsMember({"bell", "di-rate"}));
    opt_cmd->add_option("--free", oa.free_list,
                        "comma list from a1,a2,b1,b2,xi");
    opt_cmd->add_option("--seed", oa.seed, "rng seed (default 1)");
    opt_cmd->add_option("--budget", oa.budget,
                        "objective evaluation budget (default 60000)");
    opt_cmd->add_option("--grid", oa.grid,
                        "coarse grid points per variable (default 5)");
    opt_cmd->add_option("--starts", oa.starts,
                        "local refinements (default 5)");
    opt_cmd->add_flag("--json", opt_json, "machine-readable output");

    auto* rep = app.add_subcommand(
        "reproduce", "figure data as CSV files");
    rep->add_option("--figure", figure, "figure id (2, 3, 4 or 5)")
        ->required();
    rep->add_option("--outdir", outdir, "output directory (default .)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto parsed = app.get_subcommands();
        out << (parsed.empty() ? app.help() : parsed.front()->help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n"
            << "run 'entqkd --help' for usage\n";
        return 2;
    }

    try {
        if (eval->parsed()) return cmd_eval(oe, eval_json, out);
        if (sweep->parsed()) return cmd_sweep(os, sw, out);
        if (opt_cmd->parsed()) return cmd_optimize(oo, oa, opt_json, out);
        return cmd_reproduce(figure, outdir, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace entqkd::cli
