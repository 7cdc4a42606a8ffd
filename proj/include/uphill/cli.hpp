#pragma once

// Command-line driver: instanton | macro | solve | shoot.
// Every run writes <out>.csv (x,m,h,current) and <out>.json (flags, report,
// checks, SHA-256 of the CSV). No timestamps or host data enter the outputs,
// so identical invocations give identical files.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "uphill/errors.hpp"
#include "uphill/grid_kernel.hpp"
#include "uphill/instanton.hpp"
#include "uphill/macro_profile.hpp"
#include "uphill/newton_solver.hpp"
#include "uphill/seed_profile.hpp"
#include "uphill/shooting.hpp"
#include "uphill/thermo.hpp"

namespace uphill::cli {

using json = nlohmann::ordered_json;

struct Options {
    double beta = 1.25;
    double epsilon = 0.025;
    double dx = 0.05;
    double mu0 = std::nan("");
    double mu = std::nan("");
    double j = std::nan("");
    double eta = std::nan("");
    double half_length = std::nan("");  // instanton only
    double instanton_tol = 1e-13;
    SolverConfig solver;
    std::string out = "run";
    std::vector<std::string> checks;
    bool seed_only = false;
    std::string sweep;
};

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("cli", "SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

inline std::string profile_csv(const Profile& m, const Profile* h, const Profile* current) {
    std::string s = "x,m,h,current\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        s += fmt17(m.grid.x(i)) + "," + fmt17(m[i]) + "," + fmt17(h ? (*h)[i] : 0.0) + "," +
             fmt17(current ? (*current)[i] : 0.0) + "\n";
    }
    return s;
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cli", "cannot open " + path + " for writing");
    f << data;
    if (!f) throw Error("cli", "write to " + path + " failed");
}

// Writes <out>.csv and <out>.json; the JSON carries the CSV hash.
inline void export_profile(const std::string& out, const Profile& m, const Profile* h, const Profile* current,
                           json report) {
    const std::string csv = profile_csv(m, h, current);
    write_file(out + ".csv", csv);
    report["csv_sha256"] = sha256_hex(csv);
    write_file(out + ".json", report.dump(2) + "\n");
}

inline json flags_json(const std::string& command, const Options& o) {
    json f;
    f["command"] = command;
    f["beta"] = o.beta;
    f["epsilon"] = o.epsilon;
    f["dx"] = o.dx;
    const auto opt = [&](const char* key, double v) {
        if (!std::isnan(v)) f[key] = v;
    };
    opt("mu0", o.mu0);
    opt("mu", o.mu);
    opt("j", o.j);
    opt("eta", o.eta);
    opt("half_length", o.half_length);
    f["alpha"] = o.solver.alpha;
    f["inner_tol"] = o.solver.inner_tol;
    f["outer_tol"] = o.solver.outer_tol;
    f["max_inner"] = o.solver.max_inner;
    f["max_outer"] = o.solver.max_outer;
    f["seed_only"] = o.seed_only;
    f["check"] = o.checks;
    f["out"] = o.out;
    return f;
}

inline json report_json(const SolverReport& r) {
    json j;
    j["j"] = r.j;
    j["mu0"] = r.mu0;
    j["mu_final"] = r.mu_final;
    j["residual"] = r.residual;
    j["h_consistency"] = r.h_consistency;
    j["rho_estimate"] = r.rho_estimate;
    j["gamma"] = r.gamma;
    j["seed_gamma"] = r.seed_gamma;
    j["tau_estimate"] = r.tau_estimate;
    j["tau_bound"] = r.tau_bound;
    j["delta_seed"] = r.delta_seed;
    j["h_drift"] = r.h_drift;
    j["x_glue"] = r.x_glue;
    j["m_glue"] = r.m_glue;
    j["outer_iterations"] = r.outer_iterations;
    j["outer_norms"] = r.outer_norms;
    j["outer_sup_norms"] = r.outer_sup_norms;
    j["inner_norms"] = r.inner_norms;
    // NaN is not valid JSON; the library writes null for it
    return j;
}

inline const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{"residual", "consistency", "contraction", "spectral",
                                                "current",  "uphill",      "shape",       "target"};
    return names;
}

// Invariant checks on a computed stationary pair. Values are the measured
// quantities; pass flags apply the fixed thresholds.
struct CheckContext {
    const ThermoParams* params;
    const KernelTable* kernel;
    const Solution* solution;
    const Profile* current;
    double mu_target = std::nan("");
};

inline json evaluate_checks(const CheckContext& c, const std::vector<std::string>& selected, bool& all_pass) {
    const Solution& s = *c.solution;
    const SolverReport& r = s.report;
    const GridSpec& g = s.m.grid;
    json out = json::object();
    all_pass = true;
    for (const std::string& name : selected) {
        double value = 0.0;
        bool pass = false;
        if (name == "residual") {
            value = r.residual;
            pass = value < 1e-8;
        } else if (name == "consistency") {
            value = r.h_consistency;
            pass = value < 1e-10;
        } else if (name == "contraction") {
            value = r.rho_estimate;
            pass = r.outer_iterations > 0 && value < 1.0;
        } else if (name == "spectral") {
            value = r.gamma;
            pass = value < 1.0;
        } else if (name == "current") {
            const double target = r.j * g.epsilon;
            for (std::size_t i = 0; i < g.n_points; ++i) {
                if (std::abs(g.x(i)) > g.half_length() - 2.0 + 1e-9) continue;
                value = std::max(value, std::abs((*c.current)[i] - target) / std::abs(target));
            }
            pass = target > 0.0 && value <= 0.02;
        } else if (name == "uphill") {
            value = r.j;
            pass = r.j > 0.0 && s.m.front() < 0.0 && 0.0 < s.m.back();
        } else if (name == "shape") {
            const ShapeSummary sh = bump_shape(s.m);
            value = sh.m_peak - s.m.back();
            pass = sh.single_bump && value > 0.0;
        } else if (name == "target") {
            if (std::isnan(c.mu_target)) throw ConfigError("cli", "check 'target' needs a shooting target");
            value = std::abs(r.mu_final - c.mu_target);
            pass = value < 1e-6;
        } else {
            throw ConfigError("cli", "unknown check '" + name + "'");
        }
        out[name] = json{{"value", value}, {"pass", pass}};
        all_pass = all_pass && pass;
    }
    return out;
}

inline std::vector<std::string> expand_checks(const std::vector<std::string>& requested, bool with_target) {
    std::vector<std::string> out;
    for (const std::string& c : requested) {
        if (c == "all") {
            for (const std::string& k : known_checks()) {
                if (k != "target" || with_target) out.push_back(k);
            }
        } else {
            out.push_back(c);
        }
    }
    return out;
}

inline json grid_json(const GridSpec& g, const KernelTable& k) {
    return json{{"n_points", g.n_points}, {"half_length", g.half_length()}, {"dx", g.dx}, {"kernel", k.name},
                {"kernel_support", k.support}};
}

inline double require_value(double v, const char* flag) {
    if (std::isnan(v)) throw ConfigError("cli", std::string("missing required flag ") + flag);
    return v;
}

inline int cmd_instanton(const Options& o) {
    const ThermoParams p = make_thermo(o.beta);
    const double r = std::isnan(o.half_length) ? default_instanton_half_length(o.epsilon, o.dx) : o.half_length;
    const Instanton inst = solve_instanton(p, r, o.dx, o.instanton_tol);
    const Instanton longer = solve_instanton(p, r + 5.0, o.dx, o.instanton_tol);
    json rep;
    rep["flags"] = flags_json("instanton", o);
    rep["grid"] = grid_json(inst.profile.grid, inst.kernel);
    rep["m_beta"] = p.m_beta;
    rep["m_star"] = p.m_star;
    rep["residual"] = inst.residual;
    rep["sweeps"] = inst.sweeps();
    rep["antisymmetry_defect"] = antisymmetry_defect(inst.profile);
    const double a = tail_rate(inst);
    const double a5 = tail_rate(longer);
    rep["tail_rate"] = a;
    rep["tail_rate_longer"] = a5;
    const double step = min_increment(inst);
    const bool monotone = step > 0.0;
    rep["min_increment"] = step;
    rep["strictly_increasing"] = monotone;
    json checks = json::object();
    bool pass = true;
    if (!o.checks.empty()) {
        const bool ok_res = inst.residual < 1e-8;
        const bool ok_tail = std::abs(a5 - a) <= 0.05 * a;
        checks["residual"] = json{{"value", inst.residual}, {"pass", ok_res}};
        checks["monotone"] = json{{"value", step}, {"pass", monotone}};
        checks["tail"] = json{{"value", std::abs(a5 - a) / a}, {"pass", ok_tail}};
        pass = ok_res && monotone && ok_tail;
    }
    rep["checks"] = checks;
    export_profile(o.out, inst.profile, nullptr, nullptr, rep);
    return pass ? 0 : 1;
}

inline int cmd_macro(const Options& o) {
    const ThermoParams p = make_thermo(o.beta);
    const double mu_plus = require_value(o.mu0, "--mu0");
    const MacroSpec spec = make_macro_spec(o.beta, p.m_beta, mu_plus);
    const GridSpec g = build_grid(o.epsilon, o.dx);
    // rescaled onto [0, 1/eps]: M(x eps), H(x eps) and current j_M eps
    std::string csv = "x,m,h,current\n";
    for (std::size_t i = g.mid(); i < g.n_points; ++i) {
        const double s = i == g.last() ? 1.0 : g.x(i) / g.half_length();
        csv += fmt17(g.x(i)) + "," + fmt17(solve_macro_profile(spec, s)) + "," + fmt17(macro_field(spec, s)) + "," +
               fmt17(spec.j_M * g.epsilon) + "\n";
    }
    json rep;
    rep["flags"] = flags_json("macro", o);
    rep["mu_minus"] = spec.mu_minus;
    rep["mu_plus"] = spec.mu_plus;
    rep["j_M"] = spec.j_M;
    rep["M_half"] = solve_macro_profile(spec, 0.5);
    rep["checks"] = json::object();
    write_file(o.out + ".csv", csv);
    rep["csv_sha256"] = sha256_hex(csv);
    write_file(o.out + ".json", rep.dump(2) + "\n");
    return 0;
}

inline int cmd_solve(const Options& o) {
    const ThermoParams p = make_thermo(o.beta);
    const double mu0 = require_value(o.mu0, "--mu0");
    const GridSpec g = build_grid(o.epsilon, o.dx);
    const KernelTable k = build_kernel(g);
    const Instanton inst = solve_instanton(p, default_instanton_half_length(o.epsilon, o.dx), o.dx, o.instanton_tol);
    double j = o.j;
    if (std::isnan(j)) j = seed_current(p, mu0, build_seed(p, g, inst, mu0).m_glue);
    const Solution s = o.seed_only ? seed_solution(p, k, inst, mu0, j) : outer_solve(p, k, inst, mu0, j, o.solver);
    const Profile current = current_profile(p, k, s.m);
    json rep;
    rep["flags"] = flags_json("solve", o);
    rep["grid"] = grid_json(g, k);
    rep["m_beta"] = p.m_beta;
    rep["m_star"] = p.m_star;
    rep["report"] = report_json(s.report);
    rep["uphill"] = s.report.j > 0.0 && s.m.back() > s.m.front();
    bool pass = true;
    const CheckContext ctx{&p, &k, &s, &current};
    rep["checks"] = evaluate_checks(ctx, expand_checks(o.checks, false), pass);
    export_profile(o.out, s.m, &s.h, &current, rep);
    return pass ? 0 : 1;
}

inline int cmd_shoot(const Options& o) {
    const ThermoParams p = make_thermo(o.beta);
    const double mu = require_value(o.mu, "--mu");
    const GridSpec g = build_grid(o.epsilon, o.dx);
    const KernelTable k = build_kernel(g);
    const Instanton inst = solve_instanton(p, default_instanton_half_length(o.epsilon, o.dx), o.dx, o.instanton_tol);
    const double eta = std::isnan(o.eta) ? default_eta(p) : o.eta;
    const ShootResult r = shoot(p, k, inst, mu, eta, o.solver);
    const Solution& s = r.solution;
    const Profile current = current_profile(p, k, s.m);
    json rep;
    rep["flags"] = flags_json("shoot", o);
    rep["grid"] = grid_json(g, k);
    rep["m_beta"] = p.m_beta;
    rep["m_star"] = p.m_star;
    rep["j"] = r.j;
    rep["eta_used"] = r.eta;
    rep["monotone"] = r.monotone;
    json hist = json::array();
    for (const ShotPoint& pt : r.history) hist.push_back(json{{"j", pt.j}, {"mu0", pt.mu0}, {"mu_final", pt.mu_final}});
    rep["history"] = hist;
    rep["report"] = report_json(s.report);
    rep["uphill"] = r.j > 0.0 && s.m.back() > s.m.front();
    bool pass = true;
    const CheckContext ctx{&p, &k, &s, &current, mu};
    rep["checks"] = evaluate_checks(ctx, expand_checks(o.checks, true), pass);
    export_profile(o.out, s.m, &s.h, &current, rep);
    return pass ? 0 : 1;
}

inline int dispatch(const std::string& command, const Options& o) {
    o.solver.validate();
    if (!(o.epsilon > 0.0) || !(o.dx > 0.0)) throw ConfigError("cli", "epsilon and dx must be positive");
    if (command == "instanton") return cmd_instanton(o);
    if (command == "macro") return cmd_macro(o);
    if (command == "solve") return cmd_solve(o);
    if (command == "shoot") return cmd_shoot(o);
    throw ConfigError("cli", "unknown command " + command);
}

// --sweep key=v1,v2,...: one run per value, outputs <out>_<key><index>
inline int run_sweep(const std::string& command, Options o) {
    const auto eq = o.sweep.find('=');
    if (eq == std::string::npos) throw ConfigError("cli", "--sweep expects key=v1,v2,...");
    const std::string key = o.sweep.substr(0, eq);
    std::map<std::string, double*> targets{{"beta", &o.beta}, {"epsilon", &o.epsilon}, {"dx", &o.dx},
                                           {"mu0", &o.mu0},   {"mu", &o.mu},           {"j", &o.j},
                                           {"eta", &o.eta},   {"alpha", &o.solver.alpha}};
    const auto it = targets.find(key);
    if (it == targets.end()) throw ConfigError("cli", "cannot sweep over '" + key + "'");
    std::vector<double> values;
    std::stringstream ss(o.sweep.substr(eq + 1));
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("cli", "bad sweep value '" + item + "'");
        }
    }
    if (values.empty()) throw ConfigError("cli", "--sweep has no values");
    const std::string base = o.out;
    o.sweep.clear();
    int status = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        *it->second = values[i];
        o.out = base + "_" + key + std::to_string(i);
        status = std::max(status, dispatch(command, o));
    }
    return status;
}

inline int run(int argc, const char* const* argv) {
    CLI::App app{"Stationary uphill-diffusion profiles for the 1d nonlocal mean-field equation"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file with flag defaults (flags win)");
    Options o;
    app.add_option("--beta", o.beta, "inverse temperature, > 1");
    app.add_option("--epsilon", o.epsilon, "scaling parameter; domain is [-1/eps, 1/eps]");
    app.add_option("--dx", o.dx, "grid spacing; must divide 1/eps");
    app.add_option("--mu0", o.mu0, "seed boundary value (solve) or macroscopic right value (macro)");
    app.add_option("--mu", o.mu, "shooting target boundary value");
    app.add_option("--j", o.j, "current (solve; default: current of the seed)");
    app.add_option("--eta", o.eta, "shooting bracket half width");
    app.add_option("--half-length", o.half_length, "interface half length (instanton)");
    app.add_option("--alpha", o.solver.alpha, "weight of the exponential norm");
    app.add_option("--inner-tol", o.solver.inner_tol, "Newton residual tolerance");
    app.add_option("--outer-tol", o.solver.outer_tol, "tolerance on successive fields");
    app.add_option("--max-inner", o.solver.max_inner, "Newton step cap");
    app.add_option("--max-outer", o.solver.max_outer, "outer step cap");
    app.add_option("--out", o.out, "output prefix for .csv and .json");
    app.add_option("--check", o.checks, "checks deciding the exit status (comma list or 'all')")->delimiter(',');
    app.add_flag("--seed-only", o.seed_only, "emit the seed pair without iterating");
    app.add_option("--sweep", o.sweep, "key=v1,v2,...: one run per value");
    app.add_subcommand("instanton", "zero-current interface on [-R, R]");
    app.add_subcommand("macro", "macroscopic profile from m_beta down to --mu0");
    app.add_subcommand("solve", "stationary pair for boundary seed --mu0 (and optional --j)");
    app.add_subcommand("shoot", "find the current whose boundary value is --mu");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return o.sweep.empty() ? dispatch(command, o) : run_sweep(command, o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace uphill::cli
