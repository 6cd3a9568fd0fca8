// mlab: command-line front end for the shell wrinkling lab.
//
// Every subcommand writes its result into --out-dir (JSON or CSV per
// --format) and echoes it on stdout. A config file of key=value lines may
// supply any flag; flags given on the command line win.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mlab/certificates.hpp"
#include "mlab/error.hpp"
#include "mlab/exec.hpp"
#include "mlab/minimizer.hpp"
#include "mlab/oracle.hpp"
#include "mlab/patterns.hpp"
#include "mlab/serialize.hpp"
#include "mlab/sweep.hpp"

namespace fs = std::filesystem;
using namespace mlab;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCertificate = 4;

struct Globals {
    std::string out_dir = ".";
    std::string format = "json";
    int threads = 0;
    std::uint64_t seed = 1;
};

struct ParamFlags {
    std::string model = "vkd";
    double h = 1e-3;
    double lambda = 0.25;
    double rho = 1.5;
    std::string m = "inf";

    ModelParams params() const {
        ModelParams mp;
        mp.h = h;
        mp.lambda = lambda;
        mp.rho = rho;
        mp.m = parse_m(m);
        return mp;
    }
    Functional functional() const { return functional_from_string(model); }

    static double parse_m(const std::string& s) {
        if (s == "inf" || s == "Inf" || s == "INF") return kInf;
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw PreconditionError("--m expects a number or inf, got '" + s + "'");
        }
    }
};

void add_param_flags(CLI::App* sub, ParamFlags& p) {
    sub->add_option("--model", p.model, "vkd, nl or fs")->capture_default_str();
    sub->add_option("--h", p.h, "thickness")->capture_default_str();
    sub->add_option("--lambda", p.lambda, "axial compression")->capture_default_str();
    sub->add_option("--rho", p.rho, "mandrel radius")->capture_default_str();
    sub->add_option("--m", p.m, "slope bound, number or inf")->capture_default_str();
}

Domain parse_grid(const std::string& s) {
    const auto x = s.find_first_of("xX");
    if (x == std::string::npos) throw PreconditionError("--grid expects NthetaxNz, e.g. 16x512");
    try {
        return Domain::omega(std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1)));
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const PreconditionError*>(&e)) throw;
        throw PreconditionError("--grid expects NthetaxNz, got '" + s + "'");
    }
}

// Results are written to <out-dir>/<name>.<format> and echoed on stdout.
class Output {
public:
    explicit Output(const Globals& g) : g_(g) {
        if (g_.format != "json" && g_.format != "csv") throw PreconditionError("--format must be csv or json");
        fs::create_directories(g_.out_dir);
    }

    fs::path path(const std::string& name, const std::string& ext) const { return fs::path(g_.out_dir) / (name + ext); }
    bool csv() const { return g_.format == "csv"; }

    void emit(const std::string& name, const json& body, const std::string& csv_text) const {
        std::string text;
        if (csv()) {
            text = csv_text;
        } else {
            text = with_schema(body).dump(2) + "\n";
        }
        const fs::path p = path(name, csv() ? ".csv" : ".json");
        std::ofstream os(p);
        if (!os) throw PreconditionError("cannot write " + p.string());
        os << text;
        std::cout << text;
    }

private:
    Globals g_;
};

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// key,value rendering of a flat JSON object for --format csv.
std::string kv_csv(const std::string& what, const json& j) {
    std::ostringstream os;
    os << "# " << kSchema << " " << what << "\nkey,value\n";
    std::function<void(const std::string&, const json&)> walk = [&](const std::string& prefix, const json& v) {
        if (v.is_object()) {
            for (auto it = v.begin(); it != v.end(); ++it)
                walk(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
        } else if (v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i) walk(prefix + "." + std::to_string(i), v[i]);
        } else if (v.is_string()) {
            os << prefix << ',' << v.get<std::string>() << '\n';
        } else if (v.is_number_float()) {
            os << prefix << ',' << num(v.get<double>()) << '\n';
        } else {
            os << prefix << ',' << v.dump() << '\n';
        }
    };
    walk("", j);
    return os.str();
}

std::string certificates_csv(const std::vector<CertificateReport>& v) {
    std::ostringstream os;
    os << "# " << kSchema << " certificates\nname,lhs,rhs,slack,passed,mode,ratio,detail\n";
    for (const auto& r : v)
        os << r.name << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.slack) << ',' << (r.passed ? 1 : 0)
           << ',' << to_string(r.mode) << ',' << num(r.ratio) << ',' << r.detail << '\n';
    return os.str();
}

void write_fields(const std::string& prefix, const Configuration& c) {
    write_gfld(prefix + "_rho.gfld", c.comp_rho);
    write_gfld(prefix + "_theta.gfld", c.comp_theta);
    write_gfld(prefix + "_z.gfld", c.comp_z);
}

Configuration read_fields(const std::string& prefix, Functional f, const ModelParams& mp) {
    Configuration c;
    c.model = f == Functional::NL ? Model::NL : Model::VKD;
    c.comp_rho = read_gfld(prefix + "_rho.gfld");
    c.comp_theta = read_gfld(prefix + "_theta.gfld");
    c.comp_z = read_gfld(prefix + "_z.gfld");
    c.params = mp;
    c.validate();
    return c;
}

ModelParams read_params_file(const std::string& path, ModelParams base) {
    std::ifstream is(path);
    if (!is) throw PreconditionError("cannot read " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw PreconditionError(path + ": " + e.what());
    }
    // Accept both a bare parameter object and any mlab/1 document carrying "params".
    from_json(j.contains("params") ? j.at("params") : j, base);
    return base;
}

EnergyReport evaluate_energy(Functional f, const Configuration& c) {
    switch (f) {
        case Functional::VKD: return vkd_energy(c);
        case Functional::FS: return fs_energy(c);
        case Functional::NL: return nl_energy(c);
    }
    throw PreconditionError("unknown model");
}

// Flat key=value config. Keys are long flag names without dashes; each one
// is routed to the global app or to the selected subcommand, ahead of the
// command-line arguments so that those take precedence.
std::vector<std::string> merge_config(CLI::App& app, int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (config.empty()) return args;

    std::ifstream is(config);
    if (!is) throw PreconditionError("cannot read config file " + config);
    std::size_t sub_pos = args.size();
    CLI::App* sub = nullptr;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (CLI::App* s = app.get_subcommand_no_throw(args[i]); s != nullptr) {
            sub = s;
            sub_pos = i;
            break;
        }
    }
    std::vector<std::string> global_args, sub_args;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw PreconditionError(config + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto l = s.find_first_not_of(" \t\r");
            const auto r = s.find_last_not_of(" \t\r");
            return l == std::string::npos ? std::string() : s.substr(l, r - l + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string flag = "--" + key;
        if (app.get_option_no_throw(flag) != nullptr) {
            global_args.push_back(flag + "=" + value);
        } else if (sub != nullptr && sub->get_option_no_throw(flag) != nullptr) {
            sub_args.push_back(flag + "=" + value);
        } else {
            throw PreconditionError(config + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(sub_pos));
    out.insert(out.begin(), global_args.begin(), global_args.end());
    if (sub != nullptr) {
        out.push_back(args[sub_pos]);
        out.insert(out.end(), sub_args.begin(), sub_args.end());
        out.insert(out.end(), args.begin() + static_cast<long>(sub_pos) + 1, args.end());
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mlab: wrinkling of compressed cylindrical shells on a mandrel"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    // -h is taken by the thickness flag.
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_help_all_flag("--help-all", "Expand all help");

    Globals g;
    std::string config_path;
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--format", g.format, "csv or json")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0: all cores)")->capture_default_str();
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--config", config_path, "key=value file supplying any flag");

    // pattern
    ParamFlags pat;
    std::string pat_regime, pat_grid, pat_out = "pattern";
    int pat_n = 0, pat_k = 0;
    double pat_delta = 0, pat_spc = kMinSamplesPerCell;
    auto* c_pattern = app.add_subcommand("pattern", "build the regime-selected construction");
    add_param_flags(c_pattern, pat);
    c_pattern->add_option("--regime", pat_regime, "override the selected branch");
    c_pattern->add_option("--n", pat_n, "override the wrinkle count");
    c_pattern->add_option("--k", pat_k, "override the tilt count (FS)");
    c_pattern->add_option("--delta", pat_delta, "override the wrinkle width");
    c_pattern->add_option("--samples-per-cell", pat_spc, "grid nodes per wrinkle cell")->capture_default_str();
    c_pattern->add_option("--grid", pat_grid, "explicit grid NthetaxNz");
    c_pattern->add_option("--out", pat_out, "field file prefix inside --out-dir")->capture_default_str();

    // evaluate
    ParamFlags ev;
    std::string ev_fields, ev_params;
    auto* c_eval = app.add_subcommand("evaluate", "energy of a stored configuration");
    add_param_flags(c_eval, ev);
    c_eval->add_option("--fields", ev_fields, "GFLD prefix (reads _rho/_theta/_z)")->required();
    c_eval->add_option("--params", ev_params, "JSON parameters, overriding the flags");

    // minimize
    ParamFlags mn;
    std::string mn_grid = "16x256", mn_init = "UNBUCKLED_PLUS_NOISE", mn_out = "minimize", mn_obstacle = "PROJECTION",
                mn_start;
    MinimizeOptions mopt;
    auto* c_min = app.add_subcommand("minimize", "minimize the discrete energy");
    add_param_flags(c_min, mn);
    c_min->add_option("--grid", mn_grid, "grid NthetaxNz")->capture_default_str();
    c_min->add_option("--init", mn_init, "UNBUCKLED_PLUS_NOISE, PATTERN_SEED or FILE")->capture_default_str();
    c_min->add_option("--start", mn_start, "GFLD prefix for --init FILE");
    c_min->add_option("--max-iters", mopt.max_iterations, "iterations per penalty loop")->capture_default_str();
    c_min->add_option("--tol", mopt.gradient_tolerance, "projected-gradient tolerance")->capture_default_str();
    c_min->add_option("--noise", mopt.noise_amplitude, "initial noise amplitude")->capture_default_str();
    c_min->add_option("--obstacle", mn_obstacle, "PROJECTION or PENALTY")->capture_default_str();
    c_min->add_option("--out", mn_out, "field file prefix inside --out-dir")->capture_default_str();

    // sweep
    ParamFlags sw;
    SweepSpec spec;
    std::string sw_vary = "h", sw_mode = "CONSTRUCT", sw_route = "AUTO", sw_out = "sweep", sw_min_grid_theta;
    auto* c_sweep = app.add_subcommand("sweep", "log-spaced parameter sweep");
    add_param_flags(c_sweep, sw);
    c_sweep->add_option("--vary", sw_vary, "h, lambda, rho_minus_1 or m")->capture_default_str();
    c_sweep->add_option("--count", spec.count, "number of points")->capture_default_str();
    c_sweep->add_option("--lo", spec.lo, "smallest value")->capture_default_str();
    c_sweep->add_option("--hi", spec.hi, "largest value")->capture_default_str();
    c_sweep->add_option("--mode", sw_mode, "CONSTRUCT or MINIMIZE")->capture_default_str();
    c_sweep->add_option("--route", sw_route, "AUTO, GRID or REDUCED")->capture_default_str();
    c_sweep->add_option("--samples-per-cell", spec.samples_per_cell, "grid nodes per wrinkle cell")
        ->capture_default_str();
    c_sweep->add_option("--max-nodes", spec.max_nodes, "largest grid before AUTO switches route")
        ->capture_default_str();
    c_sweep->add_option("--max-iters", spec.minimize.max_iterations, "MINIMIZE iterations per loop")
        ->capture_default_str();
    c_sweep->add_option("--min-theta", spec.minimize_theta, "MINIMIZE grid n_theta")->capture_default_str();
    c_sweep->add_flag("--skip-failures", spec.skip_failures, "record failed points instead of aborting");
    c_sweep->add_option("--out", sw_out, "output name inside --out-dir")->capture_default_str();

    // fit
    std::string fit_table_path, fit_x = "x", fit_y = "excess";
    auto* c_fit = app.add_subcommand("fit", "log-log exponent fit of a CSV table");
    c_fit->add_option("--table", fit_table_path, "CSV table, e.g. a sweep")->required();
    c_fit->add_option("--x", fit_x, "abscissa column")->capture_default_str();
    c_fit->add_option("--y", fit_y, "ordinate column")->capture_default_str();

    // certify
    ParamFlags ce;
    std::string ce_fields, ce_params;
    auto* c_cert = app.add_subcommand("certify", "run the lower-bound certificates on stored fields");
    add_param_flags(c_cert, ce);
    c_cert->add_option("--fields", ce_fields, "GFLD prefix (reads _rho/_theta/_z)")->required();
    c_cert->add_option("--params", ce_params, "JSON parameters, overriding the flags");

    // interp
    std::string in_family = "all";
    int in_samples = 500;
    auto* c_interp = app.add_subcommand("interp", "sampled interpolation inequalities");
    c_interp->add_option("--family", in_family, "GN_1D, GN_2D_L43, GN_2D_L2, GN_2D_LINF, MIXED or all")
        ->capture_default_str();
    c_interp->add_option("--samples", in_samples, "samples per family")->capture_default_str();

    // oracle
    ParamFlags orc;
    auto* c_oracle = app.add_subcommand("oracle", "scaling-law prediction and regime boundaries");
    add_param_flags(c_oracle, orc);

    try {
        std::vector<std::string> args = merge_config(app, argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitPrecondition;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }

    try {
        if (g.threads < 0) throw PreconditionError("--threads must be non-negative");
        const Output out(g);

        if (c_pattern->parsed()) {
            const Functional f = pat.functional();
            const ModelParams mp = pat.params();
            RegimeChoice choice;
            if (pat_regime.empty() || pat_n <= 0 || pat_delta <= 0) choice = select_regime(f, mp);
            PatternParams& pp = choice.params;
            if (!pat_regime.empty()) pp.regime = regime_from_string(pat_regime);
            if (pat_n > 0) pp.n = pat_n;
            if (pat_k > 0) pp.k = pat_k;
            if (pat_delta > 0) pp.delta = pat_delta;
            const Domain dom = pat_grid.empty() ? pattern_domain(f, pp, pat_spc) : parse_grid(pat_grid);
            const Configuration c = build_pattern(f, mp, pp, dom);
            const EnergyReport rep = evaluate_energy(f, c);
            write_fields((fs::path(g.out_dir) / pat_out).string(), c);
            json body = {{"model", to_string(f)},
                         {"params", mp},
                         {"pattern", pp},
                         {"comparisons", choice.comparisons},
                         {"grid", {dom.n_theta, dom.n_z}},
                         {"energy", rep}};
            out.emit(pat_out, body, kv_csv("pattern", body));
        } else if (c_eval->parsed()) {
            const Functional f = ev.functional();
            ModelParams mp = ev.params();
            if (!ev_params.empty()) mp = read_params_file(ev_params, mp);
            const Configuration c = read_fields(ev_fields, f, mp);
            const EnergyReport rep = evaluate_energy(f, c);
            json body = {{"model", to_string(f)}, {"params", mp}, {"energy", rep}};
            out.emit("evaluate", body, kv_csv("evaluate", body));
        } else if (c_min->parsed()) {
            const Functional f = mn.functional();
            const ModelParams mp = mn.params();
            const Domain dom = parse_grid(mn_grid);
            mopt.seed = g.seed;
            mopt.initial = init_kind_from_string(mn_init);
            mopt.obstacle_mode = obstacle_mode_from_string(mn_obstacle);
            if (mopt.initial == InitKind::FILE) {
                if (mn_start.empty()) throw PreconditionError("--init FILE needs --start <prefix>");
                mopt.start = read_fields(mn_start, f, mp);
            }
            const MinimizeResult r = minimize(f, mp, dom, mopt);
            write_fields((fs::path(g.out_dir) / mn_out).string(), r.final);
            json body = r;
            if (out.csv()) {
                std::ostringstream os;
                os << "# " << kSchema << " minimize history model=" << to_string(f) << "\n"
                   << "iteration,objective,energy,projected_gradient,slope_linf\n";
                for (const auto& it : r.history)
                    os << it.iteration << ',' << num(it.objective) << ',' << num(it.energy) << ','
                       << num(it.projected_gradient) << ',' << num(it.slope_linf) << '\n';
                out.emit(mn_out, body, os.str());
                std::ofstream js(out.path(mn_out, ".json"));
                js << with_schema(body).dump(2) << "\n";
            } else {
                out.emit(mn_out, body, "");
            }
        } else if (c_sweep->parsed()) {
            spec.model = sw.functional();
            spec.fixed = sw.params();
            spec.varying = sweep_var_from_string(sw_vary);
            spec.mode = sweep_mode_from_string(sw_mode);
            spec.route = route_from_string(sw_route);
            spec.seed = g.seed;
            spec.threads = g.threads;
            const SweepResult r = run_sweep(spec);
            std::ostringstream os;
            write_csv(os, r);
            out.emit(sw_out, r, os.str());
        } else if (c_fit->parsed()) {
            std::ifstream is(fit_table_path);
            if (!is) throw PreconditionError("cannot read " + fit_table_path);
            const FitResult fr = fit_table(read_csv(is), fit_x, fit_y);
            json body = {{"table", fit_table_path}, {"x", fit_x}, {"y", fit_y}, {"fit", fr}};
            std::ostringstream os;
            os << "# " << kSchema << " fit x=" << fit_x << " y=" << fit_y << "\n"
               << "exponent,intercept,r_squared,residual_max,points_used\n"
               << num(fr.exponent) << ',' << num(fr.intercept) << ',' << num(fr.r_squared) << ','
               << num(fr.residual_max) << ',' << fr.points_used << '\n';
            out.emit("fit", body, os.str());
        } else if (c_cert->parsed()) {
            const Functional f = ce.functional();
            ModelParams mp = ce.params();
            if (!ce_params.empty()) mp = read_params_file(ce_params, mp);
            const Configuration c = read_fields(ce_fields, f, mp);
            const auto reports = certificates(f, c);
            json body = {{"model", to_string(f)}, {"params", mp}, {"certificates", reports},
                         {"all_passed", all_passed(reports)}};
            out.emit("certify", body, certificates_csv(reports));
            if (!all_passed(reports)) throw CertificateError("certificate failure");
        } else if (c_interp->parsed()) {
            std::vector<InterpFamily> fams;
            if (in_family == "all" || in_family == "ALL")
                fams = {InterpFamily::GN_1D, InterpFamily::GN_2D_L43, InterpFamily::GN_2D_L2,
                        InterpFamily::GN_2D_LINF, InterpFamily::MIXED};
            else
                fams = {interp_family_from_string(in_family)};
            std::vector<InterpolationReport> reps;
            bool ok = true;
            for (InterpFamily fam : fams) {
                reps.push_back(check_interpolation(fam, in_samples, g.seed));
                ok = ok && reps.back().violations == 0;
            }
            std::ostringstream os;
            os << "# " << kSchema << " interp samples=" << in_samples << " seed=" << g.seed << "\n"
               << "family,samples,skipped,violations,min_ratio,max_ratio,amplitude_error\n";
            for (const auto& r : reps)
                os << to_string(r.family) << ',' << r.samples << ',' << r.skipped << ',' << r.violations << ','
                   << num(r.min_ratio) << ',' << num(r.max_ratio) << ',' << num(r.amplitude_error) << '\n';
            out.emit("interp", json{{"families", reps}}, os.str());
            if (!ok) throw CertificateError("interpolation inequality violated");
        } else if (c_oracle->parsed()) {
            const Functional f = orc.functional();
            const ModelParams mp = orc.params();
            json body = {{"model", to_string(f)},
                         {"params", mp},
                         {"prediction", predict(f, mp)},
                         {"boundary", regime_boundary(f, mp)}};
            if (f == Functional::FS) {
                body["blowup"] = blowup(BlowupModel::FS, mp);
            } else if (f == Functional::VKD && mp.rho > 1) {
                body["blowup"] = blowup(BlowupModel::VKD_LARGE, mp);
            }
            try {
                const RegimeChoice rc = select_regime(f, mp);
                body["regime"] = rc.params;
                body["comparisons"] = rc.comparisons;
            } catch (const PreconditionError& e) {
                body["regime_error"] = e.what();
            }
            out.emit("oracle", body, kv_csv("oracle", body));
        }
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const CertificateError& e) {
        std::cerr << "certificate failure: " << e.what() << "\n";
        return kExitCertificate;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }
    return 0;
}
