#include "mlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "mlab/certificates.hpp"
#include "mlab/error.hpp"
#include "mlab/exec.hpp"
#include "mlab/oracle.hpp"

namespace mlab {

namespace {

std::string upper(const std::string& s) {
    std::string u;
    for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return u;
}

bool has_reduced(Functional model) { return model != Functional::NL; }

double reduced_excess(Functional model, const ModelParams& mp, const PatternParams& pp) {
    return model == Functional::FS ? fs_pattern_energy_reduced(mp, pp) : vkd_pattern_excess_reduced(mp, pp);
}

// Radial slope sup-norm of the closed-form pattern.
double reduced_slope(const ModelParams& mp, const PatternParams& pp) {
    if (pp.regime == Regime::UNBUCKLED) return mp.lambda;
    const double df = default_profile(ProfileVariant::VKD_PROFILE).moments().df_max;
    return std::max(mp.lambda, std::sqrt(2.0 * mp.lambda / pp.delta) * df);
}

void construct_point(const SweepSpec& spec, SweepRow& row) {
    const ModelParams& mp = row.params;
    const RegimeChoice choice = select_regime(spec.model, mp);
    const PatternParams& pp = choice.params;
    row.regime = to_string(pp.regime);
    row.n = pp.n;
    row.k = pp.k;
    row.delta = pp.delta;

    Route route = spec.route;
    Domain dom;
    bool dom_ok = true;
    try {
        dom = pattern_domain(spec.model, pp, spec.samples_per_cell, spec.min_theta);
    } catch (const ResolutionError&) {
        dom_ok = false;
    }
    if (route == Route::AUTO) {
        const bool fits = dom_ok && dom.size() <= spec.max_nodes;
        route = fits ? Route::GRID : Route::REDUCED;
        if (route == Route::REDUCED && !has_reduced(spec.model)) {
            std::ostringstream os;
            os << "pattern needs " << (dom_ok ? dom.size() : 0) << " nodes (limit " << spec.max_nodes
               << ") and the model has no closed form";
            throw ResolutionError(os.str());
        }
    }
    if (route == Route::REDUCED) {
        if (!has_reduced(spec.model)) throw PreconditionError("the NL model has no reduced evaluator");
        row.route = "REDUCED";
        row.excess = reduced_excess(spec.model, mp, pp);
        row.slope_linf = reduced_slope(mp, pp);
        return;
    }
    if (!dom_ok) throw ResolutionError("pattern grid exceeds 2^30 nodes per direction");
    row.route = "GRID";
    row.n_theta = dom.n_theta;
    row.n_z = dom.n_z;
    const Configuration c = build_pattern(spec.model, mp, pp, dom);
    EnergyReport rep;
    switch (spec.model) {
        case Functional::VKD: rep = vkd_energy(c); break;
        case Functional::FS: rep = fs_energy(c); break;
        case Functional::NL: rep = nl_energy(c); break;
    }
    row.excess = rep.excess;
    row.slope_linf = rep.slope_linf;
    auto certs = certificates(spec.model, c);
    if (spec.model == Functional::FS) {
        auto v = vkd_certificates(c);
        certs.insert(certs.end(), v.begin(), v.end());
    }
    row.certificates_evaluated = true;
    row.certificates_failed =
        static_cast<int>(std::count_if(certs.begin(), certs.end(), [](const auto& r) { return !r.passed; }));
}

void minimize_point(const SweepSpec& spec, SweepRow& row) {
    const ModelParams& mp = row.params;
    int nz = 128;
    try {
        const PatternParams pp = select_regime_params(spec.model, mp);
        if (pp.regime != Regime::UNBUCKLED)
            nz = pattern_domain(spec.model, pp, spec.minimize.min_samples_per_cell, spec.minimize_theta).n_z;
        row.regime = to_string(pp.regime);
        row.n = pp.n;
        row.k = pp.k;
        row.delta = pp.delta;
    } catch (const PreconditionError&) {
        row.regime = "NONE";
    }
    const Domain dom = Domain::omega(spec.minimize_theta, nz);
    MinimizeOptions opts = spec.minimize;
    opts.seed = spec.seed + static_cast<std::uint64_t>(row.index);
    const MinimizeResult r = minimize(spec.model, mp, dom, opts);
    row.route = "GRID";
    row.n_theta = dom.n_theta;
    row.n_z = dom.n_z;
    row.excess = r.report.excess;
    row.slope_linf = r.slope_linf;
    row.converged = r.converged;
    row.iterations = r.iterations;
    auto certs = certificates(spec.model, r.final);
    row.certificates_evaluated = true;
    row.certificates_failed =
        static_cast<int>(std::count_if(certs.begin(), certs.end(), [](const auto& c) { return !c.passed; }));
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

std::string to_string(SweepVar v) {
    switch (v) {
        case SweepVar::H: return "h";
        case SweepVar::LAMBDA: return "lambda";
        case SweepVar::RHO_MINUS_1: return "rho_minus_1";
        case SweepVar::M: return "m";
    }
    return "?";
}

std::string to_string(SweepMode m) { return m == SweepMode::CONSTRUCT ? "CONSTRUCT" : "MINIMIZE"; }

std::string to_string(Route r) {
    switch (r) {
        case Route::AUTO: return "AUTO";
        case Route::GRID: return "GRID";
        case Route::REDUCED: return "REDUCED";
    }
    return "?";
}

SweepVar sweep_var_from_string(const std::string& s) {
    for (SweepVar v : {SweepVar::H, SweepVar::LAMBDA, SweepVar::RHO_MINUS_1, SweepVar::M})
        if (to_string(v) == s) return v;
    throw PreconditionError("unknown sweep variable '" + s + "' (h, lambda, rho_minus_1, m)");
}

SweepMode sweep_mode_from_string(const std::string& s) {
    const std::string u = upper(s);
    if (u == "CONSTRUCT") return SweepMode::CONSTRUCT;
    if (u == "MINIMIZE") return SweepMode::MINIMIZE;
    throw PreconditionError("unknown sweep mode '" + s + "'");
}

Route route_from_string(const std::string& s) {
    const std::string u = upper(s);
    for (Route r : {Route::AUTO, Route::GRID, Route::REDUCED})
        if (to_string(r) == u) return r;
    throw PreconditionError("unknown route '" + s + "'");
}

void SweepSpec::validate() const {
    if (count < 4) throw PreconditionError("a sweep needs at least 4 points");
    if (!(lo > 0 && lo < hi && std::isfinite(hi))) throw PreconditionError("sweep range must satisfy 0 < lo < hi");
    if (!(samples_per_cell > 0)) throw PreconditionError("samples per cell must be positive");
    minimize.validate();
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> v(count);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < count; ++i) v[i] = std::exp(a + (b - a) * i / (count - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

ModelParams SweepSpec::params_at(int index) const {
    ModelParams mp = fixed;
    const double x = values().at(index);
    switch (varying) {
        case SweepVar::H: mp.h = x; break;
        case SweepVar::LAMBDA: mp.lambda = x; break;
        case SweepVar::RHO_MINUS_1: mp.rho = 1.0 + x; break;
        case SweepVar::M: mp.m = x; break;
    }
    return mp;
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult out;
    out.spec = spec;
    const std::vector<double> xs = spec.values();
    out.rows.resize(xs.size());
    std::vector<std::exception_ptr> errors(xs.size());

    int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, spec.count);
    // Points run concurrently; each one uses the serial kernels.
    ScopedExecution scoped(threads > 1 ? Execution::Serial : execution());
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < spec.count; i = next++) {
            SweepRow& row = out.rows[i];
            row.index = i;
            row.x = xs[i];
            row.params = spec.params_at(i);
            try {
                const ScalingPrediction p = predict(spec.model, row.params);
                row.oracle_branch = to_string(p.branch);
                row.oracle_value = p.value;
                row.oracle_ok = p.hypothesis_ok;
                if (spec.mode == SweepMode::CONSTRUCT)
                    construct_point(spec, row);
                else
                    minimize_point(spec, row);
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (!spec.skip_failures)
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    return out;
}

void write_csv(std::ostream& os, const SweepResult& r) {
    const SweepSpec& s = r.spec;
    os << "# " << kSchema << " sweep model=" << to_string(s.model) << " varying=" << to_string(s.varying)
       << " mode=" << to_string(s.mode) << " route=" << to_string(s.route) << " seed=" << s.seed << "\n";
    os << "index,x,h,lambda,rho,m,ok,regime,n,k,delta,route,n_theta,n_z,excess,slope_linf,oracle_branch,"
          "oracle_value,oracle_ok,certificates_evaluated,certificates_failed,converged,iterations,error\n";
    for (const SweepRow& w : r.rows) {
        std::string err = w.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << w.index << ',' << fmt(w.x) << ',' << fmt(w.params.h) << ',' << fmt(w.params.lambda) << ','
           << fmt(w.params.rho) << ',' << (w.params.finite_m() ? fmt(w.params.m) : "inf") << ',' << (w.ok ? 1 : 0)
           << ',' << w.regime << ',' << w.n << ',' << w.k << ',' << fmt(w.delta) << ',' << w.route << ','
           << w.n_theta << ',' << w.n_z << ',' << fmt(w.excess) << ',' << fmt(w.slope_linf) << ','
           << w.oracle_branch << ',' << fmt(w.oracle_value) << ',' << (w.oracle_ok ? 1 : 0) << ','
           << (w.certificates_evaluated ? 1 : 0) << ',' << w.certificates_failed << ',' << (w.converged ? 1 : 0)
           << ',' << w.iterations << ',' << err << "\n";
    }
}

FitResult fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw PreconditionError("fit needs columns of equal length");
    if (x.size() < 4) throw PreconditionError("fit needs at least 4 points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0) || !(y[i] > 0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw PreconditionError("fit needs positive finite values");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 1e-300)) throw NumericalError("rank-deficient fit: all x values coincide");
    FitResult f;
    f.exponent = sxy / sxx;
    f.intercept = my - f.exponent * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (f.intercept + f.exponent * lx[i]);
        ssr += r * r;
        f.residual_max = std::max(f.residual_max, std::abs(r));
    }
    f.r_squared = syy > 0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    f.points_used = static_cast<int>(n);
    return f;
}

Table read_csv(std::istream& is) {
    Table t;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        if (!l.empty() && l.back() == ',') out.emplace_back();
        return out;
    };
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (t.columns.empty())
            t.columns = split(line);
        else
            t.rows.push_back(split(line));
    }
    if (t.columns.empty()) throw PreconditionError("CSV input has no header row");
    return t;
}

std::vector<double> Table::numeric(const std::string& column) const {
    const auto it = std::find(columns.begin(), columns.end(), column);
    if (it == columns.end()) throw PreconditionError("no column '" + column + "'");
    const std::size_t j = it - columns.begin();
    std::vector<double> v;
    for (const auto& r : rows) {
        if (j >= r.size()) throw PreconditionError("short CSV row");
        v.push_back(r[j] == "inf" ? kInf : std::stod(r[j]));
    }
    return v;
}

FitResult fit_table(const Table& t, const std::string& x, const std::string& y) {
    std::vector<double> xs = t.numeric(x), ys = t.numeric(y);
    if (std::find(t.columns.begin(), t.columns.end(), "ok") != t.columns.end()) {
        const std::vector<double> ok = t.numeric("ok");
        std::vector<double> fx, fy;
        for (std::size_t i = 0; i < ok.size(); ++i)
            if (ok[i] == 1) fx.push_back(xs[i]), fy.push_back(ys[i]);
        xs.swap(fx);
        ys.swap(fy);
    }
    return fit_exponent(xs, ys);
}

}  // namespace mlab
