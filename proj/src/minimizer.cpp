#include "mlab/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/exec.hpp"
#include "mlab/kernels.hpp"

namespace mlab {

namespace {

double obstacle_floor(Functional f, const ModelParams& mp) {
    return f == Functional::NL ? mp.rho : mp.rho - 1.0;
}

Model model_of(Functional f) { return f == Functional::NL ? Model::NL : Model::VKD; }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Flat variable vector [rho | theta | z] <-> Configuration.
struct Packing {
    std::size_t n = 0;

    void unpack(const std::vector<double>& x, Configuration& c) const {
        std::copy(x.begin(), x.begin() + n, c.comp_rho.data());
        std::copy(x.begin() + n, x.begin() + 2 * n, c.comp_theta.data());
        std::copy(x.begin() + 2 * n, x.end(), c.comp_z.data());
    }
    std::vector<double> pack(const Configuration& c) const {
        std::vector<double> x(3 * n);
        std::copy(c.comp_rho.data(), c.comp_rho.data() + n, x.begin());
        std::copy(c.comp_theta.data(), c.comp_theta.data() + n, x.begin() + n);
        std::copy(c.comp_z.data(), c.comp_z.data() + n, x.begin() + 2 * n);
        return x;
    }
    std::vector<double> pack(const ComponentGradient& g) const {
        std::vector<double> x(3 * n);
        std::copy(g.rho.data(), g.rho.data() + n, x.begin());
        std::copy(g.theta.data(), g.theta.data() + n, x.begin() + n);
        std::copy(g.z.data(), g.z.data() + n, x.begin() + 2 * n);
        return x;
    }
};

double constraint_violation(Functional f, const Configuration& c) {
    const ModelParams& mp = c.params;
    double v = std::max(0.0, obstacle_floor(f, mp) - c.comp_rho.min());
    const auto D = first_derivatives(c);
    if (mp.finite_m()) {
        double s = 0;
        for (const GridField& g : D) s = std::max(s, g.max_abs());
        v = std::max(v, s - mp.m);
    }
    if (f == Functional::NL) v = std::max(v, -D[5].min());
    return v;
}

EnergyReport physical_report(Functional f, const Configuration& c) {
    EnergyOptions o;
    o.check_resolution = false;
    switch (f) {
        case Functional::VKD: return vkd_energy(c, o);
        case Functional::FS: return fs_energy(c, o);
        case Functional::NL: return nl_energy(c, o);
    }
    throw PreconditionError("unknown model");
}

}  // namespace

std::string to_string(ObstacleMode m) { return m == ObstacleMode::PROJECTION ? "PROJECTION" : "PENALTY"; }

std::string to_string(InitKind k) {
    switch (k) {
        case InitKind::UNBUCKLED_PLUS_NOISE: return "UNBUCKLED_PLUS_NOISE";
        case InitKind::PATTERN_SEED: return "PATTERN_SEED";
        case InitKind::FILE: return "FILE";
    }
    return "?";
}

ObstacleMode obstacle_mode_from_string(const std::string& s) {
    if (s == "PROJECTION" || s == "projection") return ObstacleMode::PROJECTION;
    if (s == "PENALTY" || s == "penalty") return ObstacleMode::PENALTY;
    throw PreconditionError("unknown obstacle mode '" + s + "'");
}

InitKind init_kind_from_string(const std::string& s) {
    std::string u;
    for (char ch : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (u == "UNBUCKLED_PLUS_NOISE" || u == "NOISE") return InitKind::UNBUCKLED_PLUS_NOISE;
    if (u == "PATTERN_SEED" || u == "PATTERN") return InitKind::PATTERN_SEED;
    if (u == "FILE") return InitKind::FILE;
    throw PreconditionError("unknown init kind '" + s + "'");
}

void MinimizeOptions::validate() const {
    if (max_iterations < 1) throw PreconditionError("max_iterations must be positive");
    if (!(gradient_tolerance > 0)) throw PreconditionError("gradient tolerance must be positive");
    if (!(relative_gradient_tolerance >= 0 && relative_gradient_tolerance < 1))
        throw PreconditionError("relative gradient tolerance must lie in [0, 1)");
    if (slope_penalty_weight < 0 || zsign_penalty_weight < 0 || obstacle_penalty_weight < 0)
        throw PreconditionError("penalty weights must be nonnegative");
    if (penalty_loops < 1 || !(penalty_growth >= 1)) throw PreconditionError("invalid penalty ramp");
    if (noise_amplitude < 0) throw PreconditionError("noise amplitude must be nonnegative");
    if (lbfgs_memory < 1) throw PreconditionError("L-BFGS memory must be positive");
    if (history_stride < 1) throw PreconditionError("history stride must be positive");
}

GridField band_limited_noise(const Domain& dom, int max_theta, int max_z, std::uint64_t seed, int stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x5bd1e995u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    using cplx = std::complex<double>;
    const int K1 = max_theta, K2 = max_z;
    // Coefficients c[k1 + K1][k2] for k2 >= 0; the real part is taken at the end.
    std::vector<cplx> c(static_cast<std::size_t>(2 * K1 + 1) * (K2 + 1));
    for (int k1 = -K1; k1 <= K1; ++k1)
        for (int k2 = 0; k2 <= K2; ++k2) {
            const double a = normal(rng), b = normal(rng);
            c[static_cast<std::size_t>(k1 + K1) * (K2 + 1) + k2] = cplx(a, b);
        }
    GridField f(dom);
    std::vector<cplx> row(K2 + 1);
    for (int i = 0; i < dom.n_theta; ++i) {
        const double th = kTwoPi * i / dom.n_theta;
        std::fill(row.begin(), row.end(), cplx(0, 0));
        for (int k1 = -K1; k1 <= K1; ++k1) {
            const cplx e = std::polar(1.0, k1 * th);
            for (int k2 = 0; k2 <= K2; ++k2) row[k2] += c[static_cast<std::size_t>(k1 + K1) * (K2 + 1) + k2] * e;
        }
        for (int j = 0; j < dom.n_z; ++j) {
            const double ph = kTwoPi * j / dom.n_z;
            double s = 0;
            for (int k2 = 0; k2 <= K2; ++k2) s += (row[k2] * std::polar(1.0, k2 * ph)).real();
            f(i, j) = s;
        }
    }
    const double m = f.max_abs();
    if (m > 0) f *= 1.0 / m;
    return f;
}

double axisymmetry_deviation(const GridField& f) {
    const std::vector<double> avg = theta_average(f);
    GridField d = f;
    const Domain& dom = f.domain();
    for (int i = 0; i < dom.n_theta; ++i)
        for (int j = 0; j < dom.n_z; ++j) d(i, j) -= avg[j];
    return lp_norm(d, 2);
}

double penalized_energy(Functional f, const Configuration& c, const PenaltyWeights& w, ComponentGradient* grad) {
    double e = discrete_energy(f, c, grad);
    const Domain& d = c.domain();
    const double dA = d.cell_area();
    const std::size_t n = d.size();
    const ModelParams& mp = c.params;
    const Execution ex = execution();
    const bool nl = f == Functional::NL;

    if (w.obstacle > 0) {
        e += kernels::negative_part_penalty(c.comp_rho.data(), -obstacle_floor(f, mp), w.obstacle * dA, n,
                                            grad ? grad->rho.data() : nullptr, ex);
    }
    const bool slope = w.slope > 0 && mp.finite_m();
    const bool zsign = nl && w.zsign > 0;
    if (!slope && !zsign) return e;

    const GridField* comps[3] = {&c.comp_rho, &c.comp_theta, &c.comp_z};
    GridField* gcomps[3] = {grad ? &grad->rho : nullptr, grad ? &grad->theta : nullptr, grad ? &grad->z : nullptr};
    // Affine parts of (d_t, d_z) per component.
    const double lam = mp.lambda;
    const double offsets[3][2] = {{0.0, 0.0}, {nl ? 1.0 : 0.0, 0.0}, {0.0, nl ? 1.0 - lam : -lam}};
    std::vector<double> rt(n), rz(n), tmp(n);
    for (int k = 0; k < 3; ++k) {
        const bool want_z_sign = zsign && k == 2;
        if (!slope && !want_z_sign) continue;
        const GridField dt = derivative(*comps[k], 1, 0);
        const GridField dz = derivative(*comps[k], 0, 1);
        std::fill(rt.begin(), rt.end(), 0.0);
        std::fill(rz.begin(), rz.end(), 0.0);
        if (slope) {
            e += kernels::hinge_penalty(dt.data(), offsets[k][0], mp.m, w.slope * dA, n, grad ? rt.data() : nullptr, ex);
            e += kernels::hinge_penalty(dz.data(), offsets[k][1], mp.m, w.slope * dA, n, grad ? rz.data() : nullptr, ex);
        }
        if (want_z_sign)
            e += kernels::negative_part_penalty(dz.data(), offsets[k][1], w.zsign * dA, n, grad ? rz.data() : nullptr,
                                                ex);
        if (grad) {
            adjoint_derivative_sum(d, {{rt.data(), 1, 0}, {rz.data(), 0, 1}}, tmp.data());
            double* g = gcomps[k]->data();
            for (std::size_t i = 0; i < n; ++i) g[i] += tmp[i];
        }
    }
    return e;
}

Configuration initial_configuration(Functional f, const ModelParams& mp, const Domain& dom,
                                    const MinimizeOptions& opts) {
    if (opts.start) {
        Configuration c = *opts.start;
        if (!(c.domain() == dom)) throw PreconditionError("start configuration grid does not match the domain");
        if (c.model != model_of(f)) throw PreconditionError("start configuration has the wrong model");
        c.params = mp;
        c.validate();
        return c;
    }
    if (opts.initial == InitKind::FILE) throw PreconditionError("FILE initialization needs a start configuration");
    if (opts.initial == InitKind::PATTERN_SEED) {
        const PatternParams pp = opts.pattern ? *opts.pattern : select_regime_params(f, mp);
        return build_pattern(f, mp, pp, dom);
    }
    Configuration c = f == Functional::NL ? nl_uniform(mp, dom) : vkd_unbuckled(mp, dom);
    const double a = opts.noise_amplitude;
    if (a == 0) return c;
    const int kt = std::max(1, dom.n_theta / 16), kz = std::max(1, dom.n_z / 16);
    GridField nr = band_limited_noise(dom, kt, kz, opts.seed, 0);
    const double mn = nr.min();
    for (std::size_t k = 0; k < nr.size(); ++k) c.comp_rho.data()[k] += a * (nr.data()[k] - mn);
    const GridField nt = band_limited_noise(dom, kt, kz, opts.seed, 1);
    const GridField nz = band_limited_noise(dom, kt, kz, opts.seed, 2);
    // Scale the in-surface noise so its derivatives are of order a.
    const double st = a / kt, sz = a / (kTwoPi * kz);
    for (std::size_t k = 0; k < nr.size(); ++k) {
        c.comp_theta.data()[k] += st * nt.data()[k];
        c.comp_z.data()[k] += sz * nz.data()[k];
    }
    return c;
}

MinimizeResult minimize(Functional f, const ModelParams& mp, const Domain& dom, const MinimizeOptions& opts) {
    mp.validate();
    opts.validate();
    if (f == Functional::FS && mp.rho != 1.0) throw PreconditionError("free-shear minimization needs rho = 1");
    if (!opts.start && opts.initial != InitKind::PATTERN_SEED) {
        RegimeChoice choice;
        bool have = true;
        try {
            choice = select_regime(f, mp);
        } catch (const PreconditionError&) {
            have = false;  // no construction at these params, nothing to resolve
        }
        if (have && choice.params.regime != Regime::UNBUCKLED)
            require_resolved(dom, choice.params.n, choice.params.k, choice.params.delta, f == Functional::FS,
                             opts.min_samples_per_cell);
    }

    Configuration c = initial_configuration(f, mp, dom, opts);
    const double floor_ = obstacle_floor(f, mp);
    // PENALTY mode relaxes the obstacle during the ramp, then finishes with
    // one projected loop so the returned field satisfies it exactly.
    bool project = opts.obstacle_mode == ObstacleMode::PROJECTION;
    if (project)
        for (double& x : c.comp_rho.values()) x = std::max(x, floor_);

    Packing pk{dom.size()};
    const std::size_t n = dom.size();
    const double dA = dom.cell_area();
    MinimizeResult res;
    res.initial_energy = discrete_energy(f, c, nullptr);

    const bool penalties = (mp.finite_m() && opts.slope_penalty_weight > 0) ||
                           (f == Functional::NL && opts.zsign_penalty_weight > 0) || !project;
    const int ramp_loops = penalties ? opts.penalty_loops : 1;
    const int loops = project ? ramp_loops : ramp_loops + 1;

    std::vector<double> x = pk.pack(c);
    Configuration work = c;
    auto eval = [&](const std::vector<double>& xv, const PenaltyWeights& w, std::vector<double>& g) {
        pk.unpack(xv, work);
        ComponentGradient cg;
        const double e = penalized_energy(f, work, w, &cg);
        g = pk.pack(cg);
        return e;
    };
    auto apply_projection = [&](std::vector<double>& xv) {
        if (!project) return;
        for (std::size_t i = 0; i < n; ++i) xv[i] = std::max(xv[i], floor_);
    };
    // Bound-active rho nodes whose gradient pushes into the obstacle are fixed.
    auto free_mask = [&](const std::vector<double>& xv, const std::vector<double>& g, std::vector<double>& pg) {
        pg = g;
        if (!project) return;
        for (std::size_t i = 0; i < n; ++i)
            if (xv[i] <= floor_ && g[i] > 0) pg[i] = 0;
    };
    // H0 on each component block; the gradient carries the cell area.
    auto precondition = [&](std::vector<double>& v) {
        if (!opts.precondition) return;
        const double h2 = mp.h * mp.h;
        for (int b = 0; b < 3; ++b) {
            const bool bend = b == 0 || f == Functional::NL;
            apply_symbol(
                dom,
                [&](double kt, double kz) {
                    const double k2 = kt * kt + kz * kz;
                    return 1.0 / (dA * (1.0 + k2 + (bend ? h2 * k2 * k2 : 0.0)));
                },
                v.data() + b * n);
        }
    };
    auto pg_norm = [&](const std::vector<double>& pg) { return std::sqrt(dot(pg, pg) / dA); };

    int total_it = 0;
    bool final_loop_converged = false;
    std::string reason;
    for (int loop = 0; loop < loops; ++loop) {
        const double growth = std::pow(opts.penalty_growth, std::min(loop, ramp_loops - 1));
        if (loop == ramp_loops) {
            project = true;
            apply_projection(x);
        }
        PenaltyWeights w;
        if (mp.finite_m()) w.slope = opts.slope_penalty_weight * growth;
        if (f == Functional::NL) w.zsign = opts.zsign_penalty_weight * growth;
        if (!project) w.obstacle = opts.obstacle_penalty_weight * growth;

        std::deque<std::pair<std::vector<double>, std::vector<double>>> mem;
        std::vector<double> g, pg, d(x.size()), xn, gn;
        double fx = eval(x, w, g);
        int stagnant = 0;
        double pgn0 = -1;
        bool converged = false;
        reason = "iteration cap";
        for (int it = 0; it < opts.max_iterations; ++it) {
            free_mask(x, g, pg);
            const double pgn = pg_norm(pg);
            if (pgn0 < 0) pgn0 = pgn;
            if (it % opts.history_stride == 0 || it == 0) {
                IterateRecord rec;
                rec.iteration = total_it;
                rec.objective = fx;
                pk.unpack(x, work);
                rec.energy = discrete_energy(f, work, nullptr);
                rec.projected_gradient = pgn;
                rec.slope_linf = slope_linf(work);
                res.history.push_back(rec);
            }
            if (pgn <= std::max(opts.gradient_tolerance, opts.relative_gradient_tolerance * pgn0)) {
                converged = true;
                reason = "gradient tolerance";
                break;
            }
            // Two-loop recursion on the free variables.
            std::vector<double> q = pg;
            std::vector<double> alpha(mem.size());
            for (int k = static_cast<int>(mem.size()) - 1; k >= 0; --k) {
                const auto& [s, y] = mem[k];
                alpha[k] = dot(s, q) / dot(y, s);
                for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * y[i];
            }
            if (!mem.empty()) {
                const auto& [s, y] = mem.back();
                std::vector<double> py = y;
                precondition(py);
                const double gamma = dot(s, y) / dot(y, py);
                precondition(q);
                for (double& v : q) v *= gamma;
            } else {
                precondition(q);
                double qmax = 0;
                for (double v : q) qmax = std::max(qmax, std::abs(v));
                const double scale = qmax > 0 ? std::min(1.0, 1e-3 / qmax) : 1.0;
                for (double& v : q) v *= scale;
            }
            for (std::size_t k = 0; k < mem.size(); ++k) {
                const auto& [s, y] = mem[k];
                const double beta = dot(y, q) / dot(y, s);
                for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * s[i];
            }
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = (pg[i] == 0 && i < n && project) ? 0.0 : -q[i];
            if (dot(d, pg) >= 0) {
                // Fall back to steepest descent on the free variables.
                mem.clear();
                double gmax = 0;
                for (double v : pg) gmax = std::max(gmax, std::abs(v));
                const double scale = gmax > 0 ? std::min(1.0, 1e-3 / gmax) : 1.0;
                for (std::size_t i = 0; i < d.size(); ++i) d[i] = -scale * pg[i];
            }
            // Projected backtracking with an Armijo condition.
            double t = 1.0, fn = 0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                xn = x;
                for (std::size_t i = 0; i < x.size(); ++i) xn[i] += t * d[i];
                apply_projection(xn);
                double gd = 0;
                for (std::size_t i = 0; i < x.size(); ++i) gd += g[i] * (xn[i] - x[i]);
                fn = eval(xn, w, gn);
                if (std::isfinite(fn) && fn <= fx + 1e-4 * gd && fn <= fx) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) {
                if (!mem.empty()) {
                    mem.clear();
                    continue;
                }
                reason = "line search failure";
                break;
            }
            std::vector<double> s(x.size()), y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) s[i] = xn[i] - x[i], y[i] = gn[i] - g[i];
            const double sy = dot(s, y);
            if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
                mem.emplace_back(std::move(s), std::move(y));
                if (static_cast<int>(mem.size()) > opts.lbfgs_memory) mem.pop_front();
            }
            const double dec = fx - fn;
            stagnant = dec <= opts.stagnation_tolerance * std::abs(fx) ? stagnant + 1 : 0;
            x.swap(xn);
            g.swap(gn);
            fx = fn;
            ++total_it;
            if (stagnant >= 50) {
                reason = "stagnation";
                break;
            }
        }
        final_loop_converged = converged;
    }

    pk.unpack(x, c);
    res.final = c;
    res.iterations = total_it;
    res.stop_reason = reason;
    res.report = physical_report(f, c);
    res.final_energy = discrete_energy(f, c, nullptr);
    res.slope_linf = slope_linf(c);
    res.constraint_violation = constraint_violation(f, c);
    res.converged = final_loop_converged && res.constraint_violation <= 1e-6;
    res.axisymmetry_deviation = axisymmetry_deviation(c.comp_rho);
    res.spectral_tail = std::max({spectral_tail(c.comp_rho), spectral_tail(c.comp_theta), spectral_tail(c.comp_z)});
    return res;
}

double gradient_check(Functional f, const ModelParams& mp, const Configuration& c, int directions,
                      std::uint64_t seed, double step) {
    if (directions < 1) throw PreconditionError("gradient check needs at least one direction");
    Configuration base = c;
    base.params = mp;
    ComponentGradient g;
    discrete_energy(f, base, &g);
    const Domain& dom = base.domain();
    const int kt = std::max(1, dom.n_theta / 16), kz = std::max(1, dom.n_z / 16);
    double worst = 0;
    for (int k = 0; k < directions; ++k) {
        const GridField dr = band_limited_noise(dom, kt, kz, seed, 3 * k);
        const GridField dt = band_limited_noise(dom, kt, kz, seed, 3 * k + 1);
        const GridField dz = band_limited_noise(dom, kt, kz, seed, 3 * k + 2);
        double an = 0;
        for (std::size_t i = 0; i < dom.size(); ++i)
            an += g.rho.data()[i] * dr.data()[i] + g.theta.data()[i] * dt.data()[i] + g.z.data()[i] * dz.data()[i];
        auto shifted = [&](double eps) {
            Configuration s = base;
            s.comp_rho += eps * dr;
            s.comp_theta += eps * dt;
            s.comp_z += eps * dz;
            return discrete_energy(f, s, nullptr);
        };
        const double fd = (shifted(step) - shifted(-step)) / (2.0 * step);
        const double scale = std::max({std::abs(an), std::abs(fd), 1e-300});
        worst = std::max(worst, std::abs(an - fd) / scale);
    }
    return worst;
}

}  // namespace mlab
