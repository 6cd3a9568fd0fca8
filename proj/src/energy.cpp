#include "mlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/exec.hpp"
#include "mlab/kernels.hpp"

namespace mlab {

std::string to_string(Model m) { return m == Model::VKD ? "VKD" : "NL"; }

void Configuration::validate() const {
    const Domain& d = comp_rho.domain();
    if (!(comp_theta.domain() == d) || !(comp_z.domain() == d))
        throw PreconditionError("configuration components live on different grids");
    if (!comp_rho.all_finite() || !comp_theta.all_finite() || !comp_z.all_finite())
        throw PreconditionError("configuration contains non-finite values");
    params.validate(true);
}

Configuration vkd_unbuckled(const ModelParams& mp, const Domain& dom) {
    return Configuration{Model::VKD, GridField(dom, mp.rho - 1.0), GridField(dom), GridField(dom), mp};
}

Configuration nl_uniform(const ModelParams& mp, const Domain& dom) {
    return Configuration{Model::NL, GridField(dom, mp.rho), GridField(dom), GridField(dom), mp};
}

GridField FrameField::norm2() const {
    GridField out(rho.domain());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double a = rho.data()[k], b = theta.data()[k], c = z.data()[k];
        out.data()[k] = a * a + b * b + c * c;
    }
    return out;
}

GridField SecondDerivatives::norm2() const {
    GridField out = tt.norm2();
    out += 2.0 * tz.norm2();
    out += zz.norm2();
    return out;
}

namespace {

void require_model(const Configuration& c, Model m) {
    if (c.model != m) throw PreconditionError("configuration model mismatch: expected " + to_string(m));
    c.validate();
}

struct Derivs {
    GridField t, z, tt, tz, zz;
};

Derivs derivs_of(const GridField& f, bool second) {
    Spectrum s(f);
    Derivs d;
    d.t = s.derivative(1, 0);
    d.z = s.derivative(0, 1);
    if (second) {
        d.tt = s.derivative(2, 0);
        d.tz = s.derivative(1, 1);
        d.zz = s.derivative(0, 2);
    }
    return d;
}

struct VkdState {
    Derivs r, a, p;
};

VkdState vkd_state(const Configuration& c) {
    return VkdState{derivs_of(c.comp_rho, true), derivs_of(c.comp_theta, false),
                    derivs_of(c.comp_z, false)};
}

kernels::VkdInputs vkd_inputs(const Configuration& c, const VkdState& s, double shear_weight) {
    const Domain& d = c.domain();
    return kernels::VkdInputs{c.comp_rho.data(), s.r.t.data(),  s.r.z.data(),  s.r.tt.data(),
                              s.r.tz.data(),     s.r.zz.data(), s.a.t.data(),  s.a.z.data(),
                              s.p.t.data(),      s.p.z.data(),  c.params.lambda,
                              c.params.h * c.params.h, shear_weight,
                              static_cast<std::size_t>(d.n_theta), static_cast<std::size_t>(d.n_z)};
}

struct NlState {
    Derivs R, q, s;
};

NlState nl_state(const Configuration& c) {
    return NlState{derivs_of(c.comp_rho, true), derivs_of(c.comp_theta, true), derivs_of(c.comp_z, true)};
}

kernels::NlInputs nl_inputs(const Configuration& c, const NlState& s) {
    const Domain& d = c.domain();
    return kernels::NlInputs{c.comp_rho.data(),
                             s.R.t.data(),
                             s.R.z.data(),
                             s.R.tt.data(),
                             s.R.tz.data(),
                             s.R.zz.data(),
                             s.q.t.data(),
                             s.q.z.data(),
                             s.q.tt.data(),
                             s.q.tz.data(),
                             s.q.zz.data(),
                             s.s.t.data(),
                             s.s.z.data(),
                             s.s.tt.data(),
                             s.s.tz.data(),
                             s.s.zz.data(),
                             c.params.lambda,
                             c.params.h * c.params.h,
                             static_cast<std::size_t>(d.n_theta),
                             static_cast<std::size_t>(d.n_z)};
}

void check_resolution(const Configuration& c, const EnergyOptions& opt) {
    if (!opt.check_resolution) return;
    const GridField* comps[3] = {&c.comp_rho, &c.comp_theta, &c.comp_z};
    const char* names[3] = {"rho", "theta", "z"};
    for (int k = 0; k < 3; ++k) {
        const double tail = spectral_tail(*comps[k]);
        if (tail > opt.tail_tolerance) {
            std::ostringstream os;
            os << "under-resolved grid: component " << names[k] << " has spectral tail " << tail;
            throw ResolutionError(os.str());
        }
    }
}

void add_violation(EnergyReport& r, const std::string& what, double value) {
    std::ostringstream os;
    os << what << " (" << value << ")";
    r.admissible = false;
    r.violations.push_back(os.str());
}

void finish_vkd_report(const Configuration& c, EnergyReport& r, const EnergyOptions& opt) {
    const ModelParams& mp = c.params;
    const double tol = opt.admissibility_tolerance;
    r.slope_linf = slope_linf(c);
    const double min_r = c.comp_rho.min();
    if (min_r < mp.rho - 1.0 - tol) add_violation(r, "obstacle phi_rho >= rho - 1 violated", min_r - (mp.rho - 1.0));
    if (r.slope_linf > mp.m + tol) add_violation(r, "slope bound violated", r.slope_linf);
}

EnergyReport vkd_like(const Configuration& c, const EnergyOptions& opt, bool free_shear) {
    require_model(c, Model::VKD);
    check_resolution(c, opt);
    const VkdState s = vkd_state(c);
    const auto in = vkd_inputs(c, s, free_shear ? 0.0 : 1.0);
    const kernels::VkdSums sums = kernels::vkd_density(in, nullptr, execution());
    const double dA = c.domain().cell_area();
    const double h2 = c.params.h * c.params.h;
    EnergyReport r;
    r.membrane_tt = sums.tt * dA;
    r.membrane_zz = sums.zz * dA;
    r.membrane_tz = free_shear ? 0.0 : sums.tz * dA;
    r.bending = h2 * sums.bend * dA;
    r.total = r.membrane_tt + r.membrane_zz + 2.0 * r.membrane_tz + r.bending;
    r.bulk = vkd_bulk(c.params, c.domain());
    r.excess = r.total - r.bulk;
    finish_vkd_report(c, r, opt);
    return r;
}

}  // namespace

double vkd_bulk(const ModelParams& mp, const Domain& dom) {
    return dom.area() * (mp.rho - 1.0) * (mp.rho - 1.0);
}

double nl_bulk(const ModelParams& mp, const Domain& dom) {
    const double a = mp.rho * mp.rho - 1.0;
    return dom.area() * (a * a + mp.rho * mp.rho * mp.h * mp.h);
}

std::array<GridField, 6> first_derivatives(const Configuration& c) {
    const Derivs r = derivs_of(c.comp_rho, false);
    Derivs a = derivs_of(c.comp_theta, false);
    Derivs p = derivs_of(c.comp_z, false);
    const double lam = c.params.lambda;
    if (c.model == Model::VKD) {
        for (double& x : p.z.values()) x -= lam;
    } else {
        for (double& x : a.t.values()) x += 1.0;
        for (double& x : p.z.values()) x += 1.0 - lam;
    }
    return {r.t, r.z, a.t, a.z, p.t, p.z};
}

double slope_linf(const Configuration& c) {
    double m = 0;
    for (const GridField& g : first_derivatives(c)) m = std::max(m, g.max_abs());
    return m;
}

StrainField vkd_strain(const Configuration& c) {
    require_model(c, Model::VKD);
    const VkdState s = vkd_state(c);
    const Domain& d = c.domain();
    StrainField e{GridField(d), GridField(d), GridField(d)};
    const double lam = c.params.lambda;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double rt = s.r.t.data()[k], rz = s.r.z.data()[k];
        e.eps_tt.data()[k] = s.a.t.data()[k] + 0.5 * rt * rt + c.comp_rho.data()[k];
        e.eps_zz.data()[k] = -lam + s.p.z.data()[k] + 0.5 * rz * rz;
        e.eps_tz.data()[k] = 0.5 * (s.p.t.data()[k] + s.a.z.data()[k]) + 0.5 * rt * rz;
    }
    return e;
}

EnergyReport vkd_energy(const Configuration& c, const EnergyOptions& opt) { return vkd_like(c, opt, false); }

EnergyReport fs_energy(const Configuration& c, const EnergyOptions& opt) { return vkd_like(c, opt, true); }

MetricField nl_metric(const Configuration& c) {
    require_model(c, Model::NL);
    const auto D = first_derivatives(c);
    const Domain& d = c.domain();
    MetricField g{GridField(d), GridField(d), GridField(d)};
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double R = c.comp_rho.data()[k];
        const double Rt = D[0].data()[k], Rz = D[1].data()[k];
        const double Tt = D[2].data()[k], Tz = D[3].data()[k];
        const double Zt = D[4].data()[k], Zz = D[5].data()[k];
        g.g_tt.data()[k] = Rt * Rt + R * R * Tt * Tt + Zt * Zt;
        g.g_zz.data()[k] = Rz * Rz + R * R * Tz * Tz + Zz * Zz;
        g.g_tz.data()[k] = Rt * Rz + R * R * Tt * Tz + Zt * Zz;
    }
    return g;
}

SecondDerivatives nl_second_derivatives(const Configuration& c) {
    require_model(c, Model::NL);
    const NlState s = nl_state(c);
    const Domain& d = c.domain();
    auto frame = [&] { return FrameField{GridField(d), GridField(d), GridField(d)}; };
    SecondDerivatives D{frame(), frame(), frame()};
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double R = c.comp_rho.data()[k], Rt = s.R.t.data()[k], Rz = s.R.z.data()[k];
        const double Tt = 1.0 + s.q.t.data()[k], Tz = s.q.z.data()[k];
        D.tt.rho.data()[k] = s.R.tt.data()[k] - R * Tt * Tt;
        D.tt.theta.data()[k] = 2.0 * Rt * Tt + R * s.q.tt.data()[k];
        D.tt.z.data()[k] = s.s.tt.data()[k];
        D.tz.rho.data()[k] = s.R.tz.data()[k] - R * Tt * Tz;
        D.tz.theta.data()[k] = Rt * Tz + Tt * Rz + R * s.q.tz.data()[k];
        D.tz.z.data()[k] = s.s.tz.data()[k];
        D.zz.rho.data()[k] = s.R.zz.data()[k] - R * Tz * Tz;
        D.zz.theta.data()[k] = 2.0 * Rz * Tz + R * s.q.zz.data()[k];
        D.zz.z.data()[k] = s.s.zz.data()[k];
    }
    return D;
}

EnergyReport nl_energy(const Configuration& c, const EnergyOptions& opt) {
    require_model(c, Model::NL);
    check_resolution(c, opt);
    const NlState s = nl_state(c);
    const kernels::NlSums sums = kernels::nl_density(nl_inputs(c, s), nullptr, execution());
    const double dA = c.domain().cell_area();
    const ModelParams& mp = c.params;
    EnergyReport r;
    r.membrane_tt = sums.tt * dA;
    r.membrane_zz = sums.zz * dA;
    r.membrane_tz = sums.tz * dA;
    r.bending = mp.h * mp.h * sums.bend * dA;
    r.total = r.membrane_tt + r.membrane_zz + 2.0 * r.membrane_tz + r.bending;
    r.bulk = nl_bulk(mp, c.domain());
    r.excess = r.total - r.bulk;

    const double tol = opt.admissibility_tolerance;
    const auto D = first_derivatives(c);
    for (const GridField& g : D) r.slope_linf = std::max(r.slope_linf, g.max_abs());
    const double min_R = c.comp_rho.min();
    if (min_R < mp.rho - tol) add_violation(r, "obstacle Phi_rho >= rho violated", min_R - mp.rho);
    if (r.slope_linf > mp.m + tol) add_violation(r, "slope bound violated", r.slope_linf);
    const double min_zz = D[5].min();
    if (min_zz < -tol) add_violation(r, "d_z Phi_z >= 0 violated", min_zz);
    return r;
}

double discrete_energy(Functional f, const Configuration& c, ComponentGradient* grad) {
    const Domain& d = c.domain();
    const double dA = d.cell_area();
    const double h2 = c.params.h * c.params.h;
    const std::size_t n = d.size();
    const Execution ex = execution();
    if (f == Functional::NL) {
        require_model(c, Model::NL);
        const NlState s = nl_state(c);
        const auto in = nl_inputs(c, s);
        if (!grad) {
            const auto sums = kernels::nl_density(in, nullptr, ex);
            return dA * (sums.tt + sums.zz + 2.0 * sums.tz + h2 * sums.bend);
        }
        std::vector<std::vector<double>> buf(16, std::vector<double>(n));
        kernels::NlResiduals res{buf[0].data(),  buf[1].data(),  buf[2].data(),  buf[3].data(),
                                 buf[4].data(),  buf[5].data(),  buf[6].data(),  buf[7].data(),
                                 buf[8].data(),  buf[9].data(),  buf[10].data(), buf[11].data(),
                                 buf[12].data(), buf[13].data(), buf[14].data(), buf[15].data()};
        const auto sums = kernels::nl_density(in, &res, ex);
        grad->rho = GridField(d);
        grad->theta = GridField(d);
        grad->z = GridField(d);
        adjoint_derivative_sum(d,
                               {{res.R_t, 1, 0}, {res.R_z, 0, 1}, {res.R_tt, 2, 0}, {res.R_tz, 1, 1},
                                {res.R_zz, 0, 2}},
                               grad->rho.data());
        for (std::size_t k = 0; k < n; ++k) grad->rho.data()[k] += res.R[k];
        adjoint_derivative_sum(d,
                               {{res.q_t, 1, 0}, {res.q_z, 0, 1}, {res.q_tt, 2, 0}, {res.q_tz, 1, 1},
                                {res.q_zz, 0, 2}},
                               grad->theta.data());
        adjoint_derivative_sum(d,
                               {{res.s_t, 1, 0}, {res.s_z, 0, 1}, {res.s_tt, 2, 0}, {res.s_tz, 1, 1},
                                {res.s_zz, 0, 2}},
                               grad->z.data());
        grad->rho *= dA;
        grad->theta *= dA;
        grad->z *= dA;
        return dA * (sums.tt + sums.zz + 2.0 * sums.tz + h2 * sums.bend);
    }

    require_model(c, Model::VKD);
    const double w = (f == Functional::FS) ? 0.0 : 1.0;
    const VkdState s = vkd_state(c);
    const auto in = vkd_inputs(c, s, w);
    if (!grad) {
        const auto sums = kernels::vkd_density(in, nullptr, ex);
        return dA * (sums.tt + sums.zz + 2.0 * w * sums.tz + h2 * sums.bend);
    }
    std::vector<std::vector<double>> buf(10, std::vector<double>(n));
    kernels::VkdResiduals res{buf[0].data(), buf[1].data(), buf[2].data(), buf[3].data(), buf[4].data(),
                              buf[5].data(), buf[6].data(), buf[7].data(), buf[8].data(), buf[9].data()};
    const auto sums = kernels::vkd_density(in, &res, ex);
    grad->rho = GridField(d);
    grad->theta = GridField(d);
    grad->z = GridField(d);
    adjoint_derivative_sum(
        d, {{res.r_t, 1, 0}, {res.r_z, 0, 1}, {res.r_tt, 2, 0}, {res.r_tz, 1, 1}, {res.r_zz, 0, 2}},
        grad->rho.data());
    for (std::size_t k = 0; k < n; ++k) grad->rho.data()[k] += res.r[k];
    adjoint_derivative_sum(d, {{res.a_t, 1, 0}, {res.a_z, 0, 1}}, grad->theta.data());
    adjoint_derivative_sum(d, {{res.p_t, 1, 0}, {res.p_z, 0, 1}}, grad->z.data());
    grad->rho *= dA;
    grad->theta *= dA;
    grad->z *= dA;
    return dA * (sums.tt + sums.zz + 2.0 * w * sums.tz + h2 * sums.bend);
}

namespace {

using Mat32 = std::array<std::array<double, 2>, 3>;

std::array<double, 3> gram(const Mat32& F) {
    double a = 0, b = 0, c = 0;
    for (int r = 0; r < 3; ++r) {
        a += F[r][0] * F[r][0];
        b += F[r][0] * F[r][1];
        c += F[r][1] * F[r][1];
    }
    return {a, b, c};
}

}  // namespace

double relaxed_density(const Mat32& F) {
    const auto [a, b, c] = gram(F);
    // Eigenvalues of [[a, b], [b, c]]: squared singular values of F.
    const double mean = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    const double mu1 = mean + rad;
    const double mu2 = mean - rad;
    const double p1 = std::max(0.0, mu1 - 1.0), p2 = std::max(0.0, mu2 - 1.0);
    return p1 * p1 + p2 * p2;
}

double metric_density(const Mat32& F) {
    const auto [a, b, c] = gram(F);
    return (a - 1.0) * (a - 1.0) + 2.0 * b * b + (c - 1.0) * (c - 1.0);
}

}  // namespace mlab
