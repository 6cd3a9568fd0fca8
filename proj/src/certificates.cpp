#include "mlab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlab/error.hpp"

namespace mlab {

namespace {

constexpr double kAdmissibility = 1e-9;

EnergyOptions no_resolution_check() {
    EnergyOptions o;
    o.check_resolution = false;
    return o;
}

double sum_sq(const GridField& f) {
    GridField g = f;
    for (double& x : g.values()) x *= x;
    return integrate(g);
}

GridField pointwise(const GridField& a, auto&& fn) {
    GridField out(a.domain());
    for (std::size_t k = 0; k < a.size(); ++k) out.data()[k] = fn(k);
    return out;
}

// int_theta ( (1/|I_z|) int_z f - c )^2 with |I_z| = z_extent.
double slice_z_jensen(const GridField& f, double c) {
    const Domain& d = f.domain();
    double s = 0;
    for (int i = 0; i < d.n_theta; ++i) {
        double m = 0;
        for (int j = 0; j < d.n_z; ++j) m += f(i, j);
        const double v = m * d.dz() / d.z_extent - c;
        s += v * v;
    }
    return s * d.dtheta() * d.z_extent;
}

// (1/|I_theta|) int_z ( int_theta f )^2.
double slice_theta_jensen(const GridField& f) {
    const Domain& d = f.domain();
    double s = 0;
    for (int j = 0; j < d.n_z; ++j) {
        double m = 0;
        for (int i = 0; i < d.n_theta; ++i) m += f(i, j);
        m *= d.dtheta();
        s += m * m;
    }
    return s * d.dz() / d.theta_extent;
}

void require_obstacle(const GridField& r, double floor_, const char* what) {
    const double mn = r.min();
    if (mn < floor_ - kAdmissibility) {
        std::ostringstream os;
        os << "certificates need an admissible field: " << what << " undershoots by " << floor_ - mn;
        throw PreconditionError(os.str());
    }
}

double frobenius_hessian_sq(const GridField& f) {
    const GridField tt = derivative(f, 2, 0), tz = derivative(f, 1, 1), zz = derivative(f, 0, 2);
    double s = 0;
    for (std::size_t k = 0; k < f.size(); ++k)
        s += tt.data()[k] * tt.data()[k] + 2.0 * tz.data()[k] * tz.data()[k] + zz.data()[k] * zz.data()[k];
    return s * f.domain().cell_area();
}

}  // namespace

std::string to_string(CertificateMode m) { return m == CertificateMode::EXPLICIT ? "explicit" : "ratio"; }

CertificateReport make_report(std::string name, double lhs, double rhs, CertificateMode mode, std::string detail) {
    CertificateReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = lhs - rhs;
    r.mode = mode;
    r.detail = std::move(detail);
    const double tol = 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    r.passed = r.slack >= -tol;
    if (mode == CertificateMode::RATIO)
        r.ratio = rhs != 0 ? lhs / (rhs / kRatioFloor) : kInf;
    else
        r.ratio = rhs != 0 ? lhs / rhs : kInf;
    return r;
}

std::vector<CertificateReport> vkd_certificates(const Configuration& c) {
    if (c.model != Model::VKD) throw PreconditionError("vkd_certificates needs a VKD configuration");
    const ModelParams& mp = c.params;
    const double R = mp.rho - 1.0;
    require_obstacle(c.comp_rho, R, "phi_rho >= rho - 1");
    const double delta = vkd_energy(c, no_resolution_check()).excess;
    const GridField& r = c.comp_rho;
    const GridField rt = derivative(r, 1, 0), rz = derivative(r, 0, 1);

    const double l1 = integrate(pointwise(r, [&](std::size_t k) { return std::abs(r.data()[k] - R); }));
    const double rt_sq = sum_sq(rt);
    const double bend = mp.h * mp.h * frobenius_hessian_sq(r);
    const double axial = slice_z_jensen(pointwise(r, [&](std::size_t k) { return 0.5 * rz.data()[k] * rz.data()[k]; }),
                                        mp.lambda);

    std::vector<CertificateReport> out;
    out.push_back(make_report("vkd_hoop_l1", delta, R * l1, CertificateMode::EXPLICIT,
                              "int eps_tt^2 - |Omega|(rho-1)^2 >= 2(rho-1) int (eps_tt - (rho-1))"));
    out.push_back(make_report("vkd_bending", delta, bend, CertificateMode::EXPLICIT, "membrane excess >= 0"));
    out.push_back(make_report("vkd_axial_jensen", delta, axial, CertificateMode::EXPLICIT,
                              "Jensen in z on eps_zz, |I_z| = 1"));
    out.push_back(make_report("vkd_combined", delta, 2.0 * R * l1 + R * rt_sq + axial + bend, CertificateMode::EXPLICIT,
                              "sum of the hoop, axial and bending chains"));
    return out;
}

std::vector<CertificateReport> fs_certificates(const Configuration& c) {
    if (c.model != Model::VKD) throw PreconditionError("fs_certificates needs a VKD configuration");
    const ModelParams& mp = c.params;
    if (mp.rho != 1.0) throw PreconditionError("free-shear certificates need rho = 1");
    require_obstacle(c.comp_rho, 0.0, "phi_rho >= 0");
    const double fs = fs_energy(c, no_resolution_check()).total;
    const GridField& r = c.comp_rho;
    const GridField rt = derivative(r, 1, 0), rz = derivative(r, 0, 1);
    const double two_pi = c.domain().theta_extent;

    const double l2l1 = mixed_norm(r, 2, 1);
    const double slope = mixed_norm(rt, 4, 2);
    const double bend = mp.h * mp.h * frobenius_hessian_sq(r);
    const double axial = slice_z_jensen(pointwise(r, [&](std::size_t k) { return 0.5 * rz.data()[k] * rz.data()[k]; }),
                                        mp.lambda);
    const double hoop = slice_theta_jensen(
        pointwise(r, [&](std::size_t k) { return 0.5 * rt.data()[k] * rt.data()[k] + r.data()[k]; }));

    std::vector<CertificateReport> out;
    out.push_back(make_report("fs_radial_l2l1", fs, l2l1 * l2l1 / two_pi, CertificateMode::EXPLICIT,
                              "Jensen in theta, constant 1/|I_theta|"));
    out.push_back(make_report("fs_theta_slope", fs, std::pow(slope, 4) / (4.0 * two_pi), CertificateMode::EXPLICIT,
                              "Jensen in theta, constant 1/(4|I_theta|)"));
    out.push_back(make_report("fs_bending", fs, bend, CertificateMode::EXPLICIT, "membrane terms >= 0"));
    out.push_back(make_report("fs_axial_jensen", fs, axial, CertificateMode::EXPLICIT,
                              "Jensen in z on eps_zz, |I_z| = 1"));
    out.push_back(make_report("fs_combined", fs, hoop + axial + bend, CertificateMode::EXPLICIT,
                              "theta and z Jensen chains plus bending"));
    return out;
}

std::vector<CertificateReport> nl_certificates(const Configuration& c) {
    if (c.model != Model::NL) throw PreconditionError("nl_certificates needs an NL configuration");
    const ModelParams& mp = c.params;
    const Domain& d = c.domain();
    const double rho = mp.rho, s = rho * rho - 1.0, area = d.area(), h2 = mp.h * mp.h;
    require_obstacle(c.comp_rho, rho, "Phi_rho >= rho");
    const auto D = first_derivatives(c);
    require_obstacle(D[5], 0.0, "d_z Phi_z >= 0");
    const double delta = nl_energy(c, no_resolution_check()).excess;
    const MetricField g = nl_metric(c);
    const SecondDerivatives dd = nl_second_derivatives(c);
    const GridField& R = c.comp_rho;
    const GridField& Rt = D[0];
    const GridField& Rz = D[1];
    const GridField& Tt = D[2];
    const GridField& Tz = D[3];
    const GridField& Zt = D[4];

    const double tt = sum_sq(pointwise(R, [&](std::size_t k) { return g.g_tt.data()[k] - 1.0; })) - area * s * s;
    const double tz = sum_sq(g.g_tz);
    const double zz = sum_sq(pointwise(R, [&](std::size_t k) { return g.g_zz.data()[k] - 1.0; }));
    const double btt = integrate(dd.tt.norm2()) - area * rho * rho;
    const double btz = integrate(dd.tz.norm2());
    const double bzz = integrate(dd.zz.norm2());

    const double hoop_I = integrate(pointwise(R, [&](std::size_t k) {
        const double a = R.data()[k] * Tt.data()[k];
        return a * a - rho * rho;
    }));
    const double rt_sq = sum_sq(Rt), zt_sq = sum_sq(Zt);
    const double qt_sq = sum_sq(pointwise(R, [&](std::size_t k) { return Tt.data()[k] - 1.0; }));
    const double l1 = integrate(pointwise(R, [&](std::size_t k) { return std::abs(R.data()[k] - rho); }));
    const double sig = 4.0 * rho * s;
    const GridField q = c.comp_theta;
    const double convex = integrate(pointwise(R, [&](std::size_t k) {
        const double qq = q.data()[k];
        return Rt.data()[k] * std::sin(qq) + R.data()[k] * Tt.data()[k] * std::cos(qq) - rho;
    }));

    std::vector<CertificateReport> out;
    const auto E = CertificateMode::EXPLICIT;
    out.push_back(make_report("nl_split_tt", delta, tt, E, "Jensen in theta with Phi_rho >= rho"));
    out.push_back(make_report("nl_split_tz", delta, tz, E));
    out.push_back(make_report("nl_split_zz", delta, zz, E));
    out.push_back(make_report("nl_bend_tt", delta, h2 * btt, E, "Jensen on the radial frame component"));
    out.push_back(make_report("nl_bend_tz", delta, h2 * btz, E));
    out.push_back(make_report("nl_bend_zz", delta, h2 * bzz, E));
    out.push_back(make_report("nl_hoop_combined", delta, 2.0 * s * (hoop_I + rt_sq + zt_sq), E,
                              "(g-1)^2 - (rho^2-1)^2 >= 2(rho^2-1)(g - rho^2)"));
    out.push_back(make_report("nl_hoop_angle", delta, 2.0 * s * qt_sq, E, "hoop stretch >= ||d_theta phi_theta||^2"));
    out.push_back(make_report("nl_theta_slope_rho", delta, std::pow(mixed_norm(Rt, 4, 2), 4) / d.theta_extent, E,
                              "Jensen in theta on (g_tt - rho^2)^2, constant 1/|I_theta|"));
    out.push_back(make_report("nl_theta_slope_z", delta, std::pow(mixed_norm(Zt, 4, 2), 4) / d.theta_extent, E,
                              "Jensen in theta on (g_tt - rho^2)^2, constant 1/|I_theta|"));
    out.push_back(make_report("nl_sigma_eff", delta, sig * l1, E,
                              "stress-field bound; the chain is exact when Phi_theta = theta"));
    out.push_back(make_report("nl_sigma_eff_convex", delta, sig * convex, E,
                              "convexity of the relaxed density at the effective gradient"));
    out.push_back(make_report("nl_membrane_l1", delta, kRatioFloor * s * l1, CertificateMode::RATIO,
                              "Delta >~ (rho^2-1) ||Phi_rho - rho||_1"));

    // Per theta-slice: lambda <= int |g_zz - 1| + (d_z Phi_rho)^2 + (Phi_rho d_z Phi_theta)^2,
    // then Hoelder on |Omega| for the L^1 norm of g_zz - 1.
    const double b_rho = sum_sq(Rz);
    const double b_delta = std::sqrt(area * std::max(0.0, delta));
    const double b_theta = sum_sq(pointwise(R, [&](std::size_t k) { return R.data()[k] * Tz.data()[k]; }));
    const char* dom = "(Delta)^(1/2)";
    if (b_rho >= b_delta && b_rho >= b_theta) dom = "||d_z Phi_rho||^2";
    else if (b_theta > b_delta) dom = "||Phi_rho d_z Phi_theta||^2";
    out.push_back(make_report("nl_buckling", b_rho + b_delta + b_theta, mp.lambda * d.theta_extent * d.z_extent, E,
                              std::string("dominant branch ") + dom));
    return out;
}

std::vector<CertificateReport> certificates(Functional f, const Configuration& c) {
    switch (f) {
        case Functional::VKD: return vkd_certificates(c);
        case Functional::FS: return fs_certificates(c);
        case Functional::NL: return nl_certificates(c);
    }
    throw PreconditionError("unknown model");
}

bool all_passed(const std::vector<CertificateReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const CertificateReport& r) { return r.passed; });
}

}  // namespace mlab
