#pragma once

#include <array>
#include <string>
#include <vector>

#include "mlab/grid.hpp"

namespace mlab {

enum class Model { VKD, NL };

std::string to_string(Model m);

// vKD: comp_rho = phi_rho, comp_theta = phi_theta, comp_z = p with
// phi_z = -lambda z + p. NL: comp_rho = Phi_rho, comp_theta = q with
// Phi_theta = theta + q, comp_z = r with Phi_z = (1 - lambda) z + r.
struct Configuration {
    Model model = Model::VKD;
    GridField comp_rho;
    GridField comp_theta;
    GridField comp_z;
    ModelParams params;

    const Domain& domain() const { return comp_rho.domain(); }
    // Throws PreconditionError on mismatched domains or non-finite values.
    void validate() const;
};

// phi = (rho - 1, 0, -lambda z).
Configuration vkd_unbuckled(const ModelParams& mp, const Domain& dom);
// Phi = (rho, theta, (1 - lambda) z).
Configuration nl_uniform(const ModelParams& mp, const Domain& dom);

struct StrainField {
    GridField eps_tt, eps_zz, eps_tz;
};

struct MetricField {
    GridField g_tt, g_zz, g_tz;
};

// Components of a vector field in the frame (E_rho(Phi), E_theta(Phi), E_z).
struct FrameField {
    GridField rho, theta, z;
    GridField norm2() const;
};

struct SecondDerivatives {
    FrameField tt, tz, zz;
    // |d_tt Phi|^2 + 2 |d_tz Phi|^2 + |d_zz Phi|^2
    GridField norm2() const;
};

struct EnergyReport {
    double membrane_tt = 0;
    double membrane_zz = 0;
    double membrane_tz = 0;
    double bending = 0;  // includes the h^2 factor
    double total = 0;
    double bulk = 0;
    double excess = 0;
    double slope_linf = 0;
    bool admissible = true;
    std::vector<std::string> violations;
};

struct EnergyOptions {
    bool check_resolution = true;
    double tail_tolerance = 5e-3;
    double admissibility_tolerance = 1e-9;
};

// First derivatives with affine parts included, in the order
// (d_t c_rho, d_z c_rho, d_t c_theta, d_z c_theta, d_t c_z, d_z c_z).
std::array<GridField, 6> first_derivatives(const Configuration& c);
double slope_linf(const Configuration& c);

StrainField vkd_strain(const Configuration& c);
EnergyReport vkd_energy(const Configuration& c, const EnergyOptions& opt = {});
EnergyReport fs_energy(const Configuration& c, const EnergyOptions& opt = {});

MetricField nl_metric(const Configuration& c);
SecondDerivatives nl_second_derivatives(const Configuration& c);
EnergyReport nl_energy(const Configuration& c, const EnergyOptions& opt = {});

double vkd_bulk(const ModelParams& mp, const Domain& dom);
double nl_bulk(const ModelParams& mp, const Domain& dom);

// Discrete energy (sum of nodal densities times cell area) with its exact
// gradient with respect to the nodal values of the three stored components.
struct ComponentGradient {
    GridField rho, theta, z;
};

enum class Functional { VKD, FS, NL };

double discrete_energy(Functional f, const Configuration& c, ComponentGradient* grad);

// QW(F) = (s1^2 - 1)_+^2 + (s2^2 - 1)_+^2 for the singular values of a 3x2 F
// given column-major as F[row][col].
double relaxed_density(const std::array<std::array<double, 2>, 3>& F);
// |F^T F - I|^2 (Frobenius).
double metric_density(const std::array<std::array<double, 2>, 3>& F);

}  // namespace mlab
