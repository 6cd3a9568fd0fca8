#pragma once

#include <cstddef>

#include "mlab/exec.hpp"

// Pointwise energy densities over grid nodes. Every kernel has a serial
// reference driver and an OpenMP driver; both accumulate per-row partial sums
// and combine them in row order, so results do not depend on the thread count.
namespace mlab::kernels {

// vKD / free-shear density. Inputs are nodal values of phi_rho and its
// derivatives, d_theta/d_z of phi_theta and of the periodic part p of phi_z.
struct VkdInputs {
    const double* r;
    const double* r_t;
    const double* r_z;
    const double* r_tt;
    const double* r_tz;
    const double* r_zz;
    const double* a_t;  // d_theta phi_theta
    const double* a_z;  // d_z phi_theta
    const double* p_t;  // d_theta p
    const double* p_z;  // d_z p
    double lambda;
    double h2;
    double shear_weight;  // 1 for vKD, 0 for free shear
    std::size_t rows;
    std::size_t cols;
};

// Partial derivatives of the density with respect to each input array.
struct VkdResiduals {
    double* r;
    double* r_t;
    double* r_z;
    double* r_tt;
    double* r_tz;
    double* r_zz;
    double* a_t;
    double* a_z;
    double* p_t;
    double* p_z;
};

struct VkdSums {
    double tt = 0;    // sum eps_tt^2
    double zz = 0;    // sum eps_zz^2
    double tz = 0;    // sum eps_tz^2
    double bend = 0;  // sum |D^2 phi_rho|^2
};

VkdSums vkd_density(const VkdInputs& in, const VkdResiduals* res, Execution e);

// Nonlinear density. R is the full radial component; q and s are the periodic
// parts of Phi_theta and Phi_z, so d_theta Phi_theta = 1 + q_t and
// d_z Phi_z = (1 - lambda) + s_z.
struct NlInputs {
    const double* R;
    const double* R_t;
    const double* R_z;
    const double* R_tt;
    const double* R_tz;
    const double* R_zz;
    const double* q_t;
    const double* q_z;
    const double* q_tt;
    const double* q_tz;
    const double* q_zz;
    const double* s_t;
    const double* s_z;
    const double* s_tt;
    const double* s_tz;
    const double* s_zz;
    double lambda;
    double h2;
    std::size_t rows;
    std::size_t cols;
};

struct NlResiduals {
    double* R;
    double* R_t;
    double* R_z;
    double* R_tt;
    double* R_tz;
    double* R_zz;
    double* q_t;
    double* q_z;
    double* q_tt;
    double* q_tz;
    double* q_zz;
    double* s_t;
    double* s_z;
    double* s_tt;
    double* s_tz;
    double* s_zz;
};

struct NlSums {
    double tt = 0;  // sum (g_tt - 1)^2
    double zz = 0;  // sum (g_zz - 1)^2
    double tz = 0;  // sum g_tz^2
    double bend = 0;
};

NlSums nl_density(const NlInputs& in, const NlResiduals* res, Execution e);

// Sum over nodes of weight * ((|x + offset| - bound)_+)^2; gradient is added
// into `res` when non-null.
double hinge_penalty(const double* x, double offset, double bound, double weight, std::size_t n,
                     double* res, Execution e);
// Sum over nodes of weight * ((-(x + offset))_+)^2.
double negative_part_penalty(const double* x, double offset, double weight, std::size_t n,
                             double* res, Execution e);

}  // namespace mlab::kernels
