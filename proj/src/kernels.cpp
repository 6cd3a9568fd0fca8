#include "mlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mlab::kernels {

namespace {

inline void vkd_node(const VkdInputs& in, const VkdResiduals* res, std::size_t k, VkdSums& s) {
    const double rt = in.r_t[k], rz = in.r_z[k];
    const double ett = in.a_t[k] + 0.5 * rt * rt + in.r[k];
    const double ezz = -in.lambda + in.p_z[k] + 0.5 * rz * rz;
    const double etz = 0.5 * (in.p_t[k] + in.a_z[k]) + 0.5 * rt * rz;
    const double btt = in.r_tt[k], btz = in.r_tz[k], bzz = in.r_zz[k];
    s.tt += ett * ett;
    s.zz += ezz * ezz;
    s.tz += etz * etz;
    s.bend += btt * btt + 2.0 * btz * btz + bzz * bzz;
    if (res) {
        const double w = in.shear_weight;
        res->r[k] = 2.0 * ett;
        res->r_t[k] = 2.0 * ett * rt + 2.0 * w * etz * rz;
        res->r_z[k] = 2.0 * ezz * rz + 2.0 * w * etz * rt;
        res->r_tt[k] = 2.0 * in.h2 * btt;
        res->r_tz[k] = 4.0 * in.h2 * btz;
        res->r_zz[k] = 2.0 * in.h2 * bzz;
        res->a_t[k] = 2.0 * ett;
        res->a_z[k] = 2.0 * w * etz;
        res->p_t[k] = 2.0 * w * etz;
        res->p_z[k] = 2.0 * ezz;
    }
}

inline void nl_node(const NlInputs& in, const NlResiduals* res, std::size_t k, NlSums& s) {
    const double R = in.R[k], Rt = in.R_t[k], Rz = in.R_z[k];
    const double Tt = 1.0 + in.q_t[k], Tz = in.q_z[k];
    const double Zt = in.s_t[k], Zz = (1.0 - in.lambda) + in.s_z[k];
    const double R2 = R * R;
    const double gtt = Rt * Rt + R2 * Tt * Tt + Zt * Zt;
    const double gzz = Rz * Rz + R2 * Tz * Tz + Zz * Zz;
    const double gtz = Rt * Rz + R2 * Tt * Tz + Zt * Zz;

    const double Rtt = in.R_tt[k], Rtz = in.R_tz[k], Rzz = in.R_zz[k];
    const double Ttt = in.q_tt[k], Ttz = in.q_tz[k], Tzz = in.q_zz[k];
    const double Ztt = in.s_tt[k], Ztz = in.s_tz[k], Zzz = in.s_zz[k];
    // Frame components of d_tt Phi (A), d_tz Phi (B), d_zz Phi (C).
    const double Ar = Rtt - R * Tt * Tt, At = 2.0 * Rt * Tt + R * Ttt, Az = Ztt;
    const double Br = Rtz - R * Tt * Tz, Bt = Rt * Tz + Tt * Rz + R * Ttz, Bz = Ztz;
    const double Cr = Rzz - R * Tz * Tz, Ct = 2.0 * Rz * Tz + R * Tzz, Cz = Zzz;

    const double mtt = gtt - 1.0, mzz = gzz - 1.0;
    s.tt += mtt * mtt;
    s.zz += mzz * mzz;
    s.tz += gtz * gtz;
    s.bend += Ar * Ar + At * At + Az * Az + 2.0 * (Br * Br + Bt * Bt + Bz * Bz) + Cr * Cr + Ct * Ct +
              Cz * Cz;
    if (!res) return;

    const double Gt = 2.0 * mtt, Gz = 2.0 * mzz, Gx = 4.0 * gtz;
    const double h2 = in.h2;
    res->R[k] = Gt * 2.0 * R * Tt * Tt + Gz * 2.0 * R * Tz * Tz + Gx * 2.0 * R * Tt * Tz +
                h2 * (-2.0 * Ar * Tt * Tt + 2.0 * At * Ttt - 4.0 * Br * Tt * Tz + 4.0 * Bt * Ttz -
                      2.0 * Cr * Tz * Tz + 2.0 * Ct * Tzz);
    res->R_t[k] = Gt * 2.0 * Rt + Gx * Rz + h2 * (4.0 * At * Tt + 4.0 * Bt * Tz);
    res->R_z[k] = Gz * 2.0 * Rz + Gx * Rt + h2 * (4.0 * Ct * Tz + 4.0 * Bt * Tt);
    res->R_tt[k] = h2 * 2.0 * Ar;
    res->R_tz[k] = h2 * 4.0 * Br;
    res->R_zz[k] = h2 * 2.0 * Cr;
    res->q_t[k] = Gt * 2.0 * R2 * Tt + Gx * R2 * Tz +
                  h2 * (-4.0 * Ar * R * Tt + 4.0 * At * Rt - 4.0 * Br * R * Tz + 4.0 * Bt * Rz);
    res->q_z[k] = Gz * 2.0 * R2 * Tz + Gx * R2 * Tt +
                  h2 * (-4.0 * Cr * R * Tz + 4.0 * Ct * Rz - 4.0 * Br * R * Tt + 4.0 * Bt * Rt);
    res->q_tt[k] = h2 * 2.0 * At * R;
    res->q_tz[k] = h2 * 4.0 * Bt * R;
    res->q_zz[k] = h2 * 2.0 * Ct * R;
    res->s_t[k] = Gt * 2.0 * Zt + Gx * Zz;
    res->s_z[k] = Gz * 2.0 * Zz + Gx * Zt;
    res->s_tt[k] = h2 * 2.0 * Az;
    res->s_tz[k] = h2 * 4.0 * Bz;
    res->s_zz[k] = h2 * 2.0 * Cz;
}

template <class Sums, class Node>
Sums reduce_rows(std::size_t rows, std::size_t cols, Execution e, Node&& node) {
    std::vector<Sums> part(rows);
    if (e == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < rows; ++i) {
            Sums s;
            for (std::size_t j = 0; j < cols; ++j) node(i * cols + j, s);
            part[i] = s;
        }
    } else {
        for (std::size_t i = 0; i < rows; ++i) {
            Sums s;
            for (std::size_t j = 0; j < cols; ++j) node(i * cols + j, s);
            part[i] = s;
        }
    }
    Sums total;
    for (const Sums& s : part) {
        total.tt += s.tt;
        total.zz += s.zz;
        total.tz += s.tz;
        total.bend += s.bend;
    }
    return total;
}

// Chunks of fixed size keep the summation order independent of threads.
constexpr std::size_t kChunk = 4096;

template <class Node>
double reduce_chunks(std::size_t n, Execution e, Node&& node) {
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> part(chunks, 0.0);
    auto body = [&](std::size_t c) {
        double s = 0;
        const std::size_t end = std::min(n, (c + 1) * kChunk);
        for (std::size_t k = c * kChunk; k < end; ++k) s += node(k);
        part[c] = s;
    };
    if (e == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t c = 0; c < chunks; ++c) body(c);
    } else {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
    }
    double s = 0;
    for (double p : part) s += p;
    return s;
}

}  // namespace

VkdSums vkd_density(const VkdInputs& in, const VkdResiduals* res, Execution e) {
    return reduce_rows<VkdSums>(in.rows, in.cols, e,
                                [&](std::size_t k, VkdSums& s) { vkd_node(in, res, k, s); });
}

NlSums nl_density(const NlInputs& in, const NlResiduals* res, Execution e) {
    return reduce_rows<NlSums>(in.rows, in.cols, e,
                               [&](std::size_t k, NlSums& s) { nl_node(in, res, k, s); });
}

double hinge_penalty(const double* x, double offset, double bound, double weight, std::size_t n,
                     double* res, Execution e) {
    return reduce_chunks(n, e, [&](std::size_t k) {
        const double v = x[k] + offset;
        const double ex = std::abs(v) - bound;
        if (ex <= 0) return 0.0;
        if (res) res[k] += 2.0 * weight * ex * (v > 0 ? 1.0 : -1.0);
        return weight * ex * ex;
    });
}

double negative_part_penalty(const double* x, double offset, double weight, std::size_t n, double* res,
                             Execution e) {
    return reduce_chunks(n, e, [&](std::size_t k) {
        const double v = x[k] + offset;
        if (v >= 0) return 0.0;
        if (res) res[k] += 2.0 * weight * v;
        return weight * v * v;
    });
}

}  // namespace mlab::kernels
