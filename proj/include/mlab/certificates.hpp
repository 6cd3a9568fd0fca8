#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlab/energy.hpp"

namespace mlab {

enum class CertificateMode {
    EXPLICIT,  // constants re-derived from the Jensen/Hoelder chain, hard-asserted
    RATIO      // anonymous constant: rhs carries kRatioFloor, ratio tracked
};

std::string to_string(CertificateMode m);

inline constexpr double kRatioFloor = 1e-3;

// lhs >= rhs is the certified inequality.
struct CertificateReport {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    double slack = 0;
    bool passed = false;
    CertificateMode mode = CertificateMode::EXPLICIT;
    double ratio = 0;     // lhs / rhs without the floor (RATIO mode), lhs / rhs otherwise
    std::string detail;   // chain used, or the dominant branch
};

// passed <=> slack >= -1e-9 max(1, |lhs|, |rhs|).
CertificateReport make_report(std::string name, double lhs, double rhs, CertificateMode mode,
                              std::string detail = {});

// Requires phi_rho >= rho - 1 (within 1e-9). Throws PreconditionError otherwise.
std::vector<CertificateReport> vkd_certificates(const Configuration& c);
// Requires rho = 1 and phi_rho >= 0.
std::vector<CertificateReport> fs_certificates(const Configuration& c);
// Requires Phi_rho >= rho and d_z Phi_z >= 0.
std::vector<CertificateReport> nl_certificates(const Configuration& c);

// Dispatch on the functional. FS applies to VKD configurations with rho = 1.
std::vector<CertificateReport> certificates(Functional f, const Configuration& c);

bool all_passed(const std::vector<CertificateReport>& reports);

enum class InterpFamily { GN_1D, GN_2D_L43, GN_2D_L2, GN_2D_LINF, MIXED };

std::string to_string(InterpFamily f);
InterpFamily interp_family_from_string(const std::string& s);

struct InterpolationReport {
    InterpFamily family = InterpFamily::GN_1D;
    int samples = 0;
    int skipped = 0;     // degenerate samples (rhs norm zero)
    int violations = 0;  // ratio <= kRatioFloor
    double min_ratio = 0;
    double max_ratio = 0;
    // max |ratio(a f) / ratio(f) - 1| over the tested amplitudes
    double amplitude_error = 0;
    std::uint64_t seed = 0;
};

// Ratio lhs-combination / rhs-norm for one field. 1D fields are stored on
// an 8 x N grid, constant in the first direction; 2D fields live on the unit
// square. Returns a negative value when the rhs norm vanishes.
double interpolation_ratio(InterpFamily family, const GridField& f);

// Seeded band-limited samples (modes up to a quarter of the Nyquist index,
// standard normal coefficients); per-sample seeds derive from (seed, index).
GridField interpolation_sample(InterpFamily family, std::uint64_t seed, int index);

InterpolationReport check_interpolation(InterpFamily family, int samples, std::uint64_t seed);

}  // namespace mlab
