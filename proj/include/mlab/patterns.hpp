#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mlab/energy.hpp"
#include "mlab/grid.hpp"

namespace mlab {

enum class ProfileVariant { VKD_PROFILE, NL_PROFILE };

// FRIEDRICHS: a * exp(1 - 1/(1 - x^2)), x = t / w0.
// PLATEAU: slope -a sign(x) T(|x|) with T a smooth 0 -> 1 -> 0 plateau.
// The plateau shape exists because the nonlinear normalization cannot be met
// by a Friedrichs bump with |f'| < 1 (its slope is too peaked).
enum class ProfileShape { FRIEDRICHS, PLATEAU };

std::string to_string(ProfileVariant v);
std::string to_string(ProfileShape s);

struct ProfileValue {
    double f = 0, df = 0, d2f = 0;
};

struct ProfileMoments {
    double f1 = 0;    // int f
    double f_sq = 0;  // int f^2
    double df_sq = 0; // int f'^2
    double d2f_sq = 0;// int f''^2
    double df_max = 0;
};

class ProfileFunction {
public:
    ProfileVariant variant() const { return variant_; }
    ProfileShape shape() const { return shape_; }
    double half_width() const { return w0_; }
    double amplitude() const { return a_; }
    const ProfileMoments& moments() const { return mom_; }

    // One-periodic evaluation of f, f', f''.
    ProfileValue eval(double t) const;
    double f(double t) const { return eval(t).f; }
    double df(double t) const { return eval(t).df; }
    double d2f(double t) const { return eval(t).d2f; }

    // Unit-amplitude slope shape at x = t / w0 in [-1, 1]; used by quadrature.
    double unit_slope(double x) const;

private:
    friend ProfileFunction make_profile(ProfileVariant, double, ProfileShape);
    struct Table;

    ProfileValue eval_unit(double x) const;

    ProfileVariant variant_ = ProfileVariant::VKD_PROFILE;
    ProfileShape shape_ = ProfileShape::FRIEDRICHS;
    double w0_ = 0.45;
    double a_ = 1.0;
    ProfileMoments mom_;
    std::shared_ptr<const Table> table_;  // plateau antiderivative table
};

inline constexpr double kDefaultHalfWidth = 0.45;

// Throws PreconditionError if the normalization is infeasible at this width.
ProfileFunction make_profile(ProfileVariant v, double half_width,
                             ProfileShape shape);
// Default shape per variant: FRIEDRICHS for vKD, PLATEAU for NL.
ProfileFunction make_profile(ProfileVariant v, double half_width = kDefaultHalfWidth);
// Cached default profiles.
const ProfileFunction& default_profile(ProfileVariant v);

// f_{delta,n}(t) with amplitude sqrt(delta)/n (vKD) or delta/n (NL).
ProfileValue rescaled(const ProfileFunction& p, double delta, int n, double t);
double rescale_profile(const ProfileFunction& p, double delta, int n, double t);

// S(q) = 1 - int sqrt(1 - q^2 f'^2) over one period, for an NL profile.
class SProfile {
public:
    explicit SProfile(const ProfileFunction& p);
    double operator()(double q) const;
    double derivative(double q) const;
    // Inverse on [0, S(1)].
    double inverse(double s) const;
    const ProfileFunction& profile() const { return p_; }

private:
    ProfileFunction p_;
    std::vector<double> grid_q_, grid_s_;
};

const SProfile& default_s_profile();

enum class Regime { UNBUCKLED, MANY, ONE, FLAT, FS_MANY_TILTED, FS_FEW_TILTED_LONG, FS_FEW_TILTED };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

struct PatternParams {
    int n = 1;
    int k = 1;
    double delta = 1.0;
    Regime regime = Regime::ONE;
};

// Slope bounds guaranteed by the constructions.
double vkd_slope_bound(double lambda, double delta);
double nl_slope_bound();
double fs_slope_bound(double lambda, double delta, int n, int k);

Functional functional_from_string(const std::string& s);
std::string to_string(Functional f);

struct RegimeChoice {
    PatternParams params;
    std::vector<std::string> comparisons;  // human-readable record of the dispatch
};

// Picks the branch whose hypothesis holds and the smallest integers inside
// the branch intervals. Throws PreconditionError when the interval is empty
// or delta falls outside (0, 1].
RegimeChoice select_regime(Functional model, const ModelParams& mp);
PatternParams select_regime_params(Functional model, const ModelParams& mp);

// Minimum grid sample factor used by the builders (nodes per wrinkle cell).
inline constexpr double kMinSamplesPerCell = 32.0;

// The axial identities (eps_zz = 0, g_zz = 1) hold on the grid up to the
// Nyquist content of w_z^2, which for the default bump is about 1e-3 at 32
// nodes per wrinkle cell, 5e-8 at 256 and 1e-11 at 512.
Configuration build_vkd_pattern(const ModelParams& mp, const PatternParams& pp, const Domain& dom);
Configuration build_nl_pattern(const ModelParams& mp, const PatternParams& pp, const Domain& dom);
Configuration build_fs_pattern(const ModelParams& mp, const PatternParams& pp, const Domain& dom);
Configuration build_pattern(Functional model, const ModelParams& mp, const PatternParams& pp,
                            const Domain& dom);

// Exact energies of the constructions from profile moments (no grid). The
// axisymmetric vKD pattern and the tilted FS pattern have closed forms.
double vkd_pattern_excess_reduced(const ModelParams& mp, const PatternParams& pp);
double fs_pattern_energy_reduced(const ModelParams& mp, const PatternParams& pp);

// Grid for a pattern: n_z (and n_theta for tilted patterns) set to the next
// power of two carrying at least `samples_per_cell` nodes per wrinkle cell.
Domain pattern_domain(Functional model, const PatternParams& pp, double samples_per_cell,
                      int min_theta = 8, int min_z = 64);

}  // namespace mlab
