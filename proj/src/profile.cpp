#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/patterns.hpp"
#include "quadrature.hpp"

namespace mlab {

namespace {

// Width of the plateau ramps as a fraction of the half-width.
constexpr double kRamp = 1.0 / 6.0;
constexpr int kTablePanels = 2048;
constexpr int kQuadPanels = 256;

const detail::GaussRule& rule16() {
    static const detail::GaussRule g = detail::gauss_legendre(16);
    return g;
}

const detail::GaussRule& rule8() {
    static const detail::GaussRule g = detail::gauss_legendre(8);
    return g;
}

// Smooth step on [0, 1] with all derivatives vanishing at both ends.
double smooth_step(double s) {
    if (s <= 0) return 0;
    if (s >= 1) return 1;
    const double e = 1.0 / s - 1.0 / (1.0 - s);
    if (e > 700) return 0;
    return 1.0 / (1.0 + std::exp(e));
}

double smooth_step_d(double s) {
    if (s <= 0 || s >= 1) return 0;
    const double st = smooth_step(s);
    return st * (1.0 - st) * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s)));
}

// Plateau slope magnitude T(y) on [0, 1] and its derivative.
double plateau(double y) {
    return smooth_step(y / kRamp) * (1.0 - smooth_step((y - 1.0 + kRamp) / kRamp));
}

double plateau_d(double y) {
    const double s1 = smooth_step(y / kRamp);
    const double s2 = smooth_step((y - 1.0 + kRamp) / kRamp);
    return smooth_step_d(y / kRamp) / kRamp * (1.0 - s2) -
           s1 * smooth_step_d((y - 1.0 + kRamp) / kRamp) / kRamp;
}

}  // namespace

// G(y) = int_y^1 T, tabulated at panel nodes.
struct ProfileFunction::Table {
    std::vector<double> g;

    Table() : g(kTablePanels + 1, 0.0) {
        const double hh = 1.0 / kTablePanels;
        for (int j = kTablePanels - 1; j >= 0; --j)
            g[j] = g[j + 1] + detail::integrate_panels(plateau, j * hh, (j + 1) * hh, 1, rule16());
    }

    double operator()(double y) const {
        if (y >= 1) return 0;
        const int j = std::clamp(static_cast<int>(y * kTablePanels), 0, kTablePanels - 1);
        const double right = static_cast<double>(j + 1) / kTablePanels;
        return g[j + 1] + detail::integrate_panels(plateau, y, right, 1, rule8());
    }
};

std::string to_string(ProfileVariant v) { return v == ProfileVariant::VKD_PROFILE ? "VKD_PROFILE" : "NL_PROFILE"; }

std::string to_string(ProfileShape s) { return s == ProfileShape::FRIEDRICHS ? "FRIEDRICHS" : "PLATEAU"; }

ProfileValue ProfileFunction::eval_unit(double x) const {
    ProfileValue v;
    const double ax = std::abs(x);
    if (ax >= 1) return v;
    if (shape_ == ProfileShape::FRIEDRICHS) {
        const double q = 1.0 - x * x;
        const double b = std::exp(1.0 - 1.0 / q);
        const double g1 = -2.0 * x / (q * q);
        const double g2 = -2.0 / (q * q) - 8.0 * x * x / (q * q * q);
        v.f = b;
        v.df = b * g1 / w0_;
        v.d2f = b * (g1 * g1 + g2) / (w0_ * w0_);
    } else {
        const double sg = x < 0 ? -1.0 : 1.0;
        v.f = w0_ * (*table_)(ax);
        v.df = -sg * plateau(ax);
        v.d2f = -plateau_d(ax) / w0_;
    }
    return v;
}

double ProfileFunction::unit_slope(double x) const { return eval_unit(x).df; }

ProfileValue ProfileFunction::eval(double t) const {
    const double s = t - std::round(t);
    ProfileValue v = eval_unit(s / w0_);
    v.f *= a_;
    v.df *= a_;
    v.d2f *= a_;
    return v;
}

ProfileFunction make_profile(ProfileVariant v, double half_width, ProfileShape shape) {
    if (!(half_width > 0.1 && half_width < 0.49))
        throw PreconditionError("profile half-width must lie in (0.1, 0.49)");
    ProfileFunction p;
    p.variant_ = v;
    p.shape_ = shape;
    p.w0_ = half_width;
    p.a_ = 1.0;
    if (shape == ProfileShape::PLATEAU) {
        static std::once_flag once;
        static std::shared_ptr<const ProfileFunction::Table> table;
        std::call_once(once, [] { table = std::make_shared<const ProfileFunction::Table>(); });
        p.table_ = table;
    }
    const double w0 = half_width;
    const auto& g = rule16();

    // Peak unit slope: dense sampling then a golden-section polish.
    double smax = 0, xbest = 0;
    constexpr int kSamples = 20000;
    for (int i = 1; i < kSamples; ++i) {
        const double x = static_cast<double>(i) / kSamples;
        const double s = std::abs(p.unit_slope(x));
        if (s > smax) smax = s, xbest = x;
    }
    {
        double lo = std::max(0.0, xbest - 1.0 / kSamples), hi = std::min(1.0, xbest + 1.0 / kSamples);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 100; ++it) {
            const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            if (std::abs(p.unit_slope(x1)) > std::abs(p.unit_slope(x2)))
                hi = x2;
            else
                lo = x1;
        }
        smax = std::max(smax, std::abs(p.unit_slope(0.5 * (lo + hi))));
    }

    auto slope_sq = [&](double t) {
        const double s = p.unit_slope(t / w0);
        return s * s;
    };
    if (v == ProfileVariant::VKD_PROFILE) {
        const double I = detail::integrate_panels(slope_sq, -w0, w0, 2 * kQuadPanels, g);
        p.a_ = 1.0 / std::sqrt(I);
        if (p.a_ * smax > 2.0) {
            std::ostringstream os;
            os << "infeasible profile: normalized slope " << p.a_ * smax << " exceeds 2 at half-width " << w0;
            throw PreconditionError(os.str());
        }
    } else {
        auto length = [&](double a) {
            return (1.0 - 2.0 * w0) +
                   detail::integrate_panels(
                       [&](double t) { return std::sqrt(std::max(0.0, 1.0 - a * a * slope_sq(t))); }, -w0, w0,
                       2 * kQuadPanels, g);
        };
        const double amax = 1.0 / smax;
        if (length(amax) >= 0.5) {
            std::ostringstream os;
            os << "infeasible profile: " << to_string(shape) << " shape at half-width " << w0
               << " cannot reach arclength 1/2 with slope below 1 (min " << length(amax) << ")";
            throw PreconditionError(os.str());
        }
        double lo = 0, hi = amax;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            (length(mid) > 0.5 ? lo : hi) = mid;
        }
        p.a_ = 0.5 * (lo + hi);
        if (!(p.a_ * smax < 1.0)) throw PreconditionError("infeasible profile: slope reaches 1");
    }

    ProfileMoments& m = p.mom_;
    const int np = 2 * kQuadPanels;
    m.f1 = detail::integrate_panels([&](double t) { return p.eval(t).f; }, -w0, w0, np, g);
    m.f_sq = detail::integrate_panels([&](double t) { return std::pow(p.eval(t).f, 2); }, -w0, w0, np, g);
    m.df_sq = detail::integrate_panels([&](double t) { return std::pow(p.eval(t).df, 2); }, -w0, w0, np, g);
    m.d2f_sq = detail::integrate_panels([&](double t) { return std::pow(p.eval(t).d2f, 2); }, -w0, w0, np, g);
    m.df_max = p.a_ * smax;
    return p;
}

ProfileFunction make_profile(ProfileVariant v, double half_width) {
    return make_profile(v, half_width,
                        v == ProfileVariant::VKD_PROFILE ? ProfileShape::FRIEDRICHS : ProfileShape::PLATEAU);
}

const ProfileFunction& default_profile(ProfileVariant v) {
    static const ProfileFunction vkd = make_profile(ProfileVariant::VKD_PROFILE);
    static const ProfileFunction nl = make_profile(ProfileVariant::NL_PROFILE);
    return v == ProfileVariant::VKD_PROFILE ? vkd : nl;
}

ProfileValue rescaled(const ProfileFunction& p, double delta, int n, double t) {
    ProfileValue r;
    const double s = t - std::round(t);
    if (std::abs(s) >= 0.5 * delta) return r;
    const double amp = p.variant() == ProfileVariant::VKD_PROFILE ? std::sqrt(delta) / n : delta / n;
    const double scale = n / delta;
    // For even n the literal f(n {t} / delta) would cut a bump in half at the
    // window edge; a half-period shift keeps exactly n whole bumps inside.
    const double shift = (n % 2 == 0) ? 0.5 : 0.0;
    const ProfileValue v = p.eval(scale * s + shift);
    r.f = amp * v.f;
    r.df = amp * scale * v.df;
    r.d2f = amp * scale * scale * v.d2f;
    return r;
}

double rescale_profile(const ProfileFunction& p, double delta, int n, double t) {
    return rescaled(p, delta, n, t).f;
}

SProfile::SProfile(const ProfileFunction& p) : p_(p) {
    if (p.variant() != ProfileVariant::NL_PROFILE) throw PreconditionError("S-map needs an NL profile");
    constexpr int kTable = 64;
    for (int i = 0; i <= kTable; ++i) {
        const double q = static_cast<double>(i) / kTable;
        grid_q_.push_back(q);
        grid_s_.push_back((*this)(q));
    }
}

double SProfile::operator()(double q) const {
    const double w0 = p_.half_width();
    const double I = detail::integrate_panels(
        [&](double t) {
            const double d = q * p_.df(t);
            return std::sqrt(std::max(0.0, 1.0 - d * d));
        },
        -w0, w0, 2 * kQuadPanels, rule16());
    return 1.0 - (1.0 - 2.0 * w0) - I;
}

double SProfile::derivative(double q) const {
    const double w0 = p_.half_width();
    return detail::integrate_panels(
        [&](double t) {
            const double d = p_.df(t);
            return q * d * d / std::sqrt(std::max(1e-300, 1.0 - q * q * d * d));
        },
        -w0, w0, 2 * kQuadPanels, rule16());
}

double SProfile::inverse(double s) const {
    if (!(s >= 0 && s <= grid_s_.back() + 1e-12)) {
        std::ostringstream os;
        os << "S-map argument " << s << " outside [0, " << grid_s_.back() << "]";
        throw PreconditionError(os.str());
    }
    if (s <= 0) return 0;
    auto it = std::lower_bound(grid_s_.begin(), grid_s_.end(), s);
    const std::size_t j = std::clamp<std::size_t>(it - grid_s_.begin(), 1, grid_s_.size() - 1);
    double lo = grid_q_[j - 1], hi = grid_q_[j];
    double q = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100; ++iter) {
        const double r = (*this)(q) - s;
        if (r > 0)
            hi = q;
        else
            lo = q;
        const double d = derivative(q);
        double next = d > 0 ? q - r / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - q) < 1e-16 || hi - lo < 1e-16) {
            q = next;
            break;
        }
        q = next;
    }
    return q;
}

const SProfile& default_s_profile() {
    static const SProfile s(default_profile(ProfileVariant::NL_PROFILE));
    return s;
}

}  // namespace mlab
