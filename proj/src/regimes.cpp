#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/patterns.hpp"

namespace mlab {

namespace {

std::string fmt_cmp(const char* name, double v) {
    std::ostringstream os;
    os.precision(6);
    os << name << " = " << v;
    return os.str();
}

// Smallest integer in [lo, hi].
int smallest_integer(double lo, double hi, const char* what) {
    double c = std::ceil(lo);
    if (c - lo > 1.0 - 1e-12 * std::max(1.0, lo)) c -= 1.0;  // lo within rounding of an integer
    c = std::max(c, 1.0);
    if (c > hi || c > 2e9) {
        std::ostringstream os;
        os << "no admissible integer for " << what << " in [" << lo << ", " << hi << "]";
        throw PreconditionError(os.str());
    }
    return static_cast<int>(c);
}

void check_delta(double delta, const char* branch) {
    if (!(delta > 0 && delta <= 1)) {
        std::ostringstream os;
        os << branch << " branch gives delta = " << delta << " outside (0,1]";
        throw PreconditionError(os.str());
    }
}

RegimeChoice select_vkd(const ModelParams& mp) {
    const double h = mp.h, lam = mp.lambda, R = mp.rho - 1.0, m = mp.m;
    const double flat = lam * h;
    const double one = R > 0 ? std::pow(h, 6.0 / 7) * std::pow(lam, 5.0 / 7) * std::pow(R, 4.0 / 7) : 0.0;
    const double many =
        (mp.finite_m() && R > 0) ? std::pow(m, -1.0 / 3) * std::pow(R, 2.0 / 3) * lam * std::pow(h, 2.0 / 3) : 0.0;
    RegimeChoice out;
    out.comparisons = {fmt_cmp("unbuckled", lam * lam), fmt_cmp("flat", flat), fmt_cmp("one", one),
                       fmt_cmp("many", many)};
    PatternParams& p = out.params;
    const double best = std::max({flat, one, many});
    if (lam * lam <= best) {
        p = {1, 1, 1.0, Regime::UNBUCKLED};
        out.comparisons.push_back("unbuckled <= max(flat, one, many)");
        return out;
    }
    if (flat >= one && flat >= many) {
        out.comparisons.push_back("flat >= max(one, many)");
        p.regime = Regime::FLAT;
        if (lam <= m * std::sqrt(h)) {
            out.comparisons.push_back("lambda <= m h^(1/2)");
            p.n = 1;
            p.delta = 4.0 * std::sqrt(h);
        } else {
            out.comparisons.push_back("lambda > m h^(1/2)");
            const double lo = lam / (std::sqrt(h) * m);
            p.n = smallest_integer(lo, 2 * lo, "n");
            p.delta = 4.0 * lam / m;
        }
    } else if (one >= many) {
        out.comparisons.push_back("one >= max(flat, many)");
        p.regime = Regime::ONE;
        p.n = 1;
        p.delta = 4.0 * std::pow(lam, 1.0 / 7) * std::pow(R, -2.0 / 7) * std::pow(h, 4.0 / 7);
    } else {
        out.comparisons.push_back("many >= max(flat, one)");
        p.regime = Regime::MANY;
        const double lo = std::cbrt(R) * lam * std::pow(h, -2.0 / 3) * std::pow(m, -7.0 / 6);
        p.n = smallest_integer(lo, 2 * lo, "n");
        p.delta = 4.0 * lam / m;
    }
    p.k = 1;
    check_delta(p.delta, to_string(p.regime).c_str());
    return out;
}

RegimeChoice select_nl(const ModelParams& mp) {
    if (mp.m < 1.0) throw PreconditionError("NL constructions need m >= 1");
    const double h = mp.h, lam = mp.lambda;
    const double R2 = std::max(mp.rho * mp.rho - 1.0, h * h);
    const double flat = lam * h;
    const double one = std::pow(h, 6.0 / 7) * std::pow(lam, 5.0 / 7) * std::pow(R2, 4.0 / 7);
    const double many = std::pow(R2, 2.0 / 3) * lam * std::pow(h, 2.0 / 3);
    RegimeChoice out;
    out.comparisons = {fmt_cmp("(rho^2-1) v h^2", R2), fmt_cmp("unbuckled", lam * lam), fmt_cmp("flat", flat),
                       fmt_cmp("one", one), fmt_cmp("many", many)};
    PatternParams& p = out.params;
    const double best = std::max({flat, one, many});
    if (lam * lam <= best) {
        p = {1, 1, 1.0, Regime::UNBUCKLED};
        out.comparisons.push_back("unbuckled <= max(flat, one, many)");
        return out;
    }
    if (flat >= one && flat >= many) {
        out.comparisons.push_back("flat >= max(one, many)");
        p.regime = Regime::FLAT;
        if (lam <= std::sqrt(h)) {
            out.comparisons.push_back("lambda <= h^(1/2)");
            p.n = 1;
            p.delta = 2.0 * std::sqrt(h);
        } else {
            out.comparisons.push_back("lambda > h^(1/2)");
            const double lo = lam / std::sqrt(h);
            p.n = smallest_integer(lo, 2 * lo, "n");
            p.delta = 2.0 * lam;
        }
    } else if (one >= many) {
        out.comparisons.push_back("one >= max(flat, many)");
        p.regime = Regime::ONE;
        p.n = 1;
        p.delta = 2.0 * std::pow(lam, 1.0 / 7) * std::pow(R2, -2.0 / 7) * std::pow(h, 4.0 / 7);
    } else {
        out.comparisons.push_back("many >= max(flat, one)");
        p.regime = Regime::MANY;
        const double lo = std::cbrt(R2) * lam * std::pow(h, -2.0 / 3);
        p.n = smallest_integer(lo, 2 * lo, "n");
        p.delta = 2.0 * lam;
    }
    p.k = 1;
    check_delta(p.delta, to_string(p.regime).c_str());
    if (p.delta < 2.0 * lam * (1 - 1e-12)) {
        std::ostringstream os;
        os << to_string(p.regime) << " branch gives delta = " << p.delta << " below 2 lambda";
        throw PreconditionError(os.str());
    }
    return out;
}

RegimeChoice select_fs(const ModelParams& mp) {
    const double h = mp.h, lam = mp.lambda, m = mp.m;
    const double many = mp.finite_m() ? h * std::pow(lam, 1.5) / std::sqrt(m) : 0.0;
    const double lng = std::pow(h * lam, 12.0 / 11);
    const double few = std::pow(h, 6.0 / 5) * lam;
    RegimeChoice out;
    out.comparisons = {fmt_cmp("unbuckled", lam * lam), fmt_cmp("many_tilted", many), fmt_cmp("few_tilted_long", lng),
                       fmt_cmp("few_tilted", few)};
    PatternParams& p = out.params;
    const double best = std::max({many, lng, few});
    if (lam * lam <= best) {
        p = {1, 1, 1.0, Regime::UNBUCKLED};
        out.comparisons.push_back("unbuckled <= max(many_tilted, few_tilted_long, few_tilted)");
        return out;
    }
    if (lng >= many && lng >= few) {
        out.comparisons.push_back("few_tilted_long >= max(many_tilted, few_tilted)");
        p.regime = Regime::FS_FEW_TILTED_LONG;
        p.n = 12;
        const double z = std::pow(h, -3.0 / 11) * std::pow(lam, 5.0 / 22);
        p.k = smallest_integer(12 * z, 13 * z, "k");
        p.delta = 4.0 * std::pow(h * lam, 2.0 / 11);
    } else if (many >= few) {
        out.comparisons.push_back("many_tilted >= max(few_tilted_long, few_tilted)");
        p.regime = Regime::FS_MANY_TILTED;
        const double x = std::pow(lam, 9.0 / 8) * std::pow(h, -0.25) * std::pow(m, -11.0 / 8);
        const double y = std::pow(h, -0.25) * std::pow(lam, 1.0 / 8) * std::pow(m, 1.0 / 8);
        p.n = smallest_integer(7 * x, 8 * x, "n");
        p.k = smallest_integer(7 * y, 8 * y, "k");
        p.delta = 4.0 * lam / m;
    } else {
        out.comparisons.push_back("few_tilted >= max(many_tilted, few_tilted_long)");
        p.regime = Regime::FS_FEW_TILTED;
        p.n = 2;
        p.k = 2;
        p.delta = 4.0 * std::pow(h, 0.4);
    }
    check_delta(p.delta, to_string(p.regime).c_str());
    return out;
}

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
        case Regime::UNBUCKLED: return "UNBUCKLED";
        case Regime::MANY: return "MANY";
        case Regime::ONE: return "ONE";
        case Regime::FLAT: return "FLAT";
        case Regime::FS_MANY_TILTED: return "FS_MANY_TILTED";
        case Regime::FS_FEW_TILTED_LONG: return "FS_FEW_TILTED_LONG";
        case Regime::FS_FEW_TILTED: return "FS_FEW_TILTED";
    }
    return "?";
}

Regime regime_from_string(const std::string& s) {
    for (Regime r : {Regime::UNBUCKLED, Regime::MANY, Regime::ONE, Regime::FLAT, Regime::FS_MANY_TILTED,
                     Regime::FS_FEW_TILTED_LONG, Regime::FS_FEW_TILTED})
        if (to_string(r) == s) return r;
    throw PreconditionError("unknown regime '" + s + "'");
}

std::string to_string(Functional f) {
    switch (f) {
        case Functional::VKD: return "VKD";
        case Functional::FS: return "FS";
        case Functional::NL: return "NL";
    }
    return "?";
}

Functional functional_from_string(const std::string& s) {
    std::string u;
    for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u == "VKD") return Functional::VKD;
    if (u == "FS") return Functional::FS;
    if (u == "NL") return Functional::NL;
    throw PreconditionError("unknown model '" + s + "' (expected vkd, nl or fs)");
}

RegimeChoice select_regime(Functional model, const ModelParams& mp) {
    mp.validate();
    switch (model) {
        case Functional::VKD: return select_vkd(mp);
        case Functional::NL: return select_nl(mp);
        case Functional::FS:
            if (mp.rho != 1.0) throw PreconditionError("free-shear patterns need rho = 1");
            return select_fs(mp);
    }
    throw PreconditionError("unknown model");
}

PatternParams select_regime_params(Functional model, const ModelParams& mp) {
    return select_regime(model, mp).params;
}

}  // namespace mlab
