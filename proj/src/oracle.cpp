#include "mlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlab/error.hpp"

namespace mlab {

namespace {

constexpr double kEqualityBand = 1e-10;

std::string show(const char* name, double v) {
    std::ostringstream os;
    os.precision(6);
    os << name << " = " << v;
    return os.str();
}

// a <= b, treating values within the band as equal.
bool leq(double a, double b) {
    if (a <= b) return true;
    return b > 0 && std::abs(std::log(a / b)) < kEqualityBand;
}

struct LargeBranches {
    double one = 0, many = 0;
};

// Branch values of the large-mandrel law for a pre-strain measure s
// (rho - 1 for vKD, (rho^2 - 1) v h^2 for NL). The MANY value carries the
// m^{-1/3} factor only for the regime comparison; the prediction itself is
// prefactor-free.
LargeBranches large_branches(double s, double h, double lam, bool finite_m) {
    LargeBranches b;
    if (s <= 0) return b;
    b.one = std::pow(s, 4.0 / 7) * std::pow(h, 6.0 / 7) * std::pow(lam, 5.0 / 7);
    if (finite_m) b.many = std::pow(s, 2.0 / 3) * std::pow(h, 2.0 / 3) * lam;
    return b;
}

double neutral_lower(double h, double lam, bool finite_m) {
    const double a = finite_m ? h * std::pow(lam, 1.5) : 0.0;
    const double b = std::pow(h * lam, 12.0 / 11);
    return std::min(std::max(a, b), lam * lam);
}

// Shared logic for the large-mandrel laws of vKD and NL.
ScalingPrediction predict_large(Functional model, const ModelParams& mp, double s, double c0v, bool guaranteed,
                                const char* sname) {
    const double h = mp.h, lam = mp.lambda;
    ScalingPrediction p;
    p.model = model;
    auto& act = p.active_inequalities;
    const LargeBranches b = large_branches(s, h, lam, mp.finite_m());
    if (leq(c0v, s)) {
        act.push_back(show(sname, s) + " >= " + show("c0", c0v));
        const double best = std::max(b.one, b.many);
        if (lam * lam <= best) {
            p.branch = ScalingBranch::UNBUCKLED;
            p.value = lam * lam;
            act.push_back(show("lambda^2", lam * lam) + " <= " + show("max(one, many)", best));
        } else if (b.one >= b.many) {
            p.branch = ScalingBranch::ONE;
            p.value = b.one;
            act.push_back(show("one", b.one) + " >= " + show("many", b.many));
            act.push_back(show("one", b.one) + " < " + show("lambda^2", lam * lam));
        } else {
            p.branch = ScalingBranch::MANY;
            p.value = b.many;
            act.push_back(show("many", b.many) + " > " + show("one", b.one));
            act.push_back(show("many", b.many) + " < " + show("lambda^2", lam * lam));
        }
        p.lower = p.upper = p.value;
        p.hypothesis_ok = guaranteed;
        if (!guaranteed) act.push_back("m = inf: nonlinear law not guaranteed");
        return p;
    }
    act.push_back(show(sname, s) + " < " + show("c0", c0v));
    p.upper = std::min(lam * h, lam * lam);
    if (s > 0) {
        p.lower = std::min(std::max(b.one, b.many), lam * lam);
    } else {
        p.lower = neutral_lower(h, lam, mp.finite_m());
        act.push_back(show("neutral lower bound", p.lower));
    }
    p.value = p.upper;
    if (lam * lam <= lam * h) {
        p.branch = ScalingBranch::UNBUCKLED;
        act.push_back(show("lambda^2", lam * lam) + " <= " + show("flat", lam * h));
    } else {
        p.branch = ScalingBranch::FLAT;
        act.push_back(show("flat", lam * h) + " < " + show("lambda^2", lam * lam));
    }
    p.hypothesis_ok = guaranteed && p.lower == p.upper;
    return p;
}

ScalingPrediction predict_fs(const ModelParams& mp) {
    const double h = mp.h, lam = mp.lambda;
    ScalingPrediction p;
    p.model = Functional::FS;
    auto& act = p.active_inequalities;
    const double a = mp.finite_m() ? h * std::pow(lam, 1.5) : 0.0;
    const double b = std::pow(h * lam, 12.0 / 11);
    const double best = std::max(a, b);
    if (lam * lam <= best) {
        p.branch = ScalingBranch::UNBUCKLED;
        p.value = lam * lam;
        act.push_back(show("lambda^2", lam * lam) + " <= " + show("max(h lambda^(3/2), (h lambda)^(12/11))", best));
    } else if (a > b) {
        p.branch = ScalingBranch::FS_3_2;
        p.value = a;
        act.push_back(show("h lambda^(3/2)", a) + " > " + show("(h lambda)^(12/11)", b));
    } else {
        p.branch = ScalingBranch::FS_12_11;
        p.value = b;
        act.push_back(show("(h lambda)^(12/11)", b) + " >= " + show("h lambda^(3/2)", a));
    }
    if (!mp.finite_m()) act.push_back("m = inf: h lambda^(3/2) term dropped");
    p.lower = p.upper = p.value;
    return p;
}

Equivalence make_equivalence(std::string name, std::string lhs, bool l, std::string rhs, bool r) {
    Equivalence e{std::move(name), std::move(lhs), std::move(rhs), l, r, l == r};
    return e;
}

}  // namespace

std::string to_string(ScalingBranch b) {
    switch (b) {
        case ScalingBranch::UNBUCKLED: return "UNBUCKLED";
        case ScalingBranch::MANY: return "MANY";
        case ScalingBranch::ONE: return "ONE";
        case ScalingBranch::FLAT: return "FLAT";
        case ScalingBranch::FS_12_11: return "FS_12_11";
        case ScalingBranch::FS_3_2: return "FS_3_2";
    }
    return "?";
}

double c0(double lambda, double h, double m) {
    const double a = std::sqrt(lambda) * std::pow(h, 0.25);
    if (!(m < kInf)) return a;
    return std::min(a, std::sqrt(m * h));
}

ScalingPrediction predict(Functional model, const ModelParams& mp) {
    mp.validate();
    switch (model) {
        case Functional::VKD:
            return predict_large(model, mp, mp.rho - 1.0, c0(mp.lambda, mp.h, mp.m), true, "rho - 1");
        case Functional::NL: {
            const double s = std::max(mp.rho * mp.rho - 1.0, mp.h * mp.h);
            return predict_large(model, mp, s, c0(mp.lambda, mp.h, 1.0), mp.finite_m(), "(rho^2 - 1) v h^2");
        }
        case Functional::FS: return predict_fs(mp);
    }
    throw PreconditionError("unknown model");
}

BlowupPrediction blowup(BlowupModel model, const ModelParams& mp) {
    mp.validate();
    BlowupPrediction b;
    const double h = mp.h, lam = mp.lambda;
    if (model == BlowupModel::VKD_LARGE) {
        const double R = mp.rho - 1.0;
        if (!(R > 0)) throw PreconditionError("large-mandrel blow-up rate needs rho > 1");
        b.rate = std::pow(R, 1.0 / 7) * std::pow(h, -2.0 / 7) * std::pow(lam, 3.0 / 7);
        b.threshold = std::pow(R, -2.0 / 3) * std::pow(lam, 1.5);
    } else {
        b.rate = std::pow(h, -1.0 / 11) * std::pow(lam, 9.0 / 22);
        b.threshold = std::pow(lam, 5.0 / 6);
    }
    b.hypothesis_ok = h <= 0.1 * b.threshold;
    return b;
}

double blowup_rate(BlowupModel model, const ModelParams& mp) { return blowup(model, mp).rate; }

BoundaryReport regime_boundary(Functional model, const ModelParams& mp) {
    mp.validate();
    const double h = mp.h, lam = mp.lambda;
    BoundaryReport rep;
    if (model == Functional::VKD) {
        const double R = mp.rho - 1.0;
        const double one = R > 0 ? std::pow(R, 4.0 / 7) * std::pow(h, 6.0 / 7) * std::pow(lam, 5.0 / 7) : 0.0;
        const double many = (R > 0 && mp.finite_m())
                                ? std::pow(mp.m, -1.0 / 3) * std::pow(R, 2.0 / 3) * std::pow(h, 2.0 / 3) * lam
                                : 0.0;
        rep.equivalences.push_back(make_equivalence("large mandrel threshold",
                                                    "lambda h <= max(one, m^(-1/3) many)",
                                                    leq(lam * h, std::max(one, many)), "c0(lambda,h,m) <= rho - 1",
                                                    leq(c0(lam, h, mp.m), R)));
    } else if (model == Functional::NL) {
        const double s = std::max(mp.rho * mp.rho - 1.0, h * h);
        const double one = std::pow(s, 4.0 / 7) * std::pow(h, 6.0 / 7) * std::pow(lam, 5.0 / 7);
        const double many = std::pow(s, 2.0 / 3) * std::pow(h, 2.0 / 3) * lam;
        rep.equivalences.push_back(make_equivalence("nonlinear threshold", "lambda h <= max(one, many)",
                                                    leq(lam * h, std::max(one, many)),
                                                    "c0(lambda,h,1) <= (rho^2-1) v h^2", leq(c0(lam, h, 1.0), s)));
    }
    {
        const double a = mp.finite_m() ? h * std::pow(lam, 1.5) : 0.0;
        const double b = std::pow(h * lam, 12.0 / 11);
        rep.equivalences.push_back(make_equivalence("unbuckled regime", "h >= lambda^(5/6)",
                                                    leq(std::pow(lam, 5.0 / 6), h),
                                                    "max(h lambda^(3/2), (h lambda)^(12/11)) >= lambda^2",
                                                    leq(lam * lam, std::max(a, b))));
    }
    for (const auto& e : rep.equivalences) rep.all_agree = rep.all_agree && e.agree;
    return rep;
}

}  // namespace mlab
