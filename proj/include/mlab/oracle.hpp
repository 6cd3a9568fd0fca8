#pragma once

#include <string>
#include <vector>

#include "mlab/energy.hpp"
#include "mlab/grid.hpp"

namespace mlab {

enum class ScalingBranch { UNBUCKLED, MANY, ONE, FLAT, FS_12_11, FS_3_2 };

std::string to_string(ScalingBranch b);

// Prefactor-free prediction of the minimal excess energy (total energy for
// FS). `lower` and `upper` are the scaling-law bounds; where they match,
// hypothesis_ok is true and value = lower = upper. Otherwise value is the
// constructive upper bound and both bounds are reported.
struct ScalingPrediction {
    Functional model = Functional::VKD;
    ScalingBranch branch = ScalingBranch::UNBUCKLED;
    double value = 0;
    double lower = 0;
    double upper = 0;
    bool hypothesis_ok = true;
    std::vector<std::string> active_inequalities;
};

// min{lambda^{1/2} h^{1/4}, m^{1/2} h^{1/2}}; the second term is dropped for m = inf.
double c0(double lambda, double h, double m);

// Total function: never throws on a violated hypothesis, only on invalid params.
ScalingPrediction predict(Functional model, const ModelParams& mp);

enum class BlowupModel { VKD_LARGE, FS };

struct BlowupPrediction {
    double rate = 0;
    // h small against the regime threshold (h <= threshold / 10).
    bool hypothesis_ok = true;
    double threshold = 0;
};

// Predicted lower rate for the slope sup-norm of minimizers at m = inf.
BlowupPrediction blowup(BlowupModel model, const ModelParams& mp);
double blowup_rate(BlowupModel model, const ModelParams& mp);

struct Equivalence {
    std::string name;
    std::string lhs, rhs;
    bool lhs_holds = false;
    bool rhs_holds = false;
    bool agree = false;
};

struct BoundaryReport {
    std::vector<Equivalence> equivalences;
    bool all_agree = true;
};

// Evaluates both sides of the algebraic regime equivalences used to place
// parameters in a branch. Comparisons within 1e-10 (relative) of equality
// count as holding on both sides.
BoundaryReport regime_boundary(Functional model, const ModelParams& mp);

}  // namespace mlab
