#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlab/energy.hpp"
#include "mlab/patterns.hpp"

namespace mlab {

enum class ObstacleMode { PROJECTION, PENALTY };
enum class InitKind { UNBUCKLED_PLUS_NOISE, PATTERN_SEED, FILE };

std::string to_string(ObstacleMode m);
std::string to_string(InitKind k);
ObstacleMode obstacle_mode_from_string(const std::string& s);
InitKind init_kind_from_string(const std::string& s);

struct MinimizeOptions {
    int max_iterations = 5000;  // per penalty loop
    double gradient_tolerance = 1e-8;
    // Also converged once the projected gradient drops by this factor from
    // its value at the start of the loop (the absolute floor is set by
    // roundoff in the h^2 |k|^4 bending term on fine grids).
    double relative_gradient_tolerance = 1e-9;
    ObstacleMode obstacle_mode = ObstacleMode::PROJECTION;
    double slope_penalty_weight = 1e2;     // initial weight, finite m only
    double zsign_penalty_weight = 1e2;     // initial weight, NL only
    double obstacle_penalty_weight = 1e4;  // initial weight, PENALTY mode only
    int penalty_loops = 4;
    double penalty_growth = 10.0;
    InitKind initial = InitKind::UNBUCKLED_PLUS_NOISE;
    double noise_amplitude = 1e-2;
    std::uint64_t seed = 1;
    int lbfgs_memory = 12;
    // Initial inverse Hessian of L-BFGS: the Fourier diagonal 1/(1 + |k|^2 + h^2|k|^4)
    // (no bending part on in-surface components of the shallow models).
    bool precondition = true;
    int history_stride = 10;  // slope sup-norm is recorded every stride iterations
    double min_samples_per_cell = 8.0;
    // Iteration stops when the relative decrease stays below this for 50 steps.
    double stagnation_tolerance = 1e-15;
    std::optional<Configuration> start;    // FILE (or any explicit start)
    std::optional<PatternParams> pattern;  // PATTERN_SEED override of the selected regime

    // Throws PreconditionError on non-positive tolerances or negative weights.
    void validate() const;
};

struct IterateRecord {
    int iteration = 0;
    double objective = 0;  // energy plus penalties
    double energy = 0;
    double projected_gradient = 0;
    double slope_linf = -1;  // -1 when not recorded
};

struct MinimizeResult {
    Configuration final;
    EnergyReport report;
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
    double constraint_violation = 0;
    double slope_linf = 0;
    double initial_energy = 0;
    double final_energy = 0;
    double axisymmetry_deviation = 0;  // L2 norm of the theta-fluctuation of the radial component
    double spectral_tail = 0;
    std::vector<IterateRecord> history;
};

struct PenaltyWeights {
    double slope = 0;
    double zsign = 0;
    double obstacle = 0;
};

// Discrete energy plus smooth penalties: slope ((|d_i c_j| - m)_+)^2,
// NL axial sign ((-d_z Phi_z)_+)^2 and obstacle ((floor - c_rho)_+)^2, each
// integrated over the grid. Gradient with respect to the stored components.
double penalized_energy(Functional f, const Configuration& c, const PenaltyWeights& w, ComponentGradient* grad);

// Initial configuration for `opts` (noise, pattern seed or explicit start).
Configuration initial_configuration(Functional f, const ModelParams& mp, const Domain& dom,
                                    const MinimizeOptions& opts);

MinimizeResult minimize(Functional f, const ModelParams& mp, const Domain& dom, const MinimizeOptions& opts = {});

// Max relative error between the analytic gradient of the discrete energy
// and central differences along `directions` seeded band-limited directions.
double gradient_check(Functional f, const ModelParams& mp, const Configuration& c, int directions,
                      std::uint64_t seed, double step = 1e-5);

// Band-limited random field: Fourier modes up to (max_theta, max_z) with
// standard normal coefficients, scaled to unit sup-norm.
GridField band_limited_noise(const Domain& dom, int max_theta, int max_z, std::uint64_t seed, int stream);

double axisymmetry_deviation(const GridField& f);

}  // namespace mlab
