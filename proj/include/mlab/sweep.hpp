#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlab/energy.hpp"
#include "mlab/minimizer.hpp"

namespace mlab {

enum class SweepVar { H, LAMBDA, RHO_MINUS_1, M };
enum class SweepMode { CONSTRUCT, MINIMIZE };
// GRID evaluates the sampled pattern; REDUCED uses the closed forms (vKD
// axisymmetric and FS tilted patterns only); AUTO picks GRID while the grid
// stays under max_nodes.
enum class Route { AUTO, GRID, REDUCED };

std::string to_string(SweepVar v);
std::string to_string(SweepMode m);
std::string to_string(Route r);
SweepVar sweep_var_from_string(const std::string& s);
SweepMode sweep_mode_from_string(const std::string& s);
Route route_from_string(const std::string& s);

inline constexpr const char* kSchema = "mlab/1";

struct SweepSpec {
    Functional model = Functional::VKD;
    SweepVar varying = SweepVar::H;
    int count = 8;
    double lo = 1e-4;
    double hi = 1e-2;
    ModelParams fixed;
    SweepMode mode = SweepMode::CONSTRUCT;
    Route route = Route::AUTO;
    double samples_per_cell = kMinSamplesPerCell;
    std::size_t max_nodes = std::size_t{1} << 22;
    int min_theta = 8;
    std::uint64_t seed = 1;
    bool skip_failures = false;
    int threads = 0;  // 0: hardware concurrency
    MinimizeOptions minimize;
    int minimize_theta = 16;  // n_theta for MINIMIZE points

    // Throws PreconditionError unless 0 < lo < hi and count >= 4.
    void validate() const;
    std::vector<double> values() const;
    ModelParams params_at(int index) const;
};

struct SweepRow {
    int index = 0;
    double x = 0;  // value of the varying parameter
    ModelParams params;
    bool ok = false;
    std::string error;
    std::string regime;
    int n = 0;
    int k = 0;
    double delta = 0;
    std::string route;
    int n_theta = 0;
    int n_z = 0;
    double excess = 0;
    double slope_linf = 0;
    std::string oracle_branch;
    double oracle_value = 0;
    bool oracle_ok = false;
    bool certificates_evaluated = false;
    int certificates_failed = 0;
    bool converged = false;  // MINIMIZE only
    int iterations = 0;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;
};

// Rows come back in index order. Any failure aborts (rethrown with its
// original category) unless spec.skip_failures, in which case it is recorded.
SweepResult run_sweep(const SweepSpec& spec);

void write_csv(std::ostream& os, const SweepResult& r);

struct FitResult {
    double exponent = 0;
    double intercept = 0;
    double r_squared = 0;
    double residual_max = 0;
    int points_used = 0;
};

// Least squares of log y against log x. Needs at least four pairs, all
// positive, and at least two distinct x.
FitResult fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

// Minimal CSV table: '#' comment lines, then a header row.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<double> numeric(const std::string& column) const;
};

Table read_csv(std::istream& is);
// Fits y against x over rows whose `ok` column (when present) is 1.
FitResult fit_table(const Table& t, const std::string& x, const std::string& y);

}  // namespace mlab
