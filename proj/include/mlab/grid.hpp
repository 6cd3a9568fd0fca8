#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace mlab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform periodic grid on [0, theta_extent) x [-z_extent/2, z_extent/2).
struct Domain {
    double theta_extent = kTwoPi;
    double z_extent = 1.0;
    int n_theta = 0;
    int n_z = 0;

    static Domain omega(int n_theta, int n_z);
    static Domain box(double theta_extent, double z_extent, int n_theta, int n_z);

    std::size_t size() const { return static_cast<std::size_t>(n_theta) * n_z; }
    double dtheta() const { return theta_extent / n_theta; }
    double dz() const { return z_extent / n_z; }
    double cell_area() const { return dtheta() * dz(); }
    double area() const { return theta_extent * z_extent; }
    double theta(int i) const { return i * dtheta(); }
    double z(int j) const { return -0.5 * z_extent + j * dz(); }

    bool operator==(const Domain&) const = default;
};

struct ModelParams {
    double h = 0.0;
    double lambda = 0.0;
    double rho = 1.0;
    double m = kInf;

    bool finite_m() const { return m < kInf; }
    // Throws PreconditionError on h <= 0, lambda outside (0,1), rho < 1, m <= 0.
    // Energy evaluation also accepts lambda = 0 (the identity deformation).
    void validate(bool allow_zero_lambda = false) const;
};

class GridField {
public:
    GridField() = default;
    explicit GridField(const Domain& dom, double fill = 0.0);
    GridField(const Domain& dom, std::vector<double> values);

    template <class F>
    static GridField sample(const Domain& dom, F&& fn) {
        GridField g(dom);
        for (int i = 0; i < dom.n_theta; ++i)
            for (int j = 0; j < dom.n_z; ++j) g(i, j) = fn(dom.theta(i), dom.z(j));
        return g;
    }

    const Domain& domain() const { return dom_; }
    std::size_t size() const { return v_.size(); }
    double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * dom_.n_z + j]; }
    double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * dom_.n_z + j]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    bool all_finite() const;
    double max_abs() const;
    double min() const;
    double max() const;

    GridField& operator+=(const GridField& o);
    GridField& operator-=(const GridField& o);
    GridField& operator*=(double s);

private:
    Domain dom_;
    std::vector<double> v_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);

// Fourier coefficients of a real field (r2c layout, n_theta x (n_z/2+1)),
// normalized so that the inverse transform is a plain sum.
class Spectrum {
public:
    explicit Spectrum(const GridField& f);
    Spectrum(const Domain& dom, const double* values);

    const Domain& domain() const { return dom_; }
    GridField derivative(int order_theta, int order_z) const;
    void derivative_into(int order_theta, int order_z, double* out) const;
    const std::vector<std::complex<double>>& coefficients() const { return c_; }

private:
    Domain dom_;
    std::vector<std::complex<double>> c_;
};

// Fourier multiplier of the partial derivative d_theta^a d_z^b at r2c index (i, j).
std::complex<double> derivative_multiplier(const Domain& dom, int a, int b, int i, int j);

GridField derivative(const GridField& f, int order_theta, int order_z);

// In place: values <- F^{-1}[symbol(k_theta, k_z) F[values]] for a real
// symbol of the angular wavenumbers (Nyquist modes included).
void apply_symbol(const Domain& dom, const std::function<double(double, double)>& symbol, double* values);

// One (array, order_theta, order_z) term of an adjoint sum.
struct AdjointTerm {
    const double* values;
    int order_theta;
    int order_z;
};

// out = sum_k D_k^T r_k where D_k are spectral derivative operators.
void adjoint_derivative_sum(const Domain& dom, const std::vector<AdjointTerm>& terms, double* out);

// Spectrally consistent antiderivative in z of the zero-mean part of f,
// normalized to vanish at z = -z_extent/2; the removed slice means are
// returned in `slice_means` when non-null.
GridField z_antiderivative(const GridField& f, std::vector<double>* slice_means = nullptr);
// Same in theta, normalized to vanish at theta = 0.
GridField theta_antiderivative(const GridField& f, std::vector<double>* slice_means = nullptr);

// Integer-plus-fractional translation in theta by `shift` (spectral).
GridField theta_translate(const GridField& f, double shift);

double integrate(const GridField& f);
// Mixed norm ||f||_{L^p_z L^q_theta}; p, q in {1, 2, 4, inf}.
double mixed_norm(const GridField& f, double p_outer_z, double p_inner_theta);
double lp_norm(const GridField& f, double p);
std::vector<double> theta_average(const GridField& f);
// Sum of |c_k|^2 |Omega| over the full (two-sided) spectrum.
double parseval_sum(const GridField& f);

// Relative amplitude of Fourier content beyond 3/4 of the Nyquist band in
// either direction.
double spectral_tail(const GridField& f);

// Rejects grids with fewer than samples_per_cell nodes per wrinkle cell of
// width delta/(n k) in z (and delta/n in t when `tilted`).
void require_resolved(const Domain& dom, int n, int k, double delta, bool tilted,
                      double samples_per_cell = 32.0);

void write_gfld(std::ostream& os, const GridField& f);
void write_gfld(const std::string& path, const GridField& f);
GridField read_gfld(std::istream& is, double theta_extent = kTwoPi, double z_extent = 1.0);
GridField read_gfld(const std::string& path);

}  // namespace mlab
