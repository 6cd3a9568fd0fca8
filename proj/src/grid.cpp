#include "mlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/exec.hpp"

namespace mlab {

namespace {

std::atomic<Execution> g_exec{Execution::Parallel};

using cplx = std::complex<double>;

struct Plans {
    fftw_plan forward;
    fftw_plan backward;
};

// FFTW planning is not thread-safe; execution through the new-array
// interface is. FFTW_ESTIMATE keeps the chosen algorithm (and therefore the
// rounding) independent of timing.
const Plans& plans_for(int n0, int n1) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, Plans> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n0, n1);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const std::size_t nr = static_cast<std::size_t>(n0) * n1;
    const std::size_t nc = static_cast<std::size_t>(n0) * (n1 / 2 + 1);
    double* r = fftw_alloc_real(nr);
    fftw_complex* c = fftw_alloc_complex(nc);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p;
    p.forward = fftw_plan_dft_r2c_2d(n0, n1, r, c, flags);
    p.backward = fftw_plan_dft_c2r_2d(n0, n1, c, r, flags);
    fftw_free(r);
    fftw_free(c);
    if (!p.forward || !p.backward) throw NumericalError("FFTW planning failed");
    return cache.emplace(key, p).first->second;
}

std::size_t spectrum_size(const Domain& d) {
    return static_cast<std::size_t>(d.n_theta) * (d.n_z / 2 + 1);
}

void forward(const Domain& d, const double* in, cplx* out) {
    const Plans& p = plans_for(d.n_theta, d.n_z);
    fftw_execute_dft_r2c(p.forward, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
    const double s = 1.0 / static_cast<double>(d.size());
    const std::size_t nc = spectrum_size(d);
    for (std::size_t k = 0; k < nc; ++k) out[k] *= s;
}

// Destroys `in`.
void backward(const Domain& d, cplx* in, double* out) {
    const Plans& p = plans_for(d.n_theta, d.n_z);
    fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(in), out);
}

int signed_index(int i, int n) { return i <= n / 2 ? i : i - n; }

void check_domain(const Domain& d) {
    if (d.n_theta < 8 || d.n_z < 8 || d.n_theta % 2 || d.n_z % 2)
        throw PreconditionError("grid sizes must be even and at least 8");
    if (!(d.theta_extent > 0) || !(d.z_extent > 0))
        throw PreconditionError("domain extents must be positive");
}

void check_orders(int a, int b) {
    if (a < 0 || b < 0 || a > 2 || b > 2 || a + b < 1 || a + b > 2)
        throw PreconditionError("derivative orders must satisfy a + b in {1, 2}");
}

template <class Fn>
void for_rows(int rows, Fn&& fn) {
    if (execution() == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < rows; ++i) fn(i);
    } else {
        for (int i = 0; i < rows; ++i) fn(i);
    }
}

}  // namespace

void set_execution(Execution e) { g_exec.store(e); }
Execution execution() { return g_exec.load(); }

Domain Domain::omega(int n_theta, int n_z) { return box(kTwoPi, 1.0, n_theta, n_z); }

Domain Domain::box(double theta_extent, double z_extent, int n_theta, int n_z) {
    Domain d{theta_extent, z_extent, n_theta, n_z};
    check_domain(d);
    return d;
}

void ModelParams::validate(bool allow_zero_lambda) const {
    if (!(h > 0) || !std::isfinite(h)) throw PreconditionError("h must be positive");
    const bool lambda_ok = allow_zero_lambda ? (lambda >= 0 && lambda < 1) : (lambda > 0 && lambda < 1);
    if (!lambda_ok) throw PreconditionError("lambda must lie in (0,1)");
    if (!(rho >= 1) || !std::isfinite(rho)) throw PreconditionError("rho must be >= 1");
    if (!(m > 0)) throw PreconditionError("m must be positive (inf allowed)");
}

GridField::GridField(const Domain& dom, double fill) : dom_(dom), v_(dom.size(), fill) {
    check_domain(dom);
}

GridField::GridField(const Domain& dom, std::vector<double> values) : dom_(dom), v_(std::move(values)) {
    check_domain(dom);
    if (v_.size() != dom.size()) throw PreconditionError("value count does not match the grid");
}

bool GridField::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

double GridField::max_abs() const {
    double m = 0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

double GridField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double GridField::max() const { return *std::max_element(v_.begin(), v_.end()); }

GridField& GridField::operator+=(const GridField& o) {
    if (!(o.dom_ == dom_)) throw PreconditionError("domain mismatch");
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
}

GridField& GridField::operator-=(const GridField& o) {
    if (!(o.dom_ == dom_)) throw PreconditionError("domain mismatch");
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
}

GridField& GridField::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

std::complex<double> derivative_multiplier(const Domain& d, int a, int b, int i, int j) {
    const int kt = signed_index(i, d.n_theta);
    const int kz = j;
    const bool nyq_t = (i == d.n_theta / 2);
    const bool nyq_z = (j == d.n_z / 2);
    if ((a % 2 == 1 && nyq_t) || (b % 2 == 1 && nyq_z)) return {0.0, 0.0};
    const cplx it(0.0, kTwoPi / d.theta_extent * kt);
    const cplx iz(0.0, kTwoPi / d.z_extent * kz);
    cplx m(1.0, 0.0);
    for (int p = 0; p < a; ++p) m *= it;
    for (int p = 0; p < b; ++p) m *= iz;
    return m;
}

Spectrum::Spectrum(const GridField& f) : Spectrum(f.domain(), f.data()) {}

Spectrum::Spectrum(const Domain& dom, const double* values) : dom_(dom), c_(spectrum_size(dom)) {
    forward(dom_, values, c_.data());
}

void Spectrum::derivative_into(int a, int b, double* out) const {
    check_orders(a, b);
    const int nc1 = dom_.n_z / 2 + 1;
    std::vector<cplx> tmp(c_.size());
    for_rows(dom_.n_theta, [&](int i) {
        for (int j = 0; j < nc1; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * nc1 + j;
            tmp[k] = c_[k] * derivative_multiplier(dom_, a, b, i, j);
        }
    });
    backward(dom_, tmp.data(), out);
}

GridField Spectrum::derivative(int a, int b) const {
    GridField g(dom_);
    derivative_into(a, b, g.data());
    return g;
}

void apply_symbol(const Domain& d, const std::function<double(double, double)>& symbol, double* values) {
    check_domain(d);
    const int nzc = d.n_z / 2 + 1;
    std::vector<cplx> c(spectrum_size(d));
    forward(d, values, c.data());
    std::vector<double> sz(nzc);
    for (int j = 0; j < nzc; ++j) sz[j] = kTwoPi / d.z_extent * j;
    for (int i = 0; i < d.n_theta; ++i) {
        const double kt = kTwoPi / d.theta_extent * signed_index(i, d.n_theta);
        for (int j = 0; j < nzc; ++j) c[static_cast<std::size_t>(i) * nzc + j] *= symbol(kt, sz[j]);
    }
    backward(d, c.data(), values);
}

GridField derivative(const GridField& f, int order_theta, int order_z) {
    check_orders(order_theta, order_z);
    if (!f.all_finite()) throw PreconditionError("derivative of a non-finite field");
    return Spectrum(f).derivative(order_theta, order_z);
}

void adjoint_derivative_sum(const Domain& d, const std::vector<AdjointTerm>& terms, double* out) {
    const int nc1 = d.n_z / 2 + 1;
    std::vector<cplx> acc(spectrum_size(d), cplx(0, 0));
    std::vector<cplx> tmp(acc.size());
    for (const AdjointTerm& t : terms) {
        check_orders(t.order_theta, t.order_z);
        forward(d, t.values, tmp.data());
        for_rows(d.n_theta, [&](int i) {
            for (int j = 0; j < nc1; ++j) {
                const std::size_t k = static_cast<std::size_t>(i) * nc1 + j;
                acc[k] += std::conj(derivative_multiplier(d, t.order_theta, t.order_z, i, j)) * tmp[k];
            }
        });
    }
    backward(d, acc.data(), out);
}

namespace {

// Antiderivative along one axis of the zero-mean (per slice) part.
GridField antiderivative(const GridField& f, bool along_z, std::vector<double>* means) {
    const Domain& d = f.domain();
    const int nc1 = d.n_z / 2 + 1;
    std::vector<cplx> c(spectrum_size(d));
    forward(d, f.data(), c.data());
    const double L = along_z ? d.z_extent : d.theta_extent;
    const int n_along = along_z ? d.n_z : d.n_theta;
    for (int i = 0; i < d.n_theta; ++i) {
        for (int j = 0; j < nc1; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * nc1 + j;
            const int idx = along_z ? j : i;
            const int ks = along_z ? j : signed_index(i, d.n_theta);
            if (ks == 0 || idx == n_along / 2) {
                c[k] = 0;  // mean (removed) and Nyquist (odd operator)
                continue;
            }
            c[k] /= cplx(0.0, kTwoPi / L * ks);
        }
    }
    GridField g(d);
    backward(d, c.data(), g.data());
    // Slice means of f and normalization at the first node.
    if (along_z) {
        if (means) means->assign(d.n_theta, 0.0);
        for (int i = 0; i < d.n_theta; ++i) {
            double s = 0;
            for (int j = 0; j < d.n_z; ++j) s += f(i, j);
            if (means) (*means)[i] = s / d.n_z;
            const double g0 = g(i, 0);
            for (int j = 0; j < d.n_z; ++j) g(i, j) -= g0;
        }
    } else {
        if (means) means->assign(d.n_z, 0.0);
        for (int j = 0; j < d.n_z; ++j) {
            double s = 0;
            for (int i = 0; i < d.n_theta; ++i) s += f(i, j);
            if (means) (*means)[j] = s / d.n_theta;
            const double g0 = g(0, j);
            for (int i = 0; i < d.n_theta; ++i) g(i, j) -= g0;
        }
    }
    return g;
}

}  // namespace

GridField z_antiderivative(const GridField& f, std::vector<double>* slice_means) {
    return antiderivative(f, true, slice_means);
}

GridField theta_antiderivative(const GridField& f, std::vector<double>* slice_means) {
    return antiderivative(f, false, slice_means);
}

GridField theta_translate(const GridField& f, double shift) {
    const Domain& d = f.domain();
    const int nc1 = d.n_z / 2 + 1;
    std::vector<cplx> c(spectrum_size(d));
    forward(d, f.data(), c.data());
    for (int i = 0; i < d.n_theta; ++i) {
        const int kt = signed_index(i, d.n_theta);
        const double phase = -kTwoPi / d.theta_extent * kt * shift;
        cplx m = std::polar(1.0, phase);
        if (i == d.n_theta / 2) m = cplx(std::cos(phase), 0.0);
        for (int j = 0; j < nc1; ++j) c[static_cast<std::size_t>(i) * nc1 + j] *= m;
    }
    GridField g(d);
    backward(d, c.data(), g.data());
    return g;
}

double integrate(const GridField& f) {
    const Domain& d = f.domain();
    std::vector<double> rows(d.n_theta);
    for_rows(d.n_theta, [&](int i) {
        double s = 0;
        for (int j = 0; j < d.n_z; ++j) s += f(i, j);
        rows[i] = s;
    });
    double s = 0;
    for (double r : rows) s += r;
    return s * d.cell_area();
}

namespace {

bool supported_exponent(double p) { return p == 1 || p == 2 || p == 4 || p == kInf; }

double pow_p(double x, double p) {
    if (p == 1) return x;
    if (p == 2) return x * x;
    const double x2 = x * x;
    return x2 * x2;
}

double root_p(double s, double p) {
    if (p == 1) return s;
    if (p == 2) return std::sqrt(s);
    return std::sqrt(std::sqrt(s));
}

}  // namespace

double mixed_norm(const GridField& f, double p, double q) {
    if (!supported_exponent(p) || !supported_exponent(q))
        throw PreconditionError("mixed_norm exponents must be 1, 2, 4 or inf");
    const Domain& d = f.domain();
    std::vector<double> inner(d.n_z);
    for (int j = 0; j < d.n_z; ++j) {
        double s = 0;
        for (int i = 0; i < d.n_theta; ++i) {
            const double a = std::abs(f(i, j));
            s = (q == kInf) ? std::max(s, a) : s + pow_p(a, q);
        }
        inner[j] = (q == kInf) ? s : root_p(s * d.dtheta(), q);
    }
    double s = 0;
    for (double a : inner) s = (p == kInf) ? std::max(s, a) : s + pow_p(a, p);
    return (p == kInf) ? s : root_p(s * d.dz(), p);
}

double lp_norm(const GridField& f, double p) { return mixed_norm(f, p, p); }

std::vector<double> theta_average(const GridField& f) {
    const Domain& d = f.domain();
    std::vector<double> out(d.n_z, 0.0);
    for (int i = 0; i < d.n_theta; ++i)
        for (int j = 0; j < d.n_z; ++j) out[j] += f(i, j);
    for (double& x : out) x /= d.n_theta;
    return out;
}

double parseval_sum(const GridField& f) {
    const Domain& d = f.domain();
    Spectrum s(f);
    const auto& c = s.coefficients();
    const int nc1 = d.n_z / 2 + 1;
    double sum = 0;
    for (int i = 0; i < d.n_theta; ++i) {
        for (int j = 0; j < nc1; ++j) {
            const double w = (j == 0 || j == d.n_z / 2) ? 1.0 : 2.0;
            sum += w * std::norm(c[static_cast<std::size_t>(i) * nc1 + j]);
        }
    }
    return sum * d.area();
}

double spectral_tail(const GridField& f) {
    const Domain& d = f.domain();
    Spectrum s(f);
    const auto& c = s.coefficients();
    const int nc1 = d.n_z / 2 + 1;
    double total = 0, tail = 0;
    for (int i = 0; i < d.n_theta; ++i) {
        const int kt = std::abs(signed_index(i, d.n_theta));
        for (int j = 0; j < nc1; ++j) {
            const double w = (j == 0 || j == d.n_z / 2) ? 1.0 : 2.0;
            const double e = w * std::norm(c[static_cast<std::size_t>(i) * nc1 + j]);
            if (kt == 0 && j == 0) continue;
            total += e;
            if (4 * kt > 3 * (d.n_theta / 2) || 4 * j > 3 * (d.n_z / 2)) tail += e;
        }
    }
    return total > 0 ? std::sqrt(tail / total) : 0.0;
}

void require_resolved(const Domain& dom, int n, int k, double delta, bool tilted,
                      double samples_per_cell) {
    if (!(delta > 0 && delta <= 1)) throw PreconditionError("delta must lie in (0,1]");
    if (n < 1 || k < 1) throw PreconditionError("n and k must be positive");
    const double need_z = samples_per_cell * static_cast<double>(n) * k / delta;
    if (dom.n_z < need_z) {
        std::ostringstream os;
        os << "grid under-resolves the pattern: n_z = " << dom.n_z << " < " << need_z;
        throw ResolutionError(os.str());
    }
    if (tilted) {
        const double need_t = samples_per_cell * static_cast<double>(n) / delta;
        if (dom.n_theta < need_t) {
            std::ostringstream os;
            os << "grid under-resolves the pattern: n_theta = " << dom.n_theta << " < " << need_t;
            throw ResolutionError(os.str());
        }
    }
}

void write_gfld(std::ostream& os, const GridField& f) {
    const Domain& d = f.domain();
    os << "GFLD 1 " << d.n_theta << ' ' << d.n_z << '\n';
    char buf[40];
    for (int i = 0; i < d.n_theta; ++i) {
        for (int j = 0; j < d.n_z; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", f(i, j));
            os << buf << (j + 1 == d.n_z ? '\n' : ' ');
        }
    }
}

void write_gfld(const std::string& path, const GridField& f) {
    std::ofstream os(path);
    if (!os) throw PreconditionError("cannot open " + path + " for writing");
    write_gfld(os, f);
}

GridField read_gfld(std::istream& is, double theta_extent, double z_extent) {
    std::string magic;
    int version = 0, nt = 0, nz = 0;
    if (!(is >> magic >> version >> nt >> nz) || magic != "GFLD" || version != 1)
        throw PreconditionError("not a GFLD/1 stream");
    Domain d = Domain::box(theta_extent, z_extent, nt, nz);
    std::vector<double> v(d.size());
    std::string tok;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!(is >> tok)) throw PreconditionError("GFLD/1 stream ended early");
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v[k]);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw PreconditionError("bad GFLD/1 value: " + tok);
    }
    return GridField(d, std::move(v));
}

GridField read_gfld(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw PreconditionError("cannot open " + path);
    return read_gfld(is);
}

}  // namespace mlab
