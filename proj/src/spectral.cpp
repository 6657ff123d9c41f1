#include "gnwaves/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

#include "gnwaves/errors.hpp"

namespace gnwaves {

namespace {

// The FFTW planner is not reentrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

int padded_size(int n) { return 3 * n / 2 + (3 * n / 2) % 2; }

}  // namespace

struct Grid::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    fftw_plan pad_r2c = nullptr;
    fftw_plan pad_c2r = nullptr;
    int padded = 0;

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        for (fftw_plan p : {r2c, c2r, pad_r2c, pad_c2r})
            if (p) fftw_destroy_plan(p);
    }
};

Grid::Grid(int n_points, double length, bool dealias)
    : n_(n_points), length_(length), dealias_(dealias), plans_(std::make_unique<Plans>()) {
    if (n_points < 16 || n_points % 2 != 0)
        throw DomainError(fmt::format("grid size {} must be even and >= 16", n_points));
    if (!(length > 0.0) || !std::isfinite(length))
        throw DomainError(fmt::format("grid length {} must be positive", length));

    k_.resize(modes());
    for (int m = 0; m < modes(); ++m) k_[m] = 2.0 * std::numbers::pi * m / length_;

    auto make_pair = [](int n, fftw_plan& fwd, fftw_plan& bwd) {
        std::vector<double> r(n);
        std::vector<Complex> c(n / 2 + 1);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd = fftw_plan_dft_r2c_1d(n, r.data(), as_fftw(c.data()), flags);
        bwd = fftw_plan_dft_c2r_1d(n, as_fftw(c.data()), r.data(), flags);
    };

    std::lock_guard lock(planner_mutex());
    make_pair(n_, plans_->r2c, plans_->c2r);
    if (dealias_) {
        plans_->padded = padded_size(n_);
        make_pair(plans_->padded, plans_->pad_r2c, plans_->pad_c2r);
    }
}

Grid::~Grid() = default;

GridPtr Grid::make(int n_points, double length, bool dealias) {
    return std::make_shared<const Grid>(n_points, length, dealias);
}

GridPtr Grid::with_spacing(double dx, double min_length, bool dealias) {
    if (!(dx > 0.0)) throw DomainError("grid spacing must be positive");
    int n = 16;
    while (n * dx < min_length) n *= 2;
    return make(n, n * dx, dealias);
}

void Grid::forward(std::span<const double> in, std::span<Complex> out) const {
    fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()), as_fftw(out.data()));
}

void Grid::inverse(std::span<const Complex> in, std::span<double> out) const {
    // c2r overwrites its input.
    std::vector<Complex> scratch(in.begin(), in.end());
    fftw_execute_dft_c2r(plans_->c2r, as_fftw(scratch.data()), out.data());
    const double scale = 1.0 / n_;
    for (double& v : out) v *= scale;
}

void Grid::padded_product(std::span<const double> a, std::span<const double> b,
                          std::span<double> out) const {
    const int np = plans_->padded;
    const int mp = np / 2 + 1;
    const int m = modes();

    auto lift = [&](std::span<const double> f) {
        std::vector<Complex> hat(m);
        forward(f, hat);
        std::vector<Complex> padded_hat(mp, Complex{});
        // Nyquist of the coarse grid is not a real mode of the fine one.
        for (int i = 0; i < m - 1; ++i) padded_hat[i] = hat[i];
        std::vector<Complex> scratch = padded_hat;
        std::vector<double> fine(np);
        fftw_execute_dft_c2r(plans_->pad_c2r, as_fftw(scratch.data()), fine.data());
        for (double& v : fine) v /= n_;
        return fine;
    };

    std::vector<double> fa = lift(a);
    std::vector<double> fb = lift(b);
    for (int j = 0; j < np; ++j) fa[j] *= fb[j];

    std::vector<Complex> prod(mp);
    fftw_execute_dft_r2c(plans_->pad_r2c, fa.data(), as_fftw(prod.data()));
    std::vector<Complex> coarse(m, Complex{});
    const double scale = static_cast<double>(n_) / np;
    for (int i = 0; i < m - 1; ++i) coarse[i] = prod[i] * scale;
    inverse(coarse, out);
}

// ---------------------------------------------------------------------------
// Field

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw GridMismatchError("field without grid");
    if (static_cast<int>(values_.size()) != grid_->size())
        throw GridMismatchError(
            fmt::format("field has {} samples, grid has {}", values_.size(), grid_->size()));
}

Field::Field(GridPtr grid, double value) : grid_(std::move(grid)) {
    if (!grid_) throw GridMismatchError("field without grid");
    values_.assign(grid_->size(), value);
}

Field Field::from_function(GridPtr grid, const std::function<double(double)>& f) {
    Field out(grid);
    for (int j = 0; j < out.size(); ++j) out.values_[j] = f(grid->x(j));
    return out;
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values_) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(v));
    }
    return m;
}

Field& Field::operator+=(const Field& o) {
    require_same_grid(*this, o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    require_same_grid(*this, o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
    return *this;
}

Field& Field::operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

Field Field::map(const std::function<double(double)>& f) const {
    Field out = *this;
    for (double& v : out.values_) v = f(v);
    return out;
}

void require_same_grid(const Field& a, const Field& b) {
    if (a.empty() || b.empty() || !a.grid().same_as(b.grid()))
        throw GridMismatchError("fields live on different grids");
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator-(Field a) { return a *= -1.0; }
Field operator*(double s, Field a) { return a *= s; }
Field operator*(Field a, double s) { return a *= s; }

Field operator*(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out(a.grid_ptr());
    if (a.grid().dealias()) {
        a.grid().padded_product(a.values(), b.values(), out.values());
    } else {
        for (int j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
    }
    return out;
}

Field operator/(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out(a.grid_ptr());
    for (int j = 0; j < a.size(); ++j) out[j] = a[j] / b[j];
    return out;
}

Field operator+(Field a, double s) {
    for (double& v : a.values()) v += s;
    return a;
}

Field operator+(double s, Field a) { return std::move(a) + s; }

// ---------------------------------------------------------------------------
// Spectral operators

namespace {

void require_finite(const Field& f, const char* op) {
    if (f.empty()) throw GridMismatchError(fmt::format("{}: empty field", op));
    if (!f.all_finite()) throw NonFiniteError(fmt::format("{}: non-finite input", op));
}

std::vector<Complex> spectrum(const Field& f) {
    std::vector<Complex> hat(f.grid().modes());
    f.grid().forward(f.values(), hat);
    return hat;
}

Field synthesize(const GridPtr& grid, const std::vector<Complex>& hat) {
    Field out(grid);
    grid->inverse(hat, out.values());
    return out;
}

// Weight of mode m in a full-spectrum sum over the stored half spectrum.
double multiplicity(int m, int n) { return (m == 0 || 2 * m == n) ? 1.0 : 2.0; }

}  // namespace

Field derivative(const Field& f, int order) {
    if (order < 1) throw DomainError("derivative order must be >= 1");
    require_finite(f, "derivative");
    const Grid& g = f.grid();
    auto hat = spectrum(f);
    const auto k = g.wavenumbers();
    const Complex i_unit(0.0, 1.0);
    Complex phase = 1.0;
    for (int r = 0; r < order % 4; ++r) phase *= i_unit;
    for (int m = 0; m < g.modes(); ++m) hat[m] *= phase * std::pow(k[m], order);
    if (order % 2 == 1) hat.back() = 0.0;
    return synthesize(f.grid_ptr(), hat);
}

Field antiderivative(const Field& f) {
    require_finite(f, "antiderivative");
    const Grid& g = f.grid();
    auto hat = spectrum(f);
    const auto k = g.wavenumbers();
    hat[0] = 0.0;
    for (int m = 1; m < g.modes(); ++m) hat[m] /= Complex(0.0, k[m]);
    hat.back() = 0.0;
    return synthesize(f.grid_ptr(), hat);
}

Field apply_multiplier(const Field& f, const std::function<double(double)>& symbol) {
    require_finite(f, "apply_multiplier");
    const Grid& g = f.grid();
    auto hat = spectrum(f);
    const auto k = g.wavenumbers();
    for (int m = 0; m < g.modes(); ++m) hat[m] *= symbol(k[m]);
    return synthesize(f.grid_ptr(), hat);
}

Field helmholtz_inverse(const Field& f, double a) {
    require_finite(f, "helmholtz_inverse");
    if (a == 0.0) return f;
    const auto k = f.grid().wavenumbers();
    for (double km : k) {
        const double sym = 1.0 + a * km * km;
        if (!(sym > 1e-14))
            throw SingularMultiplierError(
                fmt::format("1 + a k^2 vanishes or changes sign (a = {}, k = {})", a, km));
    }
    return apply_multiplier(f, [a](double km) { return 1.0 / (1.0 + a * km * km); });
}

Field helmholtz_apply(const Field& f, double a) {
    if (a == 0.0) {
        require_finite(f, "helmholtz_apply");
        return f;
    }
    return apply_multiplier(f, [a](double km) { return 1.0 + a * km * km; });
}

Field truncate_two_thirds(const Field& f) {
    const int n = f.grid().size();
    auto hat = spectrum(f);
    for (int m = 0; m < f.grid().modes(); ++m)
        if (3 * m > n) hat[m] = 0.0;
    return synthesize(f.grid_ptr(), hat);
}

double sobolev_norm(const Field& f, double s) {
    const Grid& g = f.grid();
    const int n = g.size();
    auto hat = spectrum(f);
    const auto k = g.wavenumbers();
    double sum = 0.0;
    for (int m = 0; m < g.modes(); ++m) {
        const double c2 = std::norm(hat[m]) / (static_cast<double>(n) * n);
        sum += multiplicity(m, n) * std::pow(1.0 + k[m] * k[m], s) * c2;
    }
    return std::sqrt(g.length() * sum);
}

double scaled_energy(const Field& f, double s, double mu_beta) {
    if (mu_beta < 0.0) throw DomainError("scaled_energy: mu_beta must be >= 0");
    const double a = sobolev_norm(f, s);
    if (mu_beta == 0.0) return a;
    const double b = sobolev_norm(f, s + 1.0);
    return std::sqrt(a * a + mu_beta * b * b);
}

double weighted_norm(const Field& f, int n, double s, double mu) {
    if (n < 0) throw DomainError("weighted_norm: n must be >= 0");
    const Grid& g = f.grid();
    const double centre = g.x(0) + 0.5 * g.length();
    const Field w = Field::from_function(f.grid_ptr(), [centre](double x) { return x - centre; });
    double total = 0.0;
    Field moment = f;
    for (int j = 0; j <= n; ++j) {
        if (j > 0) {
            for (int i = 0; i < moment.size(); ++i) moment[i] *= w[i];
        }
        total += scaled_energy(moment, s + 2.0 * (n - j), mu);
    }
    return total;
}

double integral(const Field& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return sum * f.grid().dx();
}

double spectral_tail(const Field& f, double fraction) {
    const int modes = f.grid().modes();
    auto hat = spectrum(f);
    const int start = static_cast<int>(std::floor((1.0 - fraction) * modes));
    double tail = 0.0;
    double total = 0.0;
    for (int m = 0; m < modes; ++m) {
        const double a = std::abs(hat[m]);
        total += a;
        if (m >= start) tail += a;
    }
    return total > 0.0 ? tail / total : 0.0;
}

Field shift(const Field& f, int cells) {
    const int n = f.size();
    Field out(f.grid_ptr());
    const int c = ((cells % n) + n) % n;
    for (int j = 0; j < n; ++j) out[(j + c) % n] = f[j];
    return out;
}

Field mirror(const Field& f) {
    const int n = f.size();
    Field out(f.grid_ptr());
    for (int j = 0; j < n; ++j) out[j] = f[(n - j) % n];
    return out;
}

}  // namespace gnwaves
