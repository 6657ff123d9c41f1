#pragma once

// Periodic equispaced grid and the Fourier calculus used by every model:
// spectral derivatives, Fourier-multiplier inverses and Sobolev norms.
//
// Conventions
//   x_j  = -L/2 + j*dx,  j = 0..n-1          (domain centred on 0)
//   k_m  = 2*pi*m/L,     m = -n/2+1 .. n/2   (m = n/2 is the Nyquist mode)
//   c_m  = (1/n) sum_j f_j exp(-i k_m x_j)
//   |f|_{H^s}^2 = L * sum_m (1 + k_m^2)^s |c_m|^2

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace gnwaves {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;
using Complex = std::complex<double>;

class Grid {
public:
    /// n_points even and >= 16, length > 0. With `dealias` set, pointwise
    /// products of fields on this grid are computed with 3/2 zero padding.
    Grid(int n_points, double length, bool dealias = false);
    ~Grid();

    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    static GridPtr make(int n_points, double length, bool dealias = false);
    /// Grid of spacing `dx` with at least `min_length` span, n rounded up
    /// to a power of two (>= 16).
    static GridPtr with_spacing(double dx, double min_length, bool dealias = false);

    int size() const noexcept { return n_; }
    int modes() const noexcept { return n_ / 2 + 1; }
    double length() const noexcept { return length_; }
    double dx() const noexcept { return length_ / n_; }
    double x(int j) const noexcept { return -0.5 * length_ + j * dx(); }
    bool dealias() const noexcept { return dealias_; }

    /// k_m for m = 0..n/2 (the half spectrum stored by a real transform).
    std::span<const double> wavenumbers() const noexcept { return k_; }
    double k_max() const noexcept { return k_.back(); }

    /// Unnormalised forward transform: out[m] = sum_j in[j] exp(-2 pi i j m / n).
    void forward(std::span<const double> in, std::span<Complex> out) const;
    /// Inverse including the 1/n factor. The input is left untouched.
    void inverse(std::span<const Complex> in, std::span<double> out) const;

    /// Dealiased pointwise product (3/2 padding); used when dealias() is set.
    void padded_product(std::span<const double> a, std::span<const double> b,
                        std::span<double> out) const;

    bool same_as(const Grid& other) const noexcept {
        return this == &other || (n_ == other.n_ && length_ == other.length_ &&
                                  dealias_ == other.dealias_);
    }

private:
    struct Plans;
    int n_;
    double length_;
    bool dealias_;
    std::vector<double> k_;
    std::unique_ptr<Plans> plans_;
};

/// Real samples of a periodic function on a grid.
class Field {
public:
    Field() = default;
    Field(GridPtr grid, std::vector<double> values);
    explicit Field(GridPtr grid, double value = 0.0);

    static Field from_function(GridPtr grid, const std::function<double(double)>& f);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }
    bool empty() const { return !grid_; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    const std::vector<double>& data() const { return values_; }

    double operator[](int j) const { return values_[j]; }
    double& operator[](int j) { return values_[j]; }

    bool all_finite() const;
    double max_abs() const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double a);

    /// Pointwise map.
    Field map(const std::function<double(double)>& f) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

void require_same_grid(const Field& a, const Field& b);

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator-(Field a);
Field operator*(double s, Field a);
Field operator*(Field a, double s);
/// Pointwise product; dealiased when the grid asks for it.
Field operator*(const Field& a, const Field& b);
/// Pointwise quotient (no dealiasing).
Field operator/(const Field& a, const Field& b);
Field operator+(Field a, double s);
Field operator+(double s, Field a);

/// Spectral derivative of the given order >= 1. The Nyquist coefficient is
/// dropped for odd orders so the result stays real.
Field derivative(const Field& f, int order = 1);

/// Zero-mean primitive (mean and Nyquist modes of f ignored).
Field antiderivative(const Field& f);

/// Solves (1 - a dx^2) u = f, i.e. divides mode m by 1 + a k_m^2.
Field helmholtz_inverse(const Field& f, double a);

/// Applies (1 - a dx^2) to f.
Field helmholtz_apply(const Field& f, double a);

/// Generic real Fourier multiplier: mode m is multiplied by symbol(k_m).
Field apply_multiplier(const Field& f, const std::function<double(double)>& symbol);

/// Zeroes every mode with |m| > n/3.
Field truncate_two_thirds(const Field& f);

double sobolev_norm(const Field& f, double s);

/// (|f|_{H^s}^2 + mu_beta |f|_{H^{s+1}}^2)^{1/2}
double scaled_energy(const Field& f, double s, double mu_beta);

/// sum_{j=0..n} |x^j f|  measured in scaled_energy(., s + 2(n-j), mu),
/// x the coordinate centred on the domain midpoint. Only meaningful while
/// f is negligible near the periodic seam.
double weighted_norm(const Field& f, int n, double s, double mu);

/// Trapezoid (= exact for band-limited f) integral over the period.
double integral(const Field& f);

/// |c_m| summed over the top `fraction` of the resolved modes, relative to
/// the total; a cheap under-resolution indicator.
double spectral_tail(const Field& f, double fraction = 0.1);

/// Circular shift by whole cells: out[j] = f[j - cells].
Field shift(const Field& f, int cells);

/// Mirror about x = 0: out(x) = f(-x).
Field mirror(const Field& f);

}  // namespace gnwaves
