#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rieszgas {

// Points live in R^d with d <= 3; unused coordinates stay zero.
constexpr int kMaxDim = 3;
using Point = std::array<double, kMaxDim>;

inline double norm(const Point& p, int d) {
    double s = 0;
    for (int a = 0; a < d; ++a) s += p[a] * p[a];
    return std::sqrt(s);
}

inline Point sub(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline double dist(const Point& a, const Point& b, int d) {
    return norm(sub(a, b), d);
}

// Uniform cell-centered lattice on [lo, hi]^d with n cells per axis.
// n must be a power of two so the spectral transforms stay radix-2.
struct Grid {
    int d = 1;
    double lo = -1.0;
    double hi = 1.0;
    int n = 64;

    Grid() = default;
    Grid(int d_, double lo_, double hi_, int n_) : d(d_), lo(lo_), hi(hi_), n(n_) {
        if (d < 1 || d > kMaxDim) throw std::invalid_argument("Grid: d must be in [1,3]");
        if (hi <= lo) throw std::invalid_argument("Grid: hi <= lo");
        if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("Grid: n must be a power of two");
    }

    double spacing() const { return (hi - lo) / n; }
    double cell_volume() const { return std::pow(spacing(), d); }
    std::int64_t size() const {
        std::int64_t s = 1;
        for (int a = 0; a < d; ++a) s *= n;
        return s;
    }

    std::array<int, kMaxDim> unflatten(std::int64_t idx) const {
        std::array<int, kMaxDim> k{0, 0, 0};
        for (int a = d - 1; a >= 0; --a) {
            k[a] = static_cast<int>(idx % n);
            idx /= n;
        }
        return k;
    }

    std::int64_t flatten(const std::array<int, kMaxDim>& k) const {
        std::int64_t idx = 0;
        for (int a = 0; a < d; ++a) idx = idx * n + k[a];
        return idx;
    }

    Point center(std::int64_t idx) const {
        auto k = unflatten(idx);
        Point p{0, 0, 0};
        double h = spacing();
        for (int a = 0; a < d; ++a) p[a] = lo + (k[a] + 0.5) * h;
        return p;
    }

    bool contains(const Point& p) const {
        for (int a = 0; a < d; ++a)
            if (p[a] < lo || p[a] >= hi) return false;
        return true;
    }

    bool operator==(const Grid& o) const { return d == o.d && lo == o.lo && hi == o.hi && n == o.n; }
};

// A scalar field sampled at cell centers.
struct GridFunction {
    Grid grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(const Grid& g) : grid(g), values(static_cast<size_t>(g.size()), 0.0) {}
    GridFunction(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<std::int64_t>(values.size()) != g.size())
            throw std::invalid_argument("GridFunction: size mismatch");
    }

    double& operator[](std::int64_t i) { return values[static_cast<size_t>(i)]; }
    double operator[](std::int64_t i) const { return values[static_cast<size_t>(i)]; }

    // d-linear interpolation; values outside the cell-center hull clamp to the
    // nearest face. Throws if p leaves the grid box entirely.
    double interpolate(const Point& p) const;
};

// Integral of a grid function (cell-center quadrature).
double integral(const GridFunction& f);

// Fourier convention used throughout: the unitary ordinary-frequency
// transform  F(xi) = \int f(x) e^{-2 pi i x.xi} dx.  Plancherel and the
// convolution theorem then hold without 2*pi factors, and the built-in
// kernels have symbol exactly |xi|^{-2s}.
//
// Convolutions happen on the 2x zero-padded lattice of a grid, so circular
// convolution equals linear convolution on the box. pad_factor = 1 reads the
// box periodically (used by the lattice seminorm sums).
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(const Grid& g, int pad_factor = 2);

    const Grid& grid() const { return grid_; }
    int padded_n() const { return m_; }
    std::int64_t padded_size() const { return psize_; }

    // Zero-pad box values into the padded lattice (box occupies the low corner).
    std::vector<std::complex<double>> pad(const std::vector<double>& box_values) const;
    // Extract the box region from a padded array (real parts).
    std::vector<double> unpad(const std::vector<std::complex<double>>& padded) const;

    // Unnormalized DFT (FFTW sign conventions: forward = e^{-2 pi i jk/m}).
    void forward(std::vector<std::complex<double>>& a) const;
    void inverse(std::vector<std::complex<double>>& a) const;  // includes 1/m^d

    // Ordinary frequency of padded bin k along one axis: k~/(m h).
    double freq(int k) const;
    // |xi| of a padded multi-index.
    double freq_norm(std::int64_t idx) const;
    std::array<int, kMaxDim> unflatten_padded(std::int64_t idx) const;

    // Cell volume of the frequency lattice, (1/(m h))^d.
    double freq_cell() const;

private:
    Grid grid_;
    int m_;
    std::int64_t psize_;
};

}  // namespace rieszgas
