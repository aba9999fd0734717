#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "rieszgas/kernels.hpp"
#include "rieszgas/measures.hpp"

using namespace rieszgas;

namespace {

constexpr double kPi = std::numbers::pi;

// Smooth compactly supported bump, C^inf, supported on |x| < R.
double bump(double r, double R) {
    double u2 = (r / R) * (r / R);
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
}

// Gaussian density centered at the box middle, mass 1 on the grid.
DensityMeasure gaussian_density(const Grid& g, double sigma) {
    std::vector<double> v(static_cast<size_t>(g.size()));
    for (std::int64_t i = 0; i < g.size(); ++i) {
        Point p = g.center(i);
        double r2 = 0;
        for (int a = 0; a < g.d; ++a) r2 += p[a] * p[a];
        v[static_cast<size_t>(i)] = std::exp(-r2 / (2 * sigma * sigma));
    }
    return normalized_density(g, std::move(v));
}

}  // namespace

TEST_CASE("built-in kernel values") {
    auto c2 = KernelSpec::coulomb(2);
    CHECK(eval_kernel(c2, Point{1.0, 0, 0}) == doctest::Approx(0.0));  // log 1 = 0
    CHECK(eval_kernel(c2, Point{0.6, 0.8, 0}) == doctest::Approx(0.0));

    auto r1 = KernelSpec::riesz(1, 0.25);
    CHECK(eval_kernel(r1, Point{16.0, 0, 0}) == doctest::Approx(r1.c / 4.0).epsilon(1e-14));

    CHECK_THROWS(eval_kernel(c2, Point{0, 0, 0}));
}

TEST_CASE("fourier symbol values") {
    auto c2 = KernelSpec::coulomb(2);
    CHECK(fourier_symbol(c2, 2.0) == doctest::Approx(0.25));
    auto r2 = KernelSpec::riesz(2, 0.5);
    CHECK(fourier_symbol(r2, 9.0) == doctest::Approx(1.0 / 9.0));
    CHECK_THROWS(fourier_symbol(r2, 0.0));
}

TEST_CASE("evenness and homogeneity") {
    auto spec = KernelSpec::riesz(2, 0.5);
    Point xs[] = {{0.3, -0.7, 0}, {1.5, 0.2, 0}, {-4.0, 3.0, 0}};
    for (const auto& x : xs) {
        Point mx{-x[0], -x[1], -x[2]};
        CHECK(eval_kernel(spec, x) == eval_kernel(spec, mx));
        for (double lam : {0.5, 2.0, 7.0}) {
            Point lx{lam * x[0], lam * x[1], lam * x[2]};
            double expect = std::pow(lam, 2 * spec.s - spec.d) * eval_kernel(spec, x);
            CHECK(eval_kernel(spec, lx) == doctest::Approx(expect).epsilon(1e-13));
        }
    }
}

TEST_CASE("normalization constants at self-dual points") {
    // g = |x|^{-d/2} is its own transform, so c_{d,s} = 1 when 2s = d/2.
    CHECK(riesz_constant(1, 0.25) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(riesz_constant(2, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(riesz_constant(3, 0.75) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(coulomb_constant(3) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(coulomb_constant(2) == doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("grid DFT of the sampled kernel matches the symbol mid-band") {
    // Discrete Fourier oracle on a 256-point grid. With the center-cell
    // correction the relative gap is scale invariant and measures ~2.7%
    // over the middle half of the frequency lattice (frozen bound 3%).
    auto spec = KernelSpec::riesz(1, 0.25);
    Grid g(1, -32.0, 32.0, 256);
    SpectralWorkspace ws(g);
    auto ker = sampled_kernel_padded(spec, ws);
    ws.forward(ker);
    const double h = g.spacing();
    double worst = 0;
    for (int k = 2; k <= ws.padded_n() / 4; ++k) {
        double xi = ws.freq(k);
        double dft = ker[static_cast<size_t>(k)].real() * h;
        double sym = fourier_symbol(spec, xi);
        worst = std::max(worst, std::abs(dft - sym) / sym);
    }
    CHECK(worst < 0.03);
}

TEST_CASE("validate_riesz_type: built-in Riesz kernels pass") {
    SUBCASE("d=1 s=0.25") {
        auto rep = validate_riesz_type(KernelSpec::riesz(1, 0.25), Grid(1, -8, 8, 256));
        CHECK(rep.all_checked_pass);
    }
    SUBCASE("d=2 s=0.5") {
        auto rep = validate_riesz_type(KernelSpec::riesz(2, 0.5), Grid(2, -8, 8, 64));
        CHECK(rep.all_checked_pass);
        CHECK(rep.fitted_cs == doctest::Approx(std::pow(2.0, 2 * 0.5 - 2)).epsilon(0.1));
    }
    SUBCASE("d=3 s=0.75") {
        auto rep = validate_riesz_type(KernelSpec::riesz(3, 0.75), Grid(3, -8, 8, 64));
        CHECK(rep.all_checked_pass);
    }
}

TEST_CASE("validate_riesz_type: bounded kernel fails blow-up item") {
    auto spec = KernelSpec::custom(
        1, 0.25, [](const Point& x, int d) { return std::exp(-norm(x, d)); },
        [](double xi) { return 2.0 / (1.0 + 4 * kPi * kPi * xi * xi); });
    auto rep = validate_riesz_type(spec, Grid(1, -8, 8, 256));
    bool item3_failed = false;
    for (const auto& it : rep.items)
        if (it.item == 3) item3_failed = (it.verdict == Verdict::fail);
    CHECK(item3_failed);
    CHECK_FALSE(rep.all_checked_pass);
}

TEST_CASE("validate_riesz_type: Riesz plus smooth bump keeps items 5 and 8") {
    const double s = 0.25;
    const double c = riesz_constant(1, s);
    const double amp = 0.05;
    auto spec = KernelSpec::custom(
        1, s,
        [=](const Point& x, int d) {
            double r = norm(x, d);
            return c * std::pow(r, 2 * s - 1) + amp * bump(r, 1.0);
        },
        [=](double xi) {
            // symbol of the bump by direct quadrature (even function)
            double bhat = 0;
            const int q = 400;
            for (int i = 0; i < q; ++i) {
                double x = (i + 0.5) / static_cast<double>(q);
                bhat += 2 * bump(x, 1.0) * std::cos(2 * kPi * xi * x) / q;
            }
            return std::pow(xi, -2 * s) + amp * bhat;
        });
    auto rep = validate_riesz_type(spec, Grid(1, -8, 8, 256));
    for (const auto& it : rep.items) {
        if (it.item == 5) {
            CHECK(it.verdict == Verdict::pass);
            CHECK(it.c2 > c);  // enlarged constant
        }
        if (it.item == 8) CHECK(it.verdict == Verdict::pass);
    }
}

TEST_CASE("apply_D inverts the potential map") {
    for (int d : {1, 2}) {
        auto spec = KernelSpec::riesz(d, d == 1 ? 0.25 : 0.5);
        Grid g(d, -4, 4, d == 1 ? 256 : 128);
        auto mu = gaussian_density(g, 0.5);
        GridFunction h = potential_field(mu, spec);
        GridFunction back = apply_D(spec, h);
        double num = 0, den = 0;
        for (std::int64_t i = 0; i < g.size(); ++i) {
            double diff = back[i] - mu.values[static_cast<size_t>(i)];
            num += diff * diff;
            den += mu.values[static_cast<size_t>(i)] * mu.values[static_cast<size_t>(i)];
        }
        CHECK(std::sqrt(num / den) < 1e-6);
    }
}

TEST_CASE("apply_D acts diagonally on a windowed mode") {
    auto spec = KernelSpec::riesz(1, 0.25);
    Grid g(1, -8, 8, 256);
    const double xi0 = 1.0;  // lattice-resonant frequency: 16 cycles over 16 units
    GridFunction f(g);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        Point p = g.center(i);
        f[i] = std::cos(2 * kPi * xi0 * p[0]) * bump(p[0], 6.0);
    }
    GridFunction Df = apply_D(spec, f);
    // Near the window center the mode is multiplied by 1/ghat(xi0).
    double expect = 1.0 / fourier_symbol(spec, xi0);
    double got = Df.interpolate(Point{0.0, 0, 0}) / f.interpolate(Point{0.0, 0, 0});
    CHECK(got == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("apply_D spectral vs real-space second differences") {
    auto spec = KernelSpec::riesz(1, 0.25);
    Grid g(1, -16, 16, 512);
    // a genuinely compactly supported input, so both routes see the same tail
    GridFunction h(g);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        Point p = g.center(i);
        h[i] = std::exp(-p[0] * p[0] / (2 * 0.8 * 0.8));
    }
    GridFunction Dh = apply_D(spec, h);
    double worst = 0;
    double scale = 0;
    for (std::int64_t i = 0; i < g.size(); ++i) scale = std::max(scale, std::abs(Dh[i]));
    for (int k = 0; k < 32; ++k) {
        // sample at cell centers so the stencil stays on the lattice
        std::int64_t cell = g.size() / 2 - 32 + 2 * k;
        Point x = g.center(cell);
        double rs = apply_D_realspace(spec, h, x);
        double sp = Dh[cell];
        worst = std::max(worst, std::abs(rs - sp) / scale);
    }
    CHECK(worst < 0.01);
}

TEST_CASE("apply_D rejects non-decaying input") {
    auto spec = KernelSpec::riesz(1, 0.25);
    Grid g(1, -8, 8, 256);
    GridFunction f(g);
    for (std::int64_t i = 0; i < g.size(); ++i) f[i] = 1.0;  // no decay at the boundary
    CHECK_THROWS(apply_D(spec, f));
}

TEST_CASE("smeared self energy") {
    SUBCASE("Coulomb d=3 shell value") {
        auto spec = KernelSpec::coulomb(3);
        for (double eta : {0.05, 0.1, 0.2})
            CHECK(smeared_self_energy(spec, eta) == doctest::Approx(spec.c / eta).epsilon(1e-10));
    }
    SUBCASE("Riesz homogeneity in eta") {
        auto spec = KernelSpec::riesz(2, 0.5);
        double r1 = smeared_self_energy(spec, 0.05);
        double r2 = smeared_self_energy(spec, 0.10);
        CHECK(r2 / r1 == doctest::Approx(std::pow(2.0, 2 * spec.s - spec.d)).epsilon(1e-6));
    }
    SUBCASE("quadrature refinement stability") {
        auto spec = KernelSpec::riesz(3, 0.75);
        double a = smeared_self_energy(spec, 0.1, 256);
        double b = smeared_self_energy(spec, 0.1, 512);
        CHECK(std::abs(a - b) / std::abs(a) < 1e-3);
    }
    CHECK_THROWS(smeared_self_energy(KernelSpec::coulomb(3), 0.0));
}

TEST_CASE("box exterior integral agrees with a polar oracle") {
    // Centered square, radially symmetric integrand: 8-fold wedge reduction.
    const double a = 0.7, p = 2.5;
    double oracle = 0;
    const int q = 2000;
    for (int i = 0; i < q; ++i) {
        double phi = (kPi / 4) * (i + 0.5) / q;
        double rmin = a / std::cos(phi);
        oracle += 8.0 * (kPi / 4 / q) * std::pow(rmin, 2.0 - p) / (p - 2.0);
    }
    double got = box_exterior_integral(Point{0, 0, 0}, 2, -a, a, p);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-6));

    // d=1 closed form.
    double got1 = box_exterior_integral(Point{0.25, 0, 0}, 1, -1.0, 1.0, 1.5);
    double expect1 = (std::pow(1.25, -0.5) + std::pow(0.75, -0.5)) / 0.5;
    CHECK(got1 == doctest::Approx(expect1).epsilon(1e-12));
}

TEST_CASE("cell averages") {
    // d=1 power law, closed form: (2/h) int_0^{h/2} c x^{2s-1} dx.
    auto spec = KernelSpec::riesz(1, 0.25);
    double h = 0.125;
    double expect = spec.c * 2.0 * std::pow(h / 2, 2 * spec.s) / (2 * spec.s * h);
    CHECK(kernel_cell_average(spec, h) == doctest::Approx(expect).epsilon(1e-10));
}
