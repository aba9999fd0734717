#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rieszgas/grid.hpp"

namespace rieszgas {

enum class KernelFamily { coulomb, riesz, custom };

// Interaction kernel g together with its Fourier symbol.
//
// Built-in families are normalized so that the symbol is exactly
// |xi|^{-2s} (Riesz of order s; Coulomb counts as s = 1) under the
// ordinary-frequency transform. That makes the two-sided symbol bound an
// identity and ties the electric energy to the H^{-s} norm with constant 1.
struct KernelSpec {
    KernelFamily family = KernelFamily::riesz;
    int d = 1;
    double s = 0.25;   // order; s = 1 for Coulomb
    double c = 1.0;    // real-space normalization constant

    std::function<double(const Point&, int)> custom_g;       // g(x), x != 0
    std::function<double(double)> custom_symbol;             // ghat(|xi|), xi != 0

    static KernelSpec coulomb(int d);
    static KernelSpec riesz(int d, double s);
    static KernelSpec custom(int d, double s_nominal,
                             std::function<double(const Point&, int)> g,
                             std::function<double(double)> symbol);
};

// Normalization constants making ghat = |xi|^{-2s} exact.
double riesz_constant(int d, double s);    // c_{d,s}
double coulomb_constant(int d);            // c_d (c_2 for the log kernel)

double eval_kernel(const KernelSpec& spec, const Point& x);
double eval_kernel_radial(const KernelSpec& spec, double r);
double fourier_symbol(const KernelSpec& spec, double xi_norm);

// Exact average of g over the grid cell [-h/2, h/2]^d, by dyadic-shell
// quadrature around the singularity. Used as the singular-cell value in
// discrete convolutions.
double kernel_cell_average(const KernelSpec& spec, double h);

// Average of a radial power |z|^{-p} (p < d + 2, integrable after the
// |z|^2 factor where applicable) over the cell; shared by the
// difference-quotient seminorms. Returns (1/h^d) * int_cell |z|^q dz.
double cell_average_power(int d, double q, double h);

// int_{R^d \ B} |y - x|^{-p} dy for a box B containing x, p > d. d <= 2.
double box_exterior_integral(const Point& x, int d, double box_lo, double box_hi, double p);

// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

// F^{-1} of a radial frequency profile f(|xi|) e^{-(eps |xi|)^2} at radius r,
// by one-dimensional Hankel-type quadrature. The Gaussian window regularizes
// growing profiles (finite-part transforms).
double radial_inverse_transform(const std::function<double(double)>& f_radial, int d, double eps,
                                double r);

// Coefficient kappa(d,s) with
//   D f(x) = kappa * (1/2) int (2 f(x) - f(x+y) - f(x-y)) |y|^{-d-2s} dy
// matching the spectral operator f -> F^{-1}(fhat / ghat) for the built-in
// normalization ghat = |xi|^{-2s}.
double second_difference_coefficient(int d, double s);

// --- Riesz-type validation -------------------------------------------------

enum class Verdict { pass, fail, inconclusive, not_checked, exempt };

std::string to_string(Verdict v);

struct ItemResult {
    int item = 0;
    Verdict verdict = Verdict::not_checked;
    double c1 = 0.0, c2 = 0.0;    // fitted two-sided constants where relevant
    double witness = 0.0;         // radius or frequency achieving the worst ratio
    double witness_ratio = 0.0;
    std::string note;
};

struct ValidationTolerances {
    double r_min = 1e-4;
    double r_max = 32.0;
    int samples_per_decade = 16;
    double r0 = 0.5;              // near-origin radius for the decay-ratio item
    double divergence_factor = 1.5;  // monotone growth over the last decade => fail
    double blowup_factor = 1.05;     // minimum growth over the first decade for item 3
};

struct ValidationReport {
    std::vector<ItemResult> items;
    double fitted_c1 = 0.0, fitted_c2 = 0.0, fitted_cs = 0.0, r0 = 0.0;
    int grid_n = 0;
    double grid_h = 0.0;
    bool all_checked_pass = false;
    std::string summary() const;
};

ValidationReport validate_riesz_type(const KernelSpec& spec, const Grid& grid,
                                     const ValidationTolerances& tol = {});

// Kernel sampled on the padded offset lattice of a workspace, the singular
// cell replaced by its exact cell average. Shared by the convolution and the
// inverse operator so that one is the exact inverse of the other.
std::vector<std::complex<double>> sampled_kernel_padded(const KernelSpec& spec,
                                                        const SpectralWorkspace& ws);

// --- Operator D ------------------------------------------------------------

// D f = F^{-1}(fhat / ghat): maps h^mu back to mu. f must decay into the
// zero-padded margin. Throws if the symbol division is not summable.
GridFunction apply_D(const KernelSpec& spec, const GridFunction& f);

// Real-space second-difference quadrature for D f at one point; the
// independent route used to cross-check the spectral result.
double apply_D_realspace(const KernelSpec& spec, const GridFunction& f, const Point& x);

// --- Smearing --------------------------------------------------------------

// g_eta(0) = (g * uniform probability measure on the sphere of radius eta)(0),
// i.e. the spherical average of g at radius eta, by quadrature over
// equidistributed sphere points.
double smeared_self_energy(const KernelSpec& spec, double eta, int quad_points = 256);

// Equidistributed points on the sphere |y| = eta in R^d (d=1: the two
// endpoints; d=2: uniform angles; d=3: Fibonacci layout).
std::vector<Point> sphere_points(int d, double eta, int q);

}  // namespace rieszgas
