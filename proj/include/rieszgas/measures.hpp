#pragma once

#include <vector>

#include "rieszgas/grid.hpp"
#include "rieszgas/kernels.hpp"

namespace rieszgas {

// Probability density sampled at cell centers; mass = sum * h^d must be 1.
struct DensityMeasure {
    Grid grid;
    std::vector<double> values;

    DensityMeasure() = default;
    DensityMeasure(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {}

    double mass() const;
    void validate(double tol = 1e-10) const;  // nonnegative, mass 1
    GridFunction as_function() const { return GridFunction(grid, values); }
};

// Normalize nonnegative cell values to unit mass.
DensityMeasure normalized_density(const Grid& g, std::vector<double> raw);

// N pairwise-distinct points in R^d.
struct ParticleConfiguration {
    int d = 1;
    std::vector<Point> points;

    int n() const { return static_cast<int>(points.size()); }
    double min_pairwise_distance() const;
    void validate() const;  // throws on coincident points
};

// Finitely supported signed measure.
struct SignedDiscreteMeasure {
    int d = 1;
    std::vector<Point> support;
    std::vector<double> weights;

    double total_mass() const;
    size_t size() const { return support.size(); }
};

SignedDiscreteMeasure empirical_measure(const ParticleConfiguration& X);

// Difference of two discrete measures (concatenated supports, nu - mu acts
// as weights of mu negated).
SignedDiscreteMeasure measure_difference(const SignedDiscreteMeasure& nu,
                                         const SignedDiscreteMeasure& mu);

// One atom per cell at the cell center, weight value * h^d. With top_k > 0
// the support thins to the top-k cells by |weight|; positive and negative
// parts are renormalized separately so both masses are preserved.
SignedDiscreteMeasure quantize(const Grid& grid, const std::vector<double>& values, int top_k = 0);
SignedDiscreteMeasure quantize(const DensityMeasure& mu, int top_k = 0);

// Convolution with the interaction kernel on a fixed grid. Caches the
// spectral kernel so repeated applications (solver iterations) cost one
// forward/inverse transform pair each.
class PotentialOperator {
public:
    PotentialOperator(const KernelSpec& spec, const Grid& grid);

    // h^mu = mu * g for cell values of mu (density w.r.t. Lebesgue).
    GridFunction apply(const std::vector<double>& density_values) const;
    GridFunction apply(const DensityMeasure& mu) const { return apply(mu.values); }

    const Grid& grid() const { return ws_.grid(); }
    const KernelSpec& spec() const { return spec_; }

private:
    KernelSpec spec_;
    SpectralWorkspace ws_;
    std::vector<std::complex<double>> kernel_hat_;
};

// h^mu with a tail-mass guard: throws if mu puts more than 1e-8 of its mass
// on the outermost cell layer (the grid truncates such measures).
GridFunction potential_field(const DensityMeasure& mu, const KernelSpec& spec);

// ent[mu] = int mu log mu; empty cells contribute zero.
double entropy(const DensityMeasure& mu);

// Each atom replaced by the uniform density on the ball B(x_i, eta),
// rasterized with partial-cell volume weights; per-atom mass preserved
// exactly. Returns cell values of the resulting (signed) density.
GridFunction smear_ball(const SignedDiscreteMeasure& nu, double eta, const Grid& grid,
                        int subsamples_per_axis = 8);

// Each atom replaced by Q quadrature atoms on the sphere of radius eta_i,
// Q = max(16, ceil(eta/h)*8) per atom (d = 1 uses the two endpoints).
SignedDiscreteMeasure smear_sphere(const ParticleConfiguration& X, const std::vector<double>& etas,
                                   double h_grid);

}  // namespace rieszgas
