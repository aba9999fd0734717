#pragma once

#include <functional>
#include <optional>

#include "rieszgas/measures.hpp"

namespace rieszgas {

// Confining potential evaluated analytically at points; grids sample it.
using PotentialFn = std::function<double(const Point&, int d)>;

GridFunction sample_potential(const PotentialFn& V, const Grid& grid);

// E(mu) = int int g(x-y) dmu dmu for a density, via one convolution:
// E = int h^mu dmu.
double interaction_energy(const DensityMeasure& mu, const KernelSpec& spec);
double interaction_energy(const DensityMeasure& mu, const PotentialOperator& op);

// E_neq(nu) = sum_{i != j} w_i w_j g(x_i - x_j), the diagonal excluded.
double interaction_energy(const SignedDiscreteMeasure& nu, const KernelSpec& spec);

// Same quadratic form for a signed cell field (e.g. a difference of
// densities).
double interaction_energy(const GridFunction& f, const PotentialOperator& op);

// E_V(mu) = E(mu) + int V dmu.
double mean_field_energy(const DensityMeasure& mu, const GridFunction& V, const KernelSpec& spec);

// E_V^theta(mu) = E_V(mu) + ent[mu]/theta.
double free_energy(const DensityMeasure& mu, const GridFunction& V, const KernelSpec& spec,
                   double theta);

// F_N(X, mu) = E_neq(mu - emp_N)
//            = (1/N^2) sum_{i!=j} g(x_i-x_j) - (2/N) sum_i h^mu(x_i) + E(mu),
// with h^mu interpolated d-linearly from the grid.
double f_n(const ParticleConfiguration& X, const DensityMeasure& mu, const KernelSpec& spec);

// Hot-path variant with h^mu and E(mu) precomputed.
double f_n(const ParticleConfiguration& X, const GridFunction& h_mu, double energy_mu,
           const KernelSpec& spec);

// H_N(X) = sum_{i != j} g(x_i - x_j) + N sum_i V(x_i)  (ordered pairs).
double hamiltonian(const ParticleConfiguration& X, const PotentialFn& V, const KernelSpec& spec);

// Pair part sum_{i != j} g(x_i - x_j) alone.
double pair_energy(const ParticleConfiguration& X, const KernelSpec& spec);

struct SplittingResidual {
    double unconditional = 0.0;            // identity valid for any atom-free mu
    std::optional<double> equilibrium;     // paper form with zeta_inf (needs FOC)
    std::optional<double> thermal;         // paper form with zeta_theta
};

// Both sides of H_N(X) = N^2 [ F_N(X,mu) - E(mu) + int (2 h^mu + V) d emp ],
// plus the conditional paper forms when the solver constant c is supplied.
// zeta_inf = 2 h^mu + V - c; zeta_theta = -(1/theta) log mu.
SplittingResidual verify_splitting(const ParticleConfiguration& X, const DensityMeasure& mu,
                                   const PotentialFn& V, const KernelSpec& spec,
                                   std::optional<double> c = std::nullopt,
                                   std::optional<double> theta = std::nullopt,
                                   const std::vector<double>* log_density = nullptr);

}  // namespace rieszgas
