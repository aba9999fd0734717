#include "rieszgas/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace rieszgas {

GridFunction sample_potential(const PotentialFn& V, const Grid& grid) {
    GridFunction out(grid);
    for (std::int64_t i = 0; i < grid.size(); ++i) out[i] = V(grid.center(i), grid.d);
    return out;
}

double interaction_energy(const DensityMeasure& mu, const PotentialOperator& op) {
    GridFunction h = op.apply(mu);
    double acc = 0;
    for (std::int64_t i = 0; i < mu.grid.size(); ++i) acc += h[i] * mu.values[static_cast<size_t>(i)];
    return acc * mu.grid.cell_volume();
}

double interaction_energy(const DensityMeasure& mu, const KernelSpec& spec) {
    PotentialOperator op(spec, mu.grid);
    return interaction_energy(mu, op);
}

double interaction_energy(const GridFunction& f, const PotentialOperator& op) {
    GridFunction h = op.apply(f.values);
    double acc = 0;
    for (std::int64_t i = 0; i < f.grid.size(); ++i) acc += h[i] * f[i];
    return acc * f.grid.cell_volume();
}

double interaction_energy(const SignedDiscreteMeasure& nu, const KernelSpec& spec) {
    double acc = 0;
    const size_t n = nu.support.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double r = dist(nu.support[i], nu.support[j], nu.d);
            if (r == 0.0) throw std::domain_error("interaction_energy: coincident atoms");
            acc += 2.0 * nu.weights[i] * nu.weights[j] * eval_kernel_radial(spec, r);
        }
    return acc;
}

double mean_field_energy(const DensityMeasure& mu, const GridFunction& V, const KernelSpec& spec) {
    double acc = interaction_energy(mu, spec);
    double pot = 0;
    for (std::int64_t i = 0; i < mu.grid.size(); ++i)
        pot += V[i] * mu.values[static_cast<size_t>(i)];
    return acc + pot * mu.grid.cell_volume();
}

double free_energy(const DensityMeasure& mu, const GridFunction& V, const KernelSpec& spec,
                   double theta) {
    if (!(theta > 0)) throw std::invalid_argument("free_energy: theta must be positive");
    return mean_field_energy(mu, V, spec) + entropy(mu) / theta;
}

double pair_energy(const ParticleConfiguration& X, const KernelSpec& spec) {
    double acc = 0;
    const int n = X.n();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double r = dist(X.points[static_cast<size_t>(i)], X.points[static_cast<size_t>(j)], X.d);
            if (r == 0.0) throw std::domain_error("pair_energy: coincident particles");
            acc += 2.0 * eval_kernel_radial(spec, r);
        }
    return acc;
}

double hamiltonian(const ParticleConfiguration& X, const PotentialFn& V, const KernelSpec& spec) {
    double acc = pair_energy(X, spec);
    double pot = 0;
    for (const auto& p : X.points) pot += V(p, X.d);
    return acc + X.n() * pot;
}

double f_n(const ParticleConfiguration& X, const GridFunction& h_mu, double energy_mu,
           const KernelSpec& spec) {
    const double n = static_cast<double>(X.n());
    double pair = pair_energy(X, spec);
    double cross = 0;
    for (const auto& p : X.points) cross += h_mu.interpolate(p);
    return pair / (n * n) - 2.0 * cross / n + energy_mu;
}

double f_n(const ParticleConfiguration& X, const DensityMeasure& mu, const KernelSpec& spec) {
    PotentialOperator op(spec, mu.grid);
    GridFunction h = op.apply(mu);
    return f_n(X, h, interaction_energy(mu, op), spec);
}

SplittingResidual verify_splitting(const ParticleConfiguration& X, const DensityMeasure& mu,
                                   const PotentialFn& V, const KernelSpec& spec,
                                   std::optional<double> c, std::optional<double> theta,
                                   const std::vector<double>* log_density) {
    X.validate();
    const double n = static_cast<double>(X.n());
    PotentialOperator op(spec, mu.grid);
    GridFunction h = op.apply(mu);
    const double e_mu = interaction_energy(mu, op);
    const double fn = f_n(X, h, e_mu, spec);

    const double lhs = hamiltonian(X, V, spec);
    double emp_term = 0;  // int (2 h^mu + V) d emp
    for (const auto& p : X.points) emp_term += 2.0 * h.interpolate(p) + V(p, X.d);
    emp_term /= n;
    const double rhs = n * n * (fn - e_mu + emp_term);

    SplittingResidual out;
    double scale = std::max(1.0, std::abs(lhs));
    out.unconditional = std::abs(lhs - rhs) / scale;

    if (c) {
        GridFunction Vg = sample_potential(V, mu.grid);
        if (theta) {
            if (!log_density) throw std::invalid_argument("verify_splitting: thermal form needs log density");
            GridFunction logmu(mu.grid, *log_density);
            double zeta_term = 0;  // int zeta_theta d emp
            for (const auto& p : X.points) zeta_term += -logmu.interpolate(p) / *theta;
            zeta_term /= n;
            double rhs_th = n * n * (free_energy(mu, Vg, spec, *theta) + fn + zeta_term);
            out.thermal = std::abs(lhs - rhs_th) / scale;
        } else {
            double zeta_term = 0;  // int zeta_inf d emp
            for (const auto& p : X.points) zeta_term += 2.0 * h.interpolate(p) + V(p, X.d) - *c;
            zeta_term /= n;
            double rhs_eq = n * n * (mean_field_energy(mu, Vg, spec) + fn + zeta_term);
            out.equilibrium = std::abs(lhs - rhs_eq) / scale;
        }
    }
    return out;
}

}  // namespace rieszgas
