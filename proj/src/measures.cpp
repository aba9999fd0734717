#include "rieszgas/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rieszgas {

double DensityMeasure::mass() const {
    double s = 0;
    for (double v : values) s += v;
    return s * grid.cell_volume();
}

void DensityMeasure::validate(double tol) const {
    if (static_cast<std::int64_t>(values.size()) != grid.size())
        throw std::invalid_argument("DensityMeasure: size mismatch");
    for (double v : values)
        if (v < 0) throw std::invalid_argument("DensityMeasure: negative cell value");
    if (std::abs(mass() - 1.0) > tol)
        throw std::invalid_argument("DensityMeasure: mass differs from 1");
}

DensityMeasure normalized_density(const Grid& g, std::vector<double> raw) {
    double s = 0;
    for (double v : raw) {
        if (v < 0) throw std::invalid_argument("normalized_density: negative value");
        s += v;
    }
    if (s <= 0) throw std::invalid_argument("normalized_density: zero total");
    double scale = 1.0 / (s * g.cell_volume());
    for (double& v : raw) v *= scale;
    return DensityMeasure(g, std::move(raw));
}

double ParticleConfiguration::min_pairwise_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < points.size(); ++i)
        for (size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, dist(points[i], points[j], d));
    return best;
}

void ParticleConfiguration::validate() const {
    if (points.empty()) throw std::invalid_argument("ParticleConfiguration: empty");
    if (points.size() > 1 && !(min_pairwise_distance() > 0))
        throw std::invalid_argument("ParticleConfiguration: coincident points");
}

double SignedDiscreteMeasure::total_mass() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

SignedDiscreteMeasure empirical_measure(const ParticleConfiguration& X) {
    X.validate();
    SignedDiscreteMeasure nu;
    nu.d = X.d;
    nu.support = X.points;
    nu.weights.assign(X.points.size(), 1.0 / static_cast<double>(X.n()));
    return nu;
}

SignedDiscreteMeasure measure_difference(const SignedDiscreteMeasure& nu,
                                         const SignedDiscreteMeasure& mu) {
    SignedDiscreteMeasure out;
    out.d = nu.d;
    out.support = nu.support;
    out.weights = nu.weights;
    out.support.insert(out.support.end(), mu.support.begin(), mu.support.end());
    for (double w : mu.weights) out.weights.push_back(-w);
    return out;
}

SignedDiscreteMeasure quantize(const Grid& grid, const std::vector<double>& values, int top_k) {
    if (static_cast<std::int64_t>(values.size()) != grid.size())
        throw std::invalid_argument("quantize: size mismatch");
    const double w = grid.cell_volume();
    std::vector<std::int64_t> idx;
    for (std::int64_t i = 0; i < grid.size(); ++i)
        if (values[static_cast<size_t>(i)] != 0.0) idx.push_back(i);
    double pos_mass = 0, neg_mass = 0;
    for (auto i : idx) {
        double wi = values[static_cast<size_t>(i)] * w;
        (wi > 0 ? pos_mass : neg_mass) += wi;
    }
    if (top_k > 0 && static_cast<int>(idx.size()) > top_k) {
        std::nth_element(idx.begin(), idx.begin() + top_k, idx.end(),
                         [&](std::int64_t a, std::int64_t b) {
                             return std::abs(values[static_cast<size_t>(a)]) >
                                    std::abs(values[static_cast<size_t>(b)]);
                         });
        idx.resize(static_cast<size_t>(top_k));
        std::sort(idx.begin(), idx.end());
    }
    double kept_pos = 0, kept_neg = 0;
    for (auto i : idx) {
        double wi = values[static_cast<size_t>(i)] * w;
        (wi > 0 ? kept_pos : kept_neg) += wi;
    }
    double scale_pos = (kept_pos != 0) ? pos_mass / kept_pos : 1.0;
    double scale_neg = (kept_neg != 0) ? neg_mass / kept_neg : 1.0;
    SignedDiscreteMeasure out;
    out.d = grid.d;
    out.support.reserve(idx.size());
    out.weights.reserve(idx.size());
    for (auto i : idx) {
        double wi = values[static_cast<size_t>(i)] * w;
        out.support.push_back(grid.center(i));
        out.weights.push_back(wi * (wi > 0 ? scale_pos : scale_neg));
    }
    return out;
}

SignedDiscreteMeasure quantize(const DensityMeasure& mu, int top_k) {
    return quantize(mu.grid, mu.values, top_k);
}

PotentialOperator::PotentialOperator(const KernelSpec& spec, const Grid& grid)
    : spec_(spec), ws_(grid), kernel_hat_(sampled_kernel_padded(spec, ws_)) {
    ws_.forward(kernel_hat_);
}

GridFunction PotentialOperator::apply(const std::vector<double>& density_values) const {
    auto a = ws_.pad(density_values);
    ws_.forward(a);
    for (size_t i = 0; i < a.size(); ++i) a[i] *= kernel_hat_[i];
    ws_.inverse(a);
    auto out = ws_.unpad(a);
    const double w = ws_.grid().cell_volume();
    for (double& v : out) v *= w;
    return GridFunction(ws_.grid(), std::move(out));
}

GridFunction potential_field(const DensityMeasure& mu, const KernelSpec& spec) {
    const Grid& g = mu.grid;
    double boundary_mass = 0;
    for (std::int64_t i = 0; i < g.size(); ++i) {
        auto k = g.unflatten(i);
        for (int a = 0; a < g.d; ++a)
            if (k[a] == 0 || k[a] == g.n - 1) {
                boundary_mass += std::abs(mu.values[static_cast<size_t>(i)]) * g.cell_volume();
                break;
            }
    }
    if (boundary_mass > 1e-8)
        throw std::runtime_error("potential_field: measure has mass on the grid boundary (aliasing)");
    PotentialOperator op(spec, g);
    return op.apply(mu.values);
}

double entropy(const DensityMeasure& mu) {
    double s = 0;
    for (double v : mu.values)
        if (v > 0) s += v * std::log(v);
    return s * mu.grid.cell_volume();
}

GridFunction smear_ball(const SignedDiscreteMeasure& nu, double eta, const Grid& grid,
                        int subsamples_per_axis) {
    if (!(eta > 0)) throw std::invalid_argument("smear_ball: eta must be positive");
    const int d = grid.d;
    const double h = grid.spacing();
    for (const auto& p : nu.support)
        for (int a = 0; a < d; ++a)
            if (p[a] - eta < grid.lo || p[a] + eta > grid.hi)
                throw std::runtime_error("smear_ball: ball leaves the grid box (padding)");

    GridFunction out(grid);
    const int q = subsamples_per_axis;
    const double subvol = grid.cell_volume() / std::pow(q, d);
    for (size_t atom = 0; atom < nu.support.size(); ++atom) {
        const Point& c = nu.support[atom];
        // Cells touching the bounding box of the ball.
        std::array<int, kMaxDim> klo{0, 0, 0}, khi{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            klo[a] = std::max(0, static_cast<int>(std::floor((c[a] - eta - grid.lo) / h)));
            khi[a] = std::min(grid.n - 1, static_cast<int>(std::floor((c[a] + eta - grid.lo) / h)));
        }
        std::vector<std::pair<std::int64_t, double>> overlap;  // cell -> covered volume
        std::array<int, kMaxDim> k = klo;
        while (true) {
            double vol = 0;
            std::array<int, kMaxDim> sub{0, 0, 0};
            std::int64_t count = 1;
            for (int a = 0; a < d; ++a) count *= q;
            for (std::int64_t cidx = 0; cidx < count; ++cidx) {
                std::int64_t t = cidx;
                double r2 = 0;
                for (int a = 0; a < d; ++a) {
                    sub[a] = static_cast<int>(t % q);
                    t /= q;
                    double x = grid.lo + (k[a] + (sub[a] + 0.5) / q) * h;
                    double dx = x - c[a];
                    r2 += dx * dx;
                }
                if (r2 <= eta * eta) vol += subvol;
            }
            if (vol > 0) overlap.emplace_back(grid.flatten(k), vol);
            int a = d - 1;
            while (a >= 0) {
                if (++k[a] <= khi[a]) break;
                k[a] = klo[a];
                --a;
            }
            if (a < 0) break;
        }
        double covered = 0;
        for (auto& [cell, vol] : overlap) covered += vol;
        if (covered <= 0) throw std::runtime_error("smear_ball: ball smaller than subsampling resolution");
        // Uniform density on the ball, renormalized so the atom mass is exact.
        double wgt = nu.weights[atom] / covered;
        for (auto& [cell, vol] : overlap)
            out[cell] += wgt * vol / grid.cell_volume();
    }
    return out;
}

SignedDiscreteMeasure smear_sphere(const ParticleConfiguration& X, const std::vector<double>& etas,
                                   double h_grid) {
    X.validate();
    if (etas.size() != X.points.size())
        throw std::invalid_argument("smear_sphere: one radius per particle required");
    SignedDiscreteMeasure out;
    out.d = X.d;
    const double n = static_cast<double>(X.n());
    for (size_t i = 0; i < X.points.size(); ++i) {
        double eta = etas[i];
        if (!(eta > 0)) throw std::invalid_argument("smear_sphere: eta must be positive");
        int q = std::max(16, static_cast<int>(std::ceil(eta / h_grid)) * 8);
        auto pts = sphere_points(X.d, eta, q);
        double w = 1.0 / (n * static_cast<double>(pts.size()));
        for (const auto& p : pts) {
            out.support.push_back({X.points[i][0] + p[0], X.points[i][1] + p[1], X.points[i][2] + p[2]});
            out.weights.push_back(w);
        }
    }
    return out;
}

}  // namespace rieszgas
