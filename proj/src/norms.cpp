#include "rieszgas/norms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rieszgas/lp.hpp"

namespace rieszgas {

namespace {

double pair_cost(const Point& a, const Point& b, int d, double alpha) {
    return std::pow(dist(a, b, d), alpha);
}

}  // namespace

DualNormResult holder_dual(const SignedDiscreteMeasure& nu, double alpha, DualNormMode mode,
                           int lp_cap) {
    if (!(alpha > 0) || alpha > 1.0) throw std::invalid_argument("holder_dual: alpha in (0,1]");
    const int n = static_cast<int>(nu.size());
    if (n > lp_cap)
        throw std::invalid_argument(
            "holder_dual: support exceeds the LP cap; thin the measure (quantize top_k)");
    DualNormResult res;
    res.mode = mode;
    if (n == 0) return res;

    double abs_mass = 0;
    for (double w : nu.weights) abs_mass += std::abs(w);
    if (mode == DualNormMode::homogeneous && std::abs(nu.total_mass()) > 1e-9 * std::max(1.0, abs_mass)) {
        res.infinite = true;
        res.value = std::numeric_limits<double>::infinity();
        return res;
    }

    // Variable layout. homogeneous: f_1..f_{n-1} for atoms 1..n-1 (atom 0
    // gauged to zero). full: f_0..f_{n-1}, then L, M.
    const bool full = (mode == DualNormMode::full);
    const int nf = full ? n : n - 1;
    const int nvars = full ? n + 2 : nf;
    const int iL = n, iM = n + 1;
    auto fvar = [&](int atom) { return full ? atom : atom - 1; };  // valid for atom >= 1 - full

    std::vector<double> cost(static_cast<size_t>(n) * n, 0.0);
    double cmax = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double c = pair_cost(nu.support[static_cast<size_t>(i)], nu.support[static_cast<size_t>(j)],
                                 nu.d, alpha);
            cost[static_cast<size_t>(i) * n + j] = c;
            cost[static_cast<size_t>(j) * n + i] = c;
            cmax = std::max(cmax, c);
        }

    std::vector<double> obj(static_cast<size_t>(nvars), 0.0);
    for (int i = 0; i < n; ++i) {
        if (!full && i == 0) continue;
        obj[static_cast<size_t>(fvar(i))] = nu.weights[static_cast<size_t>(i)];
    }

    std::vector<LpRow> rows;
    auto add_pair = [&](int i, int j) {
        // f_i - f_j <= L c_ij and f_j - f_i <= L c_ij
        double c = cost[static_cast<size_t>(i) * n + j];
        for (int sgn : {+1, -1}) {
            LpRow r;
            if (full) {
                r.coeffs = {{fvar(i), double(sgn)}, {fvar(j), double(-sgn)}, {iL, -c}};
                r.b = 0.0;
            } else {
                r.coeffs.clear();
                if (i != 0) r.coeffs.push_back({fvar(i), double(sgn)});
                if (j != 0) r.coeffs.push_back({fvar(j), double(-sgn)});
                r.b = c;
            }
            rows.push_back(std::move(r));
        }
    };
    // star constraints keep the relaxation bounded from the first round
    for (int i = 1; i < n; ++i) add_pair(0, i);
    if (full) {
        for (int i = 0; i < n; ++i)
            for (int sgn : {+1, -1}) {
                LpRow r;
                r.coeffs = {{fvar(i), double(sgn)}, {iM, -1.0}};
                r.b = 0.0;
                rows.push_back(std::move(r));
            }
        LpRow budget;
        budget.coeffs = {{iL, 1.0}, {iM, 1.0}};
        budget.b = 1.0;
        rows.push_back(std::move(budget));
        // L, M >= 0
        rows.push_back(LpRow{{{iL, -1.0}}, 0.0});
        rows.push_back(LpRow{{{iM, -1.0}}, 0.0});
    }

    const double viol_tol = 1e-9 * std::max(1.0, cmax);
    std::vector<char> in_set(static_cast<size_t>(n) * n, 0);
    for (int i = 1; i < n; ++i) in_set[static_cast<size_t>(0) * n + i] = 1;

    LpResult lp;
    std::vector<double> f(static_cast<size_t>(n), 0.0);
    double L = 1.0;
    for (int round = 0; round < 200; ++round) {
        res.pricing_rounds = round + 1;
        lp = solve_lp_max(obj, rows);
        if (lp.status == LpStatus::unbounded)
            throw std::runtime_error("holder_dual: relaxation unbounded (internal)");
        for (int i = 0; i < n; ++i) f[static_cast<size_t>(i)] = (full || i > 0) ? lp.x[static_cast<size_t>(fvar(i))] : 0.0;
        L = full ? lp.x[static_cast<size_t>(iL)] : 1.0;

        // violated-pair pricing
        std::vector<std::tuple<double, int, int>> viol;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (in_set[static_cast<size_t>(i) * n + j]) continue;
                double gap = std::abs(f[static_cast<size_t>(i)] - f[static_cast<size_t>(j)]) -
                             L * cost[static_cast<size_t>(i) * n + j];
                if (gap > viol_tol) viol.emplace_back(gap, i, j);
            }
        if (viol.empty()) {
            res.feasibility_gap = 0.0;
            break;
        }
        std::sort(viol.rbegin(), viol.rend());
        int add = std::min<int>(static_cast<int>(viol.size()), std::max(64, 2 * n));
        for (int k = 0; k < add; ++k) {
            auto [gap, i, j] = viol[static_cast<size_t>(k)];
            add_pair(i, j);
            in_set[static_cast<size_t>(i) * n + j] = 1;
        }
        res.feasibility_gap = std::get<0>(viol[0]);
    }

    res.value = lp.value;
    res.dual_function = f;
    if (full) {
        res.budget_seminorm = lp.x[static_cast<size_t>(iL)];
        res.budget_sup = lp.x[static_cast<size_t>(iM)];
    }
    return res;
}

namespace {

// Pair sample for Hoelder seminorm estimation: all adjacent pairs, axis
// strides, and a deterministic scatter of long-range pairs.
double holder_estimate(const GridFunction& f, double alpha) {
    const Grid& g = f.grid;
    const int d = g.d;
    double best = 0.0;
    auto consider = [&](std::int64_t i, std::int64_t j) {
        double dx = dist(g.center(i), g.center(j), d);
        if (dx <= 0) return;
        double q = std::abs(f[i] - f[j]) / std::pow(dx, alpha);
        best = std::max(best, q);
    };
    for (std::int64_t i = 0; i < g.size(); ++i) {
        auto k = g.unflatten(i);
        for (int a = 0; a < d; ++a)
            for (int stride : {1, 2, 4, 8, 16, 32}) {
                if (k[a] + stride < g.n) {
                    auto kk = k;
                    kk[a] += stride;
                    consider(i, g.flatten(kk));
                }
            }
    }
    // scattered long-range pairs
    unsigned state = 0x9e3779b9u;
    auto next = [&]() {
        state = state * 1664525u + 1013904223u;
        return state;
    };
    const std::int64_t count = 8 * g.size();
    for (std::int64_t t = 0; t < count; ++t) {
        std::int64_t i = static_cast<std::int64_t>(next() % g.size());
        std::int64_t j = static_cast<std::int64_t>(next() % g.size());
        if (i != j) consider(i, j);
    }
    return best;
}

std::vector<double> central_gradient_component(const GridFunction& f, int axis) {
    // central differences, one-sided at the box boundary (f is read as a
    // function on the box, not as its zero extension)
    const Grid& g = f.grid;
    std::vector<double> out(static_cast<size_t>(g.size()), 0.0);
    const double h = g.spacing();
    for (std::int64_t i = 0; i < g.size(); ++i) {
        auto k = g.unflatten(i);
        auto ku = k, kd_ = k;
        double denom = 0;
        if (k[axis] + 1 < g.n) {
            ku[axis] += 1;
            denom += h;
        }
        if (k[axis] - 1 >= 0) {
            kd_[axis] -= 1;
            denom += h;
        }
        out[static_cast<size_t>(i)] = denom > 0 ? (f[g.flatten(ku)] - f[g.flatten(kd_)]) / denom : 0.0;
    }
    return out;
}

}  // namespace

FunctionNorms function_norms(const GridFunction& f, double alpha) {
    FunctionNorms out;
    const Grid& g = f.grid;
    for (double v : f.values) out.sup = std::max(out.sup, std::abs(v));
    double grad2_int = 0;
    std::vector<GridFunction> grads;
    for (int a = 0; a < g.d; ++a) grads.emplace_back(g, central_gradient_component(f, a));
    for (std::int64_t i = 0; i < g.size(); ++i) {
        double g2 = 0;
        for (int a = 0; a < g.d; ++a) g2 += grads[static_cast<size_t>(a)][i] * grads[static_cast<size_t>(a)][i];
        out.lipschitz = std::max(out.lipschitz, std::sqrt(g2));
        grad2_int += g2;
    }
    out.h1_seminorm = std::sqrt(grad2_int * g.cell_volume());
    out.holder_alpha = holder_estimate(f, alpha);
    double dmax = 0;
    for (int a = 0; a < g.d; ++a) dmax = std::max(dmax, holder_estimate(grads[static_cast<size_t>(a)], alpha));
    out.holder_1_alpha = out.holder_alpha + dmax;
    return out;
}

double hs_fourier(const GridFunction& f, double s) {
    SpectralWorkspace ws(f.grid, 1);
    auto a = ws.pad(f.values);
    ws.forward(a);
    double sum = 0;
    for (std::int64_t k = 0; k < ws.padded_size(); ++k) {
        double xn = ws.freq_norm(k);
        if (xn == 0.0) continue;
        sum += std::norm(a[static_cast<size_t>(k)]) * std::pow(xn, 2 * s);
    }
    double hd = f.grid.cell_volume();
    return std::sqrt(sum * hd * hd * ws.freq_cell());
}

namespace {

double hs_dq_impl(const GridFunction& f, double s, const std::vector<std::int64_t>& cells,
                  bool exterior_term) {
    const Grid& g = f.grid;
    const int d = g.d;
    const double h = g.spacing();
    const double hd = g.cell_volume();
    const double p = d + 2 * s;

    std::vector<Point> centers(cells.size());
    std::vector<double> vals(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
        centers[i] = g.center(cells[i]);
        vals[i] = f[cells[i]];
    }
    double sum = 0;
    for (size_t i = 0; i < cells.size(); ++i)
        for (size_t j = i + 1; j < cells.size(); ++j) {
            double diff = vals[i] - vals[j];
            if (diff == 0.0) continue;
            sum += 2.0 * diff * diff * std::pow(dist(centers[i], centers[j], d), -p) * hd * hd;
        }
    // same-cell pairs: |f(x)-f(y)|^2 ~ |grad f . (x-y)|^2, direction-averaged
    double cellP = cell_average_power(d, 2.0 - p, h) * hd;
    for (size_t i = 0; i < cells.size(); ++i) {
        auto k = g.unflatten(cells[i]);
        double g2 = 0;
        for (int a = 0; a < d; ++a) {
            auto ku = k, kd_ = k;
            double up = 0, dn = 0;
            if (k[a] + 1 < g.n) {
                ku[a] += 1;
                up = f[g.flatten(ku)];
            }
            if (k[a] - 1 >= 0) {
                kd_[a] -= 1;
                dn = f[g.flatten(kd_)];
            }
            double der = (up - dn) / (2 * h);
            g2 += der * der;
        }
        sum += (g2 / d) * cellP * hd;
    }
    if (exterior_term && d <= 2) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (vals[i] == 0.0) continue;
            sum += 2.0 * vals[i] * vals[i] * box_exterior_integral(centers[i], d, g.lo, g.hi, p) * hd;
        }
    }
    return std::sqrt(sum);
}

}  // namespace

double hs_dq(const GridFunction& f, double s) {
    if (!(s > 0 && s < 1)) throw std::invalid_argument("hs_dq: s in (0,1)");
    std::vector<std::int64_t> cells(static_cast<size_t>(f.grid.size()));
    std::iota(cells.begin(), cells.end(), 0);
    return hs_dq_impl(f, s, cells, true);
}

double hs_dq(const GridFunction& f, double s, const BoxDomain& omega) {
    if (!(s > 0 && s < 1)) throw std::invalid_argument("hs_dq: s in (0,1)");
    std::vector<std::int64_t> cells;
    for (std::int64_t i = 0; i < f.grid.size(); ++i)
        if (omega.contains(f.grid.center(i), f.grid.d)) cells.push_back(i);
    return hs_dq_impl(f, s, cells, false);
}

double h_neg_s(const GridFunction& nu, double s) {
    const double mass = integral(nu);
    if (std::abs(mass) > 1e-9 && 2 * s >= nu.grid.d)
        return std::numeric_limits<double>::infinity();
    SpectralWorkspace ws(nu.grid, 1);
    auto a = ws.pad(nu.values);
    ws.forward(a);
    double sum = 0;
    for (std::int64_t k = 0; k < ws.padded_size(); ++k) {
        double xn = ws.freq_norm(k);
        if (xn == 0.0) continue;
        sum += std::norm(a[static_cast<size_t>(k)]) * std::pow(xn, -2 * s);
    }
    double hd = nu.grid.cell_volume();
    return std::sqrt(sum * hd * hd * ws.freq_cell());
}

double h_neg_s(const SignedDiscreteMeasure& nu, const Grid& ambient, double s) {
    if (std::abs(nu.total_mass()) > 1e-9 && 2 * s >= ambient.d)
        return std::numeric_limits<double>::infinity();
    SpectralWorkspace ws(ambient, 1);
    double sum = 0;
    const int m = ws.padded_n();
    for (std::int64_t k = 0; k < ws.padded_size(); ++k) {
        auto kk = ws.unflatten_padded(k);
        double xn = ws.freq_norm(k);
        if (xn == 0.0) continue;
        double re = 0, im = 0;
        for (size_t j = 0; j < nu.size(); ++j) {
            double phase = 0;
            for (int a = 0; a < ambient.d; ++a) {
                int ki = kk[a] < m / 2 ? kk[a] : kk[a] - m;
                phase += ki * nu.support[j][a];
            }
            phase *= -2 * std::numbers::pi / (m * ambient.spacing());
            re += nu.weights[j] * std::cos(phase);
            im += nu.weights[j] * std::sin(phase);
        }
        sum += (re * re + im * im) * std::pow(xn, -2 * s);
    }
    return std::sqrt(sum * ws.freq_cell());
}

DomainNormResult h_neg_s_domain(const SignedDiscreteMeasure& nu, const Grid& grid,
                                const BoxDomain& omega, double s, int cell_cap) {
    if (!(s > 0 && s < 1)) throw std::invalid_argument("h_neg_s_domain: s in (0,1)");
    const int d = grid.d;
    std::vector<std::int64_t> cells;
    for (std::int64_t i = 0; i < grid.size(); ++i)
        if (omega.contains(grid.center(i), d)) cells.push_back(i);
    const int K = static_cast<int>(cells.size());
    if (K == 0) throw std::invalid_argument("h_neg_s_domain: empty domain");
    if (K > cell_cap)
        throw std::invalid_argument("h_neg_s_domain: domain exceeds the cell cap; coarsen the grid");

    std::vector<std::int64_t> cell_rank(static_cast<size_t>(grid.size()), -1);
    for (int i = 0; i < K; ++i) cell_rank[static_cast<size_t>(cells[static_cast<size_t>(i)])] = i;

    // atom masses per cell; atoms must lie inside omega
    Eigen::VectorXd w = Eigen::VectorXd::Zero(K);
    const double h = grid.spacing();
    for (size_t j = 0; j < nu.size(); ++j) {
        const Point& p = nu.support[j];
        if (!omega.contains(p, d)) throw std::invalid_argument("h_neg_s_domain: atom outside omega");
        std::array<int, kMaxDim> k{0, 0, 0};
        for (int a = 0; a < d; ++a)
            k[a] = std::min(grid.n - 1, std::max(0, static_cast<int>((p[a] - grid.lo) / h)));
        std::int64_t rank = cell_rank[static_cast<size_t>(grid.flatten(k))];
        if (rank < 0) throw std::invalid_argument("h_neg_s_domain: atom cell not in omega");
        w[rank] += nu.weights[j];
    }

    const double hd = grid.cell_volume();
    const double p_exp = d + 2 * s;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
    for (int i = 0; i < K; ++i) A(i, i) += hd;  // L^2 mass
    for (int i = 0; i < K; ++i) {
        Point pi = grid.center(cells[static_cast<size_t>(i)]);
        for (int j = i + 1; j < K; ++j) {
            double q = 2.0 * std::pow(dist(pi, grid.center(cells[static_cast<size_t>(j)]), d), -p_exp) *
                       hd * hd;
            A(i, i) += q;
            A(j, j) += q;
            A(i, j) -= q;
            A(j, i) -= q;
        }
    }
    // same-cell extrapolation as a forward-difference form
    double cellP = cell_average_power(d, 2.0 - p_exp, h) * hd;
    double cadj = (cellP / d) * hd / (h * h);
    for (int i = 0; i < K; ++i) {
        auto k = grid.unflatten(cells[static_cast<size_t>(i)]);
        for (int a = 0; a < d; ++a) {
            if (k[a] + 1 >= grid.n) continue;
            auto kk = k;
            kk[a] += 1;
            std::int64_t r = cell_rank[static_cast<size_t>(grid.flatten(kk))];
            if (r < 0) continue;
            int j = static_cast<int>(r);
            A(i, i) += cadj;
            A(j, j) += cadj;
            A(i, j) -= cadj;
            A(j, i) -= cadj;
        }
    }

    DomainNormResult out;
    out.cells = K;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    Eigen::VectorXd diag = ldlt.vectorD();
    double dmax = diag.maxCoeff(), dmin = diag.minCoeff();
    if (!(dmin > 1e-12 * dmax)) {
        out.regularized = true;
        Eigen::MatrixXd Areg = A + 1e-10 * dmax * Eigen::MatrixXd::Identity(K, K);
        ldlt.compute(Areg);
    }
    Eigen::VectorXd z = ldlt.solve(w);
    out.value = std::sqrt(std::max(0.0, w.dot(z)));
    return out;
}

LocalizationReport verify_localization(const SignedDiscreteMeasure& nu, const Grid& ambient,
                                       const BoxDomain& omega, double s, double fatten_eps) {
    // sign condition outside omega
    int sign = 0;
    for (size_t j = 0; j < nu.size(); ++j) {
        if (omega.contains(nu.support[j], ambient.d)) continue;
        int sj = nu.weights[j] > 0 ? 1 : (nu.weights[j] < 0 ? -1 : 0);
        if (sj == 0) continue;
        if (sign == 0) sign = sj;
        if (sj != sign)
            throw std::invalid_argument("verify_localization: measure changes sign outside omega");
    }
    LocalizationReport rep;
    rep.full_norm = h_neg_s(nu, ambient, s);
    BoxDomain omega1 = omega.fattened(fatten_eps, ambient.d);
    SignedDiscreteMeasure restricted;
    restricted.d = nu.d;
    for (size_t j = 0; j < nu.size(); ++j)
        if (omega1.contains(nu.support[j], ambient.d)) {
            restricted.support.push_back(nu.support[j]);
            restricted.weights.push_back(nu.weights[j]);
        }
    if (restricted.size() == 0) {
        rep.defined = false;
        rep.ratio = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    rep.domain_norm = h_neg_s_domain(restricted, ambient, omega1, s).value;
    if (rep.domain_norm == 0.0) {
        rep.defined = false;
        rep.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
        rep.ratio = rep.full_norm / rep.domain_norm;
    }
    return rep;
}

CertificateResult distance_lower_bound_certificate(const ParticleConfiguration& X,
                                                   const DensityMeasure& mu, double alpha) {
    X.validate();
    const int d = X.d;
    double M = 0;
    for (double v : mu.values) M = std::max(M, v);
    if (!(M > 0)) throw std::invalid_argument("distance_lower_bound_certificate: sup mu must be positive");
    const double N = static_cast<double>(X.n());
    const double kd = unit_ball_volume(d);
    const double lambda = std::pow(2 * M * kd, -1.0 / d);
    const double A = lambda * std::pow(N, -alpha / d);
    const double rho = std::pow(A, 1.0 / alpha);  // support radius of phi

    const Grid& g = mu.grid;
    const double h = g.spacing();

    // cells touching any particle's phi-ball
    std::vector<std::int64_t> hot;
    for (const auto& p : X.points) {
        std::array<int, kMaxDim> klo{0, 0, 0}, khi{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            klo[a] = std::max(0, static_cast<int>(std::floor((p[a] - rho - g.lo) / h)) - 1);
            khi[a] = std::min(g.n - 1, static_cast<int>(std::floor((p[a] + rho - g.lo) / h)) + 1);
        }
        std::array<int, kMaxDim> k = klo;
        while (true) {
            hot.push_back(g.flatten(k));
            int a = d - 1;
            while (a >= 0) {
                if (++k[a] <= khi[a]) break;
                k[a] = klo[a];
                --a;
            }
            if (a < 0) break;
        }
    }
    std::sort(hot.begin(), hot.end());
    hot.erase(std::unique(hot.begin(), hot.end()), hot.end());

    // int phi dmu by per-cell subsampling; dist(x, X) brute force
    const int q = 4;
    std::int64_t subcount = 1;
    for (int a = 0; a < d; ++a) subcount *= q;
    double phi_mu = 0;
    for (std::int64_t cell : hot) {
        double mu_val = mu.values[static_cast<size_t>(cell)];
        if (mu_val == 0.0) continue;
        auto k = g.unflatten(cell);
        double cell_phi = 0;
        for (std::int64_t sc = 0; sc < subcount; ++sc) {
            std::int64_t t = sc;
            Point x{0, 0, 0};
            for (int a = 0; a < d; ++a) {
                int qa = static_cast<int>(t % q);
                t /= q;
                x[a] = g.lo + (k[a] + (qa + 0.5) / q) * h;
            }
            double dmin2 = std::numeric_limits<double>::infinity();
            for (const auto& p : X.points) {
                double r2 = 0;
                for (int a = 0; a < d; ++a) {
                    double dx = x[a] - p[a];
                    r2 += dx * dx;
                }
                dmin2 = std::min(dmin2, r2);
            }
            double val = A - std::pow(dmin2, 0.5 * alpha);
            if (val > 0) cell_phi += val;
        }
        phi_mu += mu_val * (cell_phi / static_cast<double>(subcount)) * g.cell_volume();
    }

    CertificateResult out;
    out.lambda = lambda;
    out.phi_mu_integral = phi_mu;
    out.certified_value = A - phi_mu;  // int phi d emp = A exactly
    out.bound = std::pow(N, -alpha / d) / (std::pow(2.0, (d + 1.0) / d) * std::pow(M * kd, 1.0 / d));
    return out;
}

}  // namespace rieszgas
