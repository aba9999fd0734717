#pragma once

#include <optional>
#include <vector>

#include "rieszgas/measures.hpp"

namespace rieszgas {

// Axis-aligned box domain for restricted norms.
struct BoxDomain {
    Point lo{0, 0, 0};
    Point hi{0, 0, 0};

    bool contains(const Point& p, int d) const {
        for (int a = 0; a < d; ++a)
            if (p[a] < lo[a] || p[a] > hi[a]) return false;
        return true;
    }
    BoxDomain fattened(double eps, int d) const {
        BoxDomain out = *this;
        for (int a = 0; a < d; ++a) {
            out.lo[a] -= eps;
            out.hi[a] += eps;
        }
        return out;
    }
};

enum class DualNormMode { homogeneous, full };

// Dual Hoelder norm of a finitely supported measure via the pairwise LP.
//
// homogeneous:  max sum nu_i f_i  s.t. |f_i - f_j| <= |x_i - x_j|^alpha,
//               f_1 = 0 (requires total mass ~ 0, else the value is infinite).
// full:         budget variables L, M >= 0 with L + M <= 1,
//               |f_i - f_j| <= L |x_i-x_j|^alpha, |f_i| <= M; this encodes
//               |f|_{C^0,alpha seminorm} + sup|f| <= 1 exactly on the support.
//
// Pair constraints are generated lazily (violated-pair pricing); the result
// carries the optimal dual function, feasible for every pair constraint.
struct DualNormResult {
    double value = 0.0;
    std::vector<double> dual_function;
    DualNormMode mode = DualNormMode::homogeneous;
    bool infinite = false;          // homogeneous mode, nonzero total mass
    double budget_seminorm = 1.0;   // L (full mode)
    double budget_sup = 0.0;        // M (full mode)
    double feasibility_gap = 0.0;   // worst pair-constraint violation of f
    int pricing_rounds = 0;
};

DualNormResult holder_dual(const SignedDiscreteMeasure& nu, double alpha, DualNormMode mode,
                           int lp_cap = 600);

// Norms of a grid function. The Hoelder seminorm is estimated over a pair
// sample containing all adjacent pairs plus strided and quasi-random pairs.
struct FunctionNorms {
    double sup = 0.0;
    double lipschitz = 0.0;       // sup |grad f| by central differences
    double holder_alpha = 0.0;    // |f|_{C^{0,alpha}} seminorm estimate
    double holder_1_alpha = 0.0;  // |f|_{C^{1,alpha}} = |f|_{C^{0,alpha}} + max_i |d_i f|_{C^{0,alpha}}
    double h1_seminorm = 0.0;     // |f|_{H^1}
};

FunctionNorms function_norms(const GridFunction& f, double alpha);

// Fourier-side fractional seminorm, (int |fhat|^2 |xi|^{2s} dxi)^{1/2}.
double hs_fourier(const GridFunction& f, double s);

// Difference-quotient seminorm. Grid functions represent compactly supported
// f (zero outside the box); the integral over pairs leaving the box is added
// analytically for d <= 2. The same-cell contribution uses a gradient-based
// extrapolation.
double hs_dq(const GridFunction& f, double s);

// Restricted to pairs inside Omega (no exterior term).
double hs_dq(const GridFunction& f, double s, const BoxDomain& omega);

// Negative-order norm of a grid density (lattice frequency sum; the zero bin
// contributes its zero-mass limit). Nonzero mass with 2s >= d diverges and
// returns +infinity.
double h_neg_s(const GridFunction& nu, double s);

// Same for an atomic measure, by direct evaluation of its transform on the
// frequency lattice of the ambient grid.
double h_neg_s(const SignedDiscreteMeasure& nu, const Grid& ambient, double s);

// H^{-s}(Omega) norm: value^2 = w^T A^{-1} w with A the H^s(Omega) Gram
// matrix of cell indicator basis functions (L^2 mass + collocated
// difference-quotient form) and w the cell masses of nu.
struct DomainNormResult {
    double value = 0.0;
    int cells = 0;
    bool regularized = false;  // ill-conditioned Gram, solve was regularized
};

DomainNormResult h_neg_s_domain(const SignedDiscreteMeasure& nu, const Grid& grid,
                                const BoxDomain& omega, double s, int cell_cap = 4096);

// Localization check: nu must have a single sign outside omega; compares the
// full-space norm against the norm restricted to omega fattened by eps.
struct LocalizationReport {
    double full_norm = 0.0;
    double domain_norm = 0.0;
    double ratio = 0.0;  // full / domain; NaN when both vanish
    bool defined = true;
};

LocalizationReport verify_localization(const SignedDiscreteMeasure& nu, const Grid& ambient,
                                       const BoxDomain& omega, double s, double fatten_eps);

// Rigorous lower-bound certificate for ||emp_N - mu||_{C^{0,alpha}*} built
// from the distance test function
//   phi(x) = (lambda N^{-alpha/d} - dist(x, X)^alpha)_+,
// whose Hoelder seminorm is 1. certified_value = int phi d(emp - mu);
// bound = N^{-alpha/d} / (2^{(d+1)/d} (M k_d)^{1/d}) with M = sup mu and
// k_d the unit-ball volume.
struct CertificateResult {
    double certified_value = 0.0;
    double bound = 0.0;
    double lambda = 0.0;
    double phi_mu_integral = 0.0;
};

CertificateResult distance_lower_bound_certificate(const ParticleConfiguration& X,
                                                   const DensityMeasure& mu, double alpha);

}  // namespace rieszgas
