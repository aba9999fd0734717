#include "rieszgas/lp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rieszgas {

namespace {
constexpr double kTol = 1e-9;
}

LpResult solve_lp_max(const std::vector<double>& objective, const std::vector<LpRow>& rows,
                      int max_pivots) {
    const int n = static_cast<int>(objective.size());
    const int m = static_cast<int>(rows.size());
    const int ncols = 2 * n + m;  // x+, x-, slacks
    // tableau: m constraint rows + objective row, each ncols + 1 wide
    std::vector<double> t(static_cast<size_t>(m + 1) * (ncols + 1), 0.0);
    auto at = [&](int r, int c) -> double& { return t[static_cast<size_t>(r) * (ncols + 1) + c]; };

    for (int r = 0; r < m; ++r) {
        if (rows[static_cast<size_t>(r)].b < 0)
            throw std::invalid_argument("solve_lp_max: requires b >= 0");
        for (auto [j, a] : rows[static_cast<size_t>(r)].coeffs) {
            at(r, j) += a;
            at(r, n + j) -= a;
        }
        at(r, 2 * n + r) = 1.0;
        at(r, ncols) = rows[static_cast<size_t>(r)].b;
    }
    // objective row holds reduced costs for maximization
    for (int j = 0; j < n; ++j) {
        at(m, j) = objective[static_cast<size_t>(j)];
        at(m, n + j) = -objective[static_cast<size_t>(j)];
    }

    std::vector<int> basis(static_cast<size_t>(m));
    for (int r = 0; r < m; ++r) basis[static_cast<size_t>(r)] = 2 * n + r;

    LpResult res;
    double best = 0.0;
    int stall = 0;
    bool bland = false;
    for (res.pivots = 0; res.pivots < max_pivots; ++res.pivots) {
        // entering column
        int enter = -1;
        if (bland) {
            for (int j = 0; j < ncols; ++j)
                if (at(m, j) > kTol) {
                    enter = j;
                    break;
                }
        } else {
            double bestc = kTol;
            for (int j = 0; j < ncols; ++j)
                if (at(m, j) > bestc) {
                    bestc = at(m, j);
                    enter = j;
                }
        }
        if (enter < 0) break;  // optimal

        // ratio test; smallest basis index breaks ties (Bland)
        int leave = -1;
        double ratio = 0.0;
        for (int r = 0; r < m; ++r) {
            double a = at(r, enter);
            if (a > kTol) {
                double q = at(r, ncols) / a;
                if (leave < 0 || q < ratio - kTol ||
                    (q < ratio + kTol &&
                     basis[static_cast<size_t>(r)] < basis[static_cast<size_t>(leave)])) {
                    leave = r;
                    ratio = q;
                }
            }
        }
        if (leave < 0) {
            res.status = LpStatus::unbounded;
            return res;
        }

        // pivot
        double piv = at(leave, enter);
        for (int c = 0; c <= ncols; ++c) at(leave, c) /= piv;
        for (int r = 0; r <= m; ++r) {
            if (r == leave) continue;
            double f = at(r, enter);
            if (f == 0.0) continue;
            for (int c = 0; c <= ncols; ++c) at(r, c) -= f * at(leave, c);
        }
        basis[static_cast<size_t>(leave)] = enter;

        double z = -at(m, ncols);
        if (z > best + 1e-12) {
            best = z;
            stall = 0;
            bland = false;
        } else if (++stall > 64) {
            bland = true;  // anti-cycling
        }
    }
    if (res.pivots >= max_pivots) res.status = LpStatus::iteration_limit;

    res.value = -at(m, ncols);
    res.x.assign(static_cast<size_t>(n), 0.0);
    for (int r = 0; r < m; ++r) {
        int j = basis[static_cast<size_t>(r)];
        if (j < n)
            res.x[static_cast<size_t>(j)] += at(r, ncols);
        else if (j < 2 * n)
            res.x[static_cast<size_t>(j - n)] -= at(r, ncols);
    }
    return res;
}

}  // namespace rieszgas
